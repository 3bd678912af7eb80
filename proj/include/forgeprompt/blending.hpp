#pragma once

#include <optional>
#include <string_view>

#include "forgeprompt/image.hpp"
#include "forgeprompt/regions.hpp"
#include "forgeprompt/rng.hpp"

namespace forgeprompt::blending {

enum class MethodKind { Alpha, Poisson };

std::string_view to_string(MethodKind k) noexcept;

enum class PoissonSolver { RedBlackSor, ConjugateGradient };

std::string_view to_string(PoissonSolver s) noexcept;
std::optional<PoissonSolver> parse_solver(std::string_view name) noexcept;

struct PoissonParams {
    int max_iters = 10000;
    double tolerance = 1e-6;  // max-norm of the discrete residual
    PoissonSolver solver = PoissonSolver::RedBlackSor;
    /// Relaxation factor for red-black sweeps; 0 picks the optimum for the
    /// region's extent, 1 is plain Gauss-Seidel.
    double omega = 0.0;
};

struct BlendMethod {
    MethodKind kind = MethodKind::Alpha;
    double alpha = 0.9;     // Alpha only
    PoissonParams poisson;  // Poisson only
};

struct BlendConfig {
    double theta_b = 0.5;
    double alpha = 0.9;
    double tolerance = 1e-6;
    int max_iters = 10000;
    PoissonSolver solver = PoissonSolver::RedBlackSor;
    double omega = 0.0;

    void validate() const;
    PoissonParams poisson_params() const { return {max_iters, tolerance, solver, omega}; }
};

/// p ~ U[0,1); Alpha when p < theta_b, otherwise Poisson.
BlendMethod draw_method(const BlendConfig& cfg, Rng& rng);

/// Inside the region: alpha * fake + (1 - alpha) * real. Outside: real.
/// alpha must lie in [0,1].
ImageBuffer alpha_blend(const ImageBuffer& real, const ImageBuffer& fake, const regions::RegionSpec& region,
                        double alpha);

struct PoissonStats {
    int iterations = 0;     // worst channel
    double residual = 0.0;  // worst channel, before clamping
};

struct PoissonResult {
    ImageBuffer image;
    PoissonStats stats;
};

/// Gradient-domain composite: inside the region solve lap(f) = lap(fake)
/// with f = real on the region's outer boundary. Throws RegionTouchesBorder
/// if any member pixel lies on the image border, SolverDiverged if the
/// residual is still above tolerance after max_iters.
PoissonResult poisson_blend(const ImageBuffer& real, const ImageBuffer& fake, const regions::RegionSpec& region,
                            const PoissonParams& params);

/// Drops member pixels on the outermost image rows/columns.
regions::RegionSpec erode_border(const regions::RegionSpec& region);

struct SynthesisResult {
    ImageBuffer mixed;
    BlendMethod method;
    std::optional<PoissonStats> poisson;
};

/// Applies an already drawn method. Poisson regions are border-eroded first;
/// RegionTouchesBorder is raised only if nothing survives the erosion.
SynthesisResult blend_with(const ImageBuffer& real, const ImageBuffer& fake, const regions::RegionSpec& region,
                           const BlendMethod& method);

/// draw_method followed by blend_with.
SynthesisResult synthesize(const ImageBuffer& real, const ImageBuffer& fake, const regions::RegionSpec& region,
                           const BlendConfig& cfg, Rng& rng);

}  // namespace forgeprompt::blending
