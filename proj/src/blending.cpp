#include "forgeprompt/blending.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "forgeprompt/simd/kernels.hpp"

namespace forgeprompt::blending {

using regions::RegionSpec;

std::string_view to_string(MethodKind k) noexcept {
    return k == MethodKind::Alpha ? "alpha" : "poisson";
}

std::string_view to_string(PoissonSolver s) noexcept {
    return s == PoissonSolver::RedBlackSor ? "sor" : "cg";
}

std::optional<PoissonSolver> parse_solver(std::string_view name) noexcept {
    if (name == "sor" || name == "gauss-seidel") return PoissonSolver::RedBlackSor;
    if (name == "cg") return PoissonSolver::ConjugateGradient;
    return std::nullopt;
}

void BlendConfig::validate() const {
    if (!(theta_b >= 0.0 && theta_b <= 1.0)) throw Error(Errc::Config, "blend.theta_b must lie in [0,1]");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw Error(Errc::Config, "blend.alpha must lie in (0,1]");
    if (!(tolerance > 0.0)) throw Error(Errc::Config, "blend.tolerance must be positive");
    if (max_iters < 1) throw Error(Errc::Config, "blend.max_iters must be at least 1");
    if (!(omega == 0.0 || (omega > 0.0 && omega < 2.0)))
        throw Error(Errc::Config, "blend.omega must be 0 (auto) or lie in (0,2)");
}

BlendMethod draw_method(const BlendConfig& cfg, Rng& rng) {
    const double p = rng.uniform();
    BlendMethod m;
    m.alpha = cfg.alpha;
    m.poisson = cfg.poisson_params();
    m.kind = p < cfg.theta_b ? MethodKind::Alpha : MethodKind::Poisson;
    return m;
}

namespace {

void check_inputs(const ImageBuffer& real, const ImageBuffer& fake, const RegionSpec& region) {
    if (real.width != fake.width || real.height != fake.height)
        throw Error(Errc::DimensionMismatch, "real and fake images differ in size");
    if (region.width != real.width || region.height != real.height)
        throw Error(Errc::DimensionMismatch, "region and images differ in size");
}

struct ChannelProblem {
    int width = 0;
    std::vector<std::size_t> members;  // pixel indices, row-major
    std::vector<std::uint8_t> inside;  // per pixel
    std::vector<double> f;             // current estimate, real outside the region
    std::vector<double> rhs;           // per member: 4 g_p - sum g_q
};

double residual_at(const ChannelProblem& pb, std::size_t k) {
    const std::size_t p = pb.members[k];
    const std::size_t w = static_cast<std::size_t>(pb.width);
    const double nb = (pb.f[p - w] + pb.f[p + w]) + (pb.f[p - 1] + pb.f[p + 1]);
    return pb.rhs[k] - (4.0 * pb.f[p] - nb);
}

double max_residual(const ChannelProblem& pb) {
    double r = 0.0;
    for (std::size_t k = 0; k < pb.members.size(); ++k) r = std::max(r, std::fabs(residual_at(pb, k)));
    return r;
}

PoissonStats solve_sor(ChannelProblem& pb, const RegionSpec& region, const PoissonParams& params) {
    double omega = params.omega;
    if (omega == 0.0) {
        const int n = std::max(region.bbox.width(), region.bbox.height());
        omega = 2.0 / (1.0 + std::sin(std::numbers::pi / (n + 1)));
    }
    std::vector<std::size_t> colour[2];
    for (std::size_t k = 0; k < pb.members.size(); ++k) {
        const std::size_t p = pb.members[k];
        const std::size_t x = p % pb.width;
        const std::size_t y = p / pb.width;
        colour[(x + y) % 2].push_back(k);
    }
    const std::size_t w = static_cast<std::size_t>(pb.width);
    PoissonStats st;
    st.residual = max_residual(pb);
    while (st.residual >= params.tolerance && st.iterations < params.max_iters) {
        for (const auto& set : colour)
            for (std::size_t k : set) {
                const std::size_t p = pb.members[k];
                const double nb = (pb.f[p - w] + pb.f[p + w]) + (pb.f[p - 1] + pb.f[p + 1]);
                const double gs = (nb + pb.rhs[k]) / 4.0;
                pb.f[p] += omega * (gs - pb.f[p]);
            }
        ++st.iterations;
        st.residual = max_residual(pb);
    }
    return st;
}

PoissonStats solve_cg(ChannelProblem& pb, const PoissonParams& params) {
    const std::size_t n = pb.members.size();
    const std::size_t w = static_cast<std::size_t>(pb.width);
    std::vector<std::ptrdiff_t> slot(pb.f.size(), -1);
    for (std::size_t k = 0; k < n; ++k) slot[pb.members[k]] = static_cast<std::ptrdiff_t>(k);

    std::vector<double> r(n), d(n), q(n);
    for (std::size_t k = 0; k < n; ++k) r[k] = residual_at(pb, k);
    d = r;

    auto apply = [&](const std::vector<double>& v, std::vector<double>& out) {
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t p = pb.members[k];
            double nb = 0.0;
            for (std::size_t qpix : {p - w, p + w, p - 1, p + 1})
                if (slot[qpix] >= 0) nb += v[static_cast<std::size_t>(slot[qpix])];
            out[k] = 4.0 * v[k] - nb;
        }
    };
    auto dotv = [](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
        return s;
    };

    PoissonStats st;
    st.residual = max_residual(pb);
    double rr = dotv(r, r);
    while (st.residual >= params.tolerance && st.iterations < params.max_iters) {
        apply(d, q);
        const double dq = dotv(d, q);
        if (!(dq > 0.0)) break;
        const double step = rr / dq;
        for (std::size_t k = 0; k < n; ++k) pb.f[pb.members[k]] += step * d[k];
        // refresh the true residual so drift never hides behind the recurrence
        for (std::size_t k = 0; k < n; ++k) r[k] = residual_at(pb, k);
        const double rr_next = dotv(r, r);
        const double beta = rr_next / rr;
        for (std::size_t k = 0; k < n; ++k) d[k] = r[k] + beta * d[k];
        rr = rr_next;
        ++st.iterations;
        st.residual = max_residual(pb);
    }
    return st;
}

}  // namespace

ImageBuffer alpha_blend(const ImageBuffer& real, const ImageBuffer& fake, const RegionSpec& region,
                        double alpha) {
    check_inputs(real, fake, region);
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(Errc::InvalidArgument, "alpha must lie in [0,1]");
    ImageBuffer out = real;
    const auto& k = simd::kernels();
    const double beta = 1.0 - alpha;
    // Runs of consecutive members are contiguous in the interleaved buffer.
    for (int y = 0; y < real.height; ++y) {
        int x = 0;
        while (x < real.width) {
            if (!region.contains(x, y)) {
                ++x;
                continue;
            }
            const int start = x;
            while (x < real.width && region.contains(x, y)) ++x;
            const std::size_t off = real.index(start, y);
            const std::size_t len = static_cast<std::size_t>(x - start) * ImageBuffer::channels;
            k.lerp(real.data.data() + off, fake.data.data() + off, alpha, beta, out.data.data() + off, len);
        }
    }
    return out;
}

RegionSpec erode_border(const RegionSpec& region) {
    RegionSpec out = region;
    for (int y = 0; y < region.height; ++y)
        for (int x = 0; x < region.width; ++x)
            if (x == 0 || y == 0 || x == region.width - 1 || y == region.height - 1)
                out.membership[static_cast<std::size_t>(y) * region.width + x] = 0;
    out.refresh();
    return out;
}

PoissonResult poisson_blend(const ImageBuffer& real, const ImageBuffer& fake, const RegionSpec& region,
                            const PoissonParams& params) {
    check_inputs(real, fake, region);
    if (params.max_iters < 1 || !(params.tolerance > 0.0))
        throw Error(Errc::InvalidArgument, "poisson solver needs max_iters >= 1 and tolerance > 0");
    if (region.pixel_count == 0) throw Error(Errc::EmptyRegion, "poisson region is empty");
    const int w = real.width;
    const int h = real.height;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (region.contains(x, y) && (x == 0 || y == 0 || x == w - 1 || y == h - 1))
                throw Error(Errc::RegionTouchesBorder, "region member at (" + std::to_string(x) + "," +
                                                           std::to_string(y) + ") lies on the image border");

    const std::size_t npix = real.pixel_count();
    const std::size_t ws = static_cast<std::size_t>(w);
    PoissonResult result{real, {}};

    ChannelProblem pb;
    pb.width = w;
    pb.inside = region.membership;
    for (std::size_t p = 0; p < npix; ++p)
        if (pb.inside[p]) pb.members.push_back(p);

    std::vector<double> g(npix);
    for (int c = 0; c < ImageBuffer::channels; ++c) {
        pb.f.assign(npix, 0.0);
        for (std::size_t p = 0; p < npix; ++p) {
            g[p] = fake.data[3 * p + c];
            pb.f[p] = pb.inside[p] ? g[p] : real.data[3 * p + c];
        }
        pb.rhs.resize(pb.members.size());
        for (std::size_t k = 0; k < pb.members.size(); ++k) {
            const std::size_t p = pb.members[k];
            pb.rhs[k] = 4.0 * g[p] - ((g[p - ws] + g[p + ws]) + (g[p - 1] + g[p + 1]));
        }

        const PoissonStats st = params.solver == PoissonSolver::RedBlackSor ? solve_sor(pb, region, params)
                                                                            : solve_cg(pb, params);
        if (!(st.residual < params.tolerance))
            throw Error(Errc::SolverDiverged, "channel " + std::to_string(c) + " residual " +
                                                  std::to_string(st.residual) + " after " +
                                                  std::to_string(st.iterations) + " iterations");
        result.stats.iterations = std::max(result.stats.iterations, st.iterations);
        result.stats.residual = std::max(result.stats.residual, st.residual);
        for (std::size_t p : pb.members) result.image.data[3 * p + c] = std::clamp(pb.f[p], 0.0, 1.0);
    }
    return result;
}

SynthesisResult blend_with(const ImageBuffer& real, const ImageBuffer& fake, const RegionSpec& region,
                           const BlendMethod& method) {
    if (method.kind == MethodKind::Alpha)
        return {alpha_blend(real, fake, region, method.alpha), method, std::nullopt};
    const RegionSpec inner = erode_border(region);
    if (inner.pixel_count == 0)
        throw Error(Errc::RegionTouchesBorder, "region vanishes after border erosion");
    auto res = poisson_blend(real, fake, inner, method.poisson);
    return {std::move(res.image), method, res.stats};
}

SynthesisResult synthesize(const ImageBuffer& real, const ImageBuffer& fake, const RegionSpec& region,
                           const BlendConfig& cfg, Rng& rng) {
    return blend_with(real, fake, region, draw_method(cfg, rng));
}

}  // namespace forgeprompt::blending
