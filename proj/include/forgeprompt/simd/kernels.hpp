#pragma once

// Data-parallel inner loops. Every kernel has a scalar reference in
// scalar.cpp; vector variants live in avx2.cpp / neon.cpp and are selected
// once at runtime. Elementwise kernels must be bit-identical to the scalar
// reference (no FMA contraction, same operation order). Reductions (dot) may
// differ by rounding only.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace forgeprompt::simd {

enum class Backend { Scalar, Avx2, Neon };

std::string_view to_string(Backend b) noexcept;

struct KernelTable {
    Backend backend;

    /// out[i] = (|a[3i]-b[3i]| + |a[3i+1]-b[3i+1]| + |a[3i+2]-b[3i+2]|) / 3
    void (*abs_diff_mean3)(const double* a, const double* b, double* out, std::size_t pixels);

    /// out[i] = alpha * over[i] + beta * base[i]
    void (*lerp)(const double* base, const double* over, double alpha, double beta, double* out,
                 std::size_t n);

    /// Interior 4-neighbour Laplacian of one row, columns 1..n-2:
    /// out[i] = (up[i] + down[i]) + (mid[i-1] + mid[i+1]) - 4 * mid[i]
    void (*laplacian_row)(const double* up, const double* mid, const double* down, double* out,
                          std::size_t n);

    double (*dot)(const double* a, const double* b, std::size_t n);

    /// y[i] = y[i] + alpha * x[i]
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
};

/// Kernel table for the active backend. First call picks the best backend
/// the CPU supports, unless FORGEPROMPT_SIMD=scalar|avx2|neon says otherwise.
const KernelTable& kernels();

/// Backends compiled in and supported by this CPU; Scalar is always first.
std::vector<Backend> available_backends();

const KernelTable& table_for(Backend b);

/// Overrides the active backend (tests, benchmarks). Throws InvalidArgument
/// if the backend is unavailable.
void set_backend(Backend b);

namespace detail {
const KernelTable& scalar_table();
#if defined(FORGEPROMPT_HAVE_AVX2)
const KernelTable& avx2_table();
#endif
#if defined(FORGEPROMPT_HAVE_NEON)
const KernelTable& neon_table();
#endif
}  // namespace detail

}  // namespace forgeprompt::simd
