#include <cmath>

#include "forgeprompt/simd/kernels.hpp"

namespace forgeprompt::simd::detail {
namespace {

void abs_diff_mean3(const double* a, const double* b, double* out, std::size_t pixels) {
    for (std::size_t i = 0; i < pixels; ++i) {
        const double* pa = a + 3 * i;
        const double* pb = b + 3 * i;
        out[i] = (std::fabs(pa[0] - pb[0]) + std::fabs(pa[1] - pb[1]) + std::fabs(pa[2] - pb[2])) / 3.0;
    }
}

void lerp(const double* base, const double* over, double alpha, double beta, double* out,
          std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = alpha * over[i] + beta * base[i];
}

void laplacian_row(const double* up, const double* mid, const double* down, double* out,
                   std::size_t n) {
    for (std::size_t i = 1; i + 1 < n; ++i)
        out[i] = (up[i] + down[i]) + (mid[i - 1] + mid[i + 1]) - 4.0 * mid[i];
}

double dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + alpha * x[i];
}

}  // namespace

const KernelTable& scalar_table() {
    static const KernelTable table{Backend::Scalar, abs_diff_mean3, lerp, laplacian_row, dot, axpy};
    return table;
}

}  // namespace forgeprompt::simd::detail
