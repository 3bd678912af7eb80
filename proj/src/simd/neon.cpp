// AArch64 only. Advanced SIMD is mandatory there, so no runtime probe.

#include <arm_neon.h>

#include <cmath>

#include "forgeprompt/simd/kernels.hpp"

namespace forgeprompt::simd::detail {
namespace {

void abs_diff_mean3(const double* a, const double* b, double* out, std::size_t pixels) {
    const float64x2_t three = vdupq_n_f64(3.0);
    std::size_t i = 0;
    for (; i + 2 <= pixels; i += 2) {
        float64x2x3_t va = vld3q_f64(a + 3 * i);
        float64x2x3_t vb = vld3q_f64(b + 3 * i);
        float64x2_t dr = vabdq_f64(va.val[0], vb.val[0]);
        float64x2_t dg = vabdq_f64(va.val[1], vb.val[1]);
        float64x2_t db = vabdq_f64(va.val[2], vb.val[2]);
        vst1q_f64(out + i, vdivq_f64(vaddq_f64(vaddq_f64(dr, dg), db), three));
    }
    for (; i < pixels; ++i) {
        const double* pa = a + 3 * i;
        const double* pb = b + 3 * i;
        out[i] = (std::fabs(pa[0] - pb[0]) + std::fabs(pa[1] - pb[1]) + std::fabs(pa[2] - pb[2])) / 3.0;
    }
}

void lerp(const double* base, const double* over, double alpha, double beta, double* out,
          std::size_t n) {
    const float64x2_t va = vdupq_n_f64(alpha);
    const float64x2_t vb = vdupq_n_f64(beta);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t o = vmulq_f64(va, vld1q_f64(over + i));
        float64x2_t r = vmulq_f64(vb, vld1q_f64(base + i));
        vst1q_f64(out + i, vaddq_f64(o, r));
    }
    for (; i < n; ++i) out[i] = alpha * over[i] + beta * base[i];
}

void laplacian_row(const double* up, const double* mid, const double* down, double* out,
                   std::size_t n) {
    if (n < 3) return;
    const float64x2_t four = vdupq_n_f64(4.0);
    std::size_t i = 1;
    for (; i + 2 <= n - 1; i += 2) {
        float64x2_t vert = vaddq_f64(vld1q_f64(up + i), vld1q_f64(down + i));
        float64x2_t horz = vaddq_f64(vld1q_f64(mid + i - 1), vld1q_f64(mid + i + 1));
        float64x2_t c = vmulq_f64(four, vld1q_f64(mid + i));
        vst1q_f64(out + i, vsubq_f64(vaddq_f64(vert, horz), c));
    }
    for (; i + 1 < n; ++i)
        out[i] = (up[i] + down[i]) + (mid[i - 1] + mid[i + 1]) - 4.0 * mid[i];
}

double dot(const double* a, const double* b, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vaddq_f64(acc0, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
        acc1 = vaddq_f64(acc1, vmulq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2)));
    }
    double s = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(alpha);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(va, vld1q_f64(x + i))));
    for (; i < n; ++i) y[i] = y[i] + alpha * x[i];
}

}  // namespace

const KernelTable& neon_table() {
    static const KernelTable table{Backend::Neon, abs_diff_mean3, lerp, laplacian_row, dot, axpy};
    return table;
}

}  // namespace forgeprompt::simd::detail
