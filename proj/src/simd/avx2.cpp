// Compiled with -mavx2 only; callers reach it through the dispatch table.

#include <immintrin.h>

#include <cmath>

#include "forgeprompt/simd/kernels.hpp"

namespace forgeprompt::simd::detail {
namespace {

inline __m256d abs_pd(__m256d v) {
    return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v);
}

void abs_diff_mean3(const double* a, const double* b, double* out, std::size_t pixels) {
    const __m256i stride3 = _mm256_set_epi64x(9, 6, 3, 0);
    const __m256d three = _mm256_set1_pd(3.0);
    std::size_t i = 0;
    for (; i + 4 <= pixels; i += 4) {
        const double* pa = a + 3 * i;
        const double* pb = b + 3 * i;
        __m256d dr = abs_pd(_mm256_sub_pd(_mm256_i64gather_pd(pa, stride3, 8),
                                          _mm256_i64gather_pd(pb, stride3, 8)));
        __m256d dg = abs_pd(_mm256_sub_pd(_mm256_i64gather_pd(pa + 1, stride3, 8),
                                          _mm256_i64gather_pd(pb + 1, stride3, 8)));
        __m256d db = abs_pd(_mm256_sub_pd(_mm256_i64gather_pd(pa + 2, stride3, 8),
                                          _mm256_i64gather_pd(pb + 2, stride3, 8)));
        _mm256_storeu_pd(out + i, _mm256_div_pd(_mm256_add_pd(_mm256_add_pd(dr, dg), db), three));
    }
    for (; i < pixels; ++i) {
        const double* pa = a + 3 * i;
        const double* pb = b + 3 * i;
        out[i] = (std::fabs(pa[0] - pb[0]) + std::fabs(pa[1] - pb[1]) + std::fabs(pa[2] - pb[2])) / 3.0;
    }
}

void lerp(const double* base, const double* over, double alpha, double beta, double* out,
          std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    const __m256d vb = _mm256_set1_pd(beta);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d o = _mm256_mul_pd(va, _mm256_loadu_pd(over + i));
        __m256d r = _mm256_mul_pd(vb, _mm256_loadu_pd(base + i));
        _mm256_storeu_pd(out + i, _mm256_add_pd(o, r));
    }
    for (; i < n; ++i) out[i] = alpha * over[i] + beta * base[i];
}

void laplacian_row(const double* up, const double* mid, const double* down, double* out,
                   std::size_t n) {
    if (n < 3) return;
    const __m256d four = _mm256_set1_pd(4.0);
    std::size_t i = 1;
    for (; i + 4 <= n - 1; i += 4) {
        __m256d vert = _mm256_add_pd(_mm256_loadu_pd(up + i), _mm256_loadu_pd(down + i));
        __m256d horz = _mm256_add_pd(_mm256_loadu_pd(mid + i - 1), _mm256_loadu_pd(mid + i + 1));
        __m256d c = _mm256_mul_pd(four, _mm256_loadu_pd(mid + i));
        _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_add_pd(vert, horz), c));
    }
    for (; i + 1 < n; ++i)
        out[i] = (up[i] + down[i]) + (mid[i - 1] + mid[i + 1]) - 4.0 * mid[i];
}

double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
        acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4)));
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    acc0 = _mm256_add_pd(acc0, acc1);
    __m128d lo = _mm256_castpd256_pd128(acc0);
    __m128d hi = _mm256_extractf128_pd(acc0, 1);
    lo = _mm_add_pd(lo, hi);
    double s = _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i),
                                              _mm256_mul_pd(va, _mm256_loadu_pd(x + i))));
    for (; i < n; ++i) y[i] = y[i] + alpha * x[i];
}

}  // namespace

const KernelTable& avx2_table() {
    static const KernelTable table{Backend::Avx2, abs_diff_mean3, lerp, laplacian_row, dot, axpy};
    return table;
}

}  // namespace forgeprompt::simd::detail
