// AVX2/FMA kernel variants. Compiled with -mavx2 -mfma in this translation
// unit only; callers reach it through the runtime dispatch table.
//
// Element-wise kernels deliberately use mul/add instead of fused ops so
// they round exactly like the scalar reference. Reductions use FMA and a
// fixed 4-accumulator order.

#ifdef ESMDA_BUILD_AVX2

#include <immintrin.h>

#include "kernels_impl.hpp"

namespace esmda::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d pair = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

} // namespace

double dot(const double* x, const double* y, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    __m256d acc2 = _mm256_setzero_pd();
    __m256d acc3 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i),
                               _mm256_loadu_pd(y + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4),
                               _mm256_loadu_pd(y + i + 4), acc1);
        acc2 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 8),
                               _mm256_loadu_pd(y + i + 8), acc2);
        acc3 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 12),
                               _mm256_loadu_pd(y + i + 12), acc3);
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i),
                               _mm256_loadu_pd(y + i), acc0);
    }
    double acc = hsum(_mm256_add_pd(_mm256_add_pd(acc0, acc1),
                                    _mm256_add_pd(acc2, acc3)));
    for (; i < n; ++i)
        acc += x[i] * y[i];
    return acc;
}

double sum(const double* x, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
        acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(x + i + 4));
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i)
        acc += x[i];
    return acc;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
        _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
    }
    for (; i < n; ++i)
        y[i] += a * x[i];
}

void scal(double a, double* x, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    for (; i < n; ++i)
        x[i] *= a;
}

void shift_scale(const double* x, double shift, double factor, double* out,
                 std::size_t n) {
    const __m256d vshift = _mm256_set1_pd(shift);
    const __m256d vfac = _mm256_set1_pd(factor);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d centered =
            _mm256_sub_pd(_mm256_loadu_pd(x + i), vshift);
        _mm256_storeu_pd(out + i, _mm256_mul_pd(centered, vfac));
    }
    for (; i < n; ++i)
        out[i] = (x[i] - shift) * factor;
}

void rot(double* x, double* y, double c, double s, std::size_t n) {
    const __m256d vc = _mm256_set1_pd(c);
    const __m256d vs = _mm256_set1_pd(s);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vx = _mm256_loadu_pd(x + i);
        const __m256d vy = _mm256_loadu_pd(y + i);
        _mm256_storeu_pd(
            x + i, _mm256_sub_pd(_mm256_mul_pd(vc, vx), _mm256_mul_pd(vs, vy)));
        _mm256_storeu_pd(
            y + i, _mm256_add_pd(_mm256_mul_pd(vs, vx), _mm256_mul_pd(vc, vy)));
    }
    for (; i < n; ++i) {
        const double xi = x[i];
        const double yi = y[i];
        x[i] = c * xi - s * yi;
        y[i] = s * xi + c * yi;
    }
}

double weighted_ssq(const double* x, const double* ref, const double* w,
                    std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256d r0 = _mm256_mul_pd(
            _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(ref + i)),
            _mm256_loadu_pd(w + i));
        const __m256d r1 = _mm256_mul_pd(
            _mm256_sub_pd(_mm256_loadu_pd(x + i + 4),
                          _mm256_loadu_pd(ref + i + 4)),
            _mm256_loadu_pd(w + i + 4));
        acc0 = _mm256_fmadd_pd(r0, r0, acc0);
        acc1 = _mm256_fmadd_pd(r1, r1, acc1);
    }
    for (; i + 4 <= n; i += 4) {
        const __m256d r = _mm256_mul_pd(
            _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(ref + i)),
            _mm256_loadu_pd(w + i));
        acc0 = _mm256_fmadd_pd(r, r, acc0);
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) {
        const double r = (x[i] - ref[i]) * w[i];
        acc += r * r;
    }
    return acc;
}

} // namespace esmda::kernels::avx2

#endif // ESMDA_BUILD_AVX2
