// Compiled with -mavx2 -mfma; only reached after a runtime CPUID check.

#include "opk/simd.hpp"

#include <immintrin.h>

#include <vector>

namespace opk::simd::avx2 {

namespace {

// (re, im, re, im) -> (im, re, im, re)
inline __m256d swap_re_im(__m256d v) { return _mm256_permute_pd(v, 0b0101); }

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

void rotate_pair(Complex *x, Complex *y, std::size_t n, double c, Complex sigma) noexcept {
    const __m256d vc = _mm256_set1_pd(c);
    const __m256d sr = _mm256_set1_pd(sigma.real());
    const __m256d si = _mm256_set1_pd(sigma.imag());
    const __m256d neg_si = _mm256_set1_pd(-sigma.imag());
    auto *xp = reinterpret_cast<double *>(x);
    auto *yp = reinterpret_cast<double *>(y);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d xv = _mm256_loadu_pd(xp + 2 * i);
        const __m256d yv = _mm256_loadu_pd(yp + 2 * i);
        // sigma*y = (sr*yr - si*yi, sr*yi + si*yr)
        const __m256d sy = _mm256_addsub_pd(_mm256_mul_pd(sr, yv), _mm256_mul_pd(si, swap_re_im(yv)));
        // conj(sigma)*x = (sr*xr + si*xi, sr*xi - si*xr)
        const __m256d sx = _mm256_addsub_pd(_mm256_mul_pd(sr, xv), _mm256_mul_pd(neg_si, swap_re_im(xv)));
        _mm256_storeu_pd(xp + 2 * i, _mm256_fmsub_pd(vc, xv, sy));
        _mm256_storeu_pd(yp + 2 * i, _mm256_fmadd_pd(vc, yv, sx));
    }
    if (i < n) scalar::rotate_pair(x + i, y + i, n - i, c, sigma);
}

Complex dot(const Complex *a, const Complex *b, std::size_t n) noexcept {
    __m256d acc_same = _mm256_setzero_pd();  // (ar*br, ai*bi)
    __m256d acc_swap = _mm256_setzero_pd();  // (ar*bi, ai*br)
    const auto *ap = reinterpret_cast<const double *>(a);
    const auto *bp = reinterpret_cast<const double *>(b);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d av = _mm256_loadu_pd(ap + 2 * i);
        const __m256d bv = _mm256_loadu_pd(bp + 2 * i);
        acc_same = _mm256_fmadd_pd(av, bv, acc_same);
        acc_swap = _mm256_fmadd_pd(av, swap_re_im(bv), acc_swap);
    }
    alignas(32) double s[4];
    alignas(32) double w[4];
    _mm256_store_pd(s, acc_same);
    _mm256_store_pd(w, acc_swap);
    Complex result{(s[0] + s[2]) - (s[1] + s[3]), (w[0] + w[2]) + (w[1] + w[3])};
    if (i < n) result += scalar::dot(a + i, b + i, n - i);
    return result;
}

Complex dotc(const Complex *a, const Complex *b, std::size_t n) noexcept {
    __m256d acc_same = _mm256_setzero_pd();  // (ar*br, ai*bi)
    __m256d acc_swap = _mm256_setzero_pd();  // (ar*bi, ai*br)
    const auto *ap = reinterpret_cast<const double *>(a);
    const auto *bp = reinterpret_cast<const double *>(b);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d av = _mm256_loadu_pd(ap + 2 * i);
        const __m256d bv = _mm256_loadu_pd(bp + 2 * i);
        acc_same = _mm256_fmadd_pd(av, bv, acc_same);
        acc_swap = _mm256_fmadd_pd(av, swap_re_im(bv), acc_swap);
    }
    alignas(32) double w[4];
    _mm256_store_pd(w, acc_swap);
    Complex result{hsum(acc_same), (w[0] + w[2]) - (w[1] + w[3])};
    if (i < n) result += scalar::dotc(a + i, b + i, n - i);
    return result;
}

void squared_distances(const double *points, std::size_t n, std::size_t m, double *out) {
    // Transpose to coordinate-major so four j's load contiguously.
    std::vector<double> soa(n * m);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < m; ++k) soa[k * n + j] = points[j * m + k];

    for (std::size_t i = 0; i < n; ++i) {
        const double *pi = points + i * m;
        std::size_t j = 0;
        for (; j + 4 <= n; j += 4) {
            __m256d acc = _mm256_setzero_pd();
            for (std::size_t k = 0; k < m; ++k) {
                const __m256d d = _mm256_sub_pd(_mm256_set1_pd(pi[k]), _mm256_loadu_pd(soa.data() + k * n + j));
                // mul + add (no fma) keeps results bitwise equal to the scalar path
                acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
            }
            _mm256_storeu_pd(out + i * n + j, acc);
        }
        for (; j < n; ++j) {
            const double *pj = points + j * m;
            double acc = 0.0;
            for (std::size_t k = 0; k < m; ++k) {
                const double d = pi[k] - pj[k];
                acc += d * d;
            }
            out[i * n + j] = acc;
        }
    }
}

}  // namespace opk::simd::avx2
