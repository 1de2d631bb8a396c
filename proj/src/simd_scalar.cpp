#include "opk/simd.hpp"

namespace opk::simd::scalar {

void rotate_pair(Complex *x, Complex *y, std::size_t n, double c, Complex sigma) noexcept {
    const Complex sigma_conj = std::conj(sigma);
    for (std::size_t i = 0; i < n; ++i) {
        const Complex xi = x[i];
        const Complex yi = y[i];
        x[i] = c * xi - sigma * yi;
        y[i] = sigma_conj * xi + c * yi;
    }
}

Complex dot(const Complex *a, const Complex *b, std::size_t n) noexcept {
    double re = 0.0;
    double im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        re += a[i].real() * b[i].real() - a[i].imag() * b[i].imag();
        im += a[i].real() * b[i].imag() + a[i].imag() * b[i].real();
    }
    return {re, im};
}

Complex dotc(const Complex *a, const Complex *b, std::size_t n) noexcept {
    double re = 0.0;
    double im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        re += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
        im += a[i].real() * b[i].imag() - a[i].imag() * b[i].real();
    }
    return {re, im};
}

void squared_distances(const double *points, std::size_t n, std::size_t m, double *out) {
    for (std::size_t i = 0; i < n; ++i) {
        const double *pi = points + i * m;
        for (std::size_t j = 0; j < n; ++j) {
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

}  // namespace opk::simd::scalar
