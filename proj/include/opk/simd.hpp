#pragma once

// Data-parallel inner loops shared by the dense linear algebra and Gram
// assembly. Each routine has a scalar reference in opk::simd::scalar and, on
// x86-64, an AVX2/FMA variant in opk::simd::avx2. The dispatching entry points
// pick one at first use from CPUID; OPK_SIMD=scalar forces the reference path.

#include <complex>
#include <cstddef>

namespace opk::simd {

using Complex = std::complex<double>;

enum class Isa { Scalar, Avx2 };

[[nodiscard]] Isa active_isa() noexcept;
[[nodiscard]] const char *isa_name(Isa isa) noexcept;
[[nodiscard]] bool avx2_available() noexcept;

// x <- c*x - sigma*y,  y <- conj(sigma)*x + c*y   (elementwise, n entries)
void rotate_pair(Complex *x, Complex *y, std::size_t n, double c, Complex sigma) noexcept;

// sum_i a[i] * b[i]
[[nodiscard]] Complex dot(const Complex *a, const Complex *b, std::size_t n) noexcept;

// sum_i conj(a[i]) * b[i]
[[nodiscard]] Complex dotc(const Complex *a, const Complex *b, std::size_t n) noexcept;

// out[i*n + j] = ||p_i - p_j||^2 for row-major points (n x m).
void squared_distances(const double *points, std::size_t n, std::size_t m, double *out);

namespace scalar {
void rotate_pair(Complex *x, Complex *y, std::size_t n, double c, Complex sigma) noexcept;
[[nodiscard]] Complex dot(const Complex *a, const Complex *b, std::size_t n) noexcept;
[[nodiscard]] Complex dotc(const Complex *a, const Complex *b, std::size_t n) noexcept;
void squared_distances(const double *points, std::size_t n, std::size_t m, double *out);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define OPK_HAVE_AVX2_TU 1
namespace avx2 {
void rotate_pair(Complex *x, Complex *y, std::size_t n, double c, Complex sigma) noexcept;
[[nodiscard]] Complex dot(const Complex *a, const Complex *b, std::size_t n) noexcept;
[[nodiscard]] Complex dotc(const Complex *a, const Complex *b, std::size_t n) noexcept;
void squared_distances(const double *points, std::size_t n, std::size_t m, double *out);
}  // namespace avx2
#else
#define OPK_HAVE_AVX2_TU 0
#endif

}  // namespace opk::simd
