#pragma once

// Small dense complex linear algebra. Sizes stay in the low hundreds, so
// everything is row-major std::vector storage and O(n^3) algorithms.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace opk {

using Complex = std::complex<double>;
using CVector = std::vector<Complex>;

/// Default relative tolerance for PSD decisions, scaled by max(1, trace).
inline constexpr double kDefaultPsdTol = 1e-10;

class CMatrix {
public:
    CMatrix() = default;
    CMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    [[nodiscard]] static CMatrix zeros(std::size_t rows, std::size_t cols) { return {rows, cols}; }
    [[nodiscard]] static CMatrix identity(std::size_t n);

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }

    Complex &operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    const Complex &operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    [[nodiscard]] std::span<Complex> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
    [[nodiscard]] std::span<const Complex> row(std::size_t i) const noexcept {
        return {data_.data() + i * cols_, cols_};
    }
    [[nodiscard]] Complex *data() noexcept { return data_.data(); }
    [[nodiscard]] const Complex *data() const noexcept { return data_.data(); }

    [[nodiscard]] CMatrix adjoint() const;
    [[nodiscard]] double frobenius_norm() const noexcept;
    [[nodiscard]] double max_abs() const noexcept;

    CMatrix &operator+=(const CMatrix &rhs);
    CMatrix &operator-=(const CMatrix &rhs);
    CMatrix &operator*=(Complex s) noexcept;
    // this += s * rhs
    CMatrix &add_scaled(const CMatrix &rhs, Complex s);

    friend CMatrix operator+(CMatrix lhs, const CMatrix &rhs) { return lhs += rhs; }
    friend CMatrix operator-(CMatrix lhs, const CMatrix &rhs) { return lhs -= rhs; }
    friend CMatrix operator*(CMatrix lhs, Complex s) { return lhs *= s; }
    friend CMatrix operator*(Complex s, CMatrix rhs) { return rhs *= s; }

    bool operator==(const CMatrix &) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> data_;
};

[[nodiscard]] CMatrix matmul(const CMatrix &a, const CMatrix &b);
[[nodiscard]] CVector matvec(const CMatrix &a, std::span<const Complex> v);

/// <a, b> = sum a_i conj(b_i), conjugate-linear in the second slot.
[[nodiscard]] Complex inner(std::span<const Complex> a, std::span<const Complex> b);
[[nodiscard]] double norm(std::span<const Complex> v);

/// Complex l x l self-adjoint matrix. Construction symmetrizes A <- (A + A^H)/2
/// and zeroes diagonal imaginary parts, so the invariant holds by construction.
class HermitianMatrix {
public:
    HermitianMatrix() = default;
    explicit HermitianMatrix(const CMatrix &a);

    [[nodiscard]] static HermitianMatrix zeros(std::size_t n);
    [[nodiscard]] static HermitianMatrix identity(std::size_t n);
    [[nodiscard]] static HermitianMatrix diagonal(std::span<const double> d);
    /// Rank-one v v^H.
    [[nodiscard]] static HermitianMatrix outer(std::span<const Complex> v);

    [[nodiscard]] std::size_t dim() const noexcept { return m_.rows(); }
    const Complex &operator()(std::size_t i, std::size_t j) const noexcept { return m_(i, j); }
    [[nodiscard]] const CMatrix &matrix() const noexcept { return m_; }

    /// Re <A v, v> = Re v^H A v.
    [[nodiscard]] double quadratic_form(std::span<const Complex> v) const;

    [[nodiscard]] HermitianMatrix scaled(double s) const;
    friend HermitianMatrix operator+(const HermitianMatrix &a, const HermitianMatrix &b);

    bool operator==(const HermitianMatrix &) const = default;

private:
    CMatrix m_;
};

struct EigenDecomposition {
    std::vector<double> eigenvalues;  // ascending
    CMatrix eigenvectors;             // unitary, column k pairs with eigenvalues[k]

    [[nodiscard]] CVector eigenvector(std::size_t k) const;
};

/// Cyclic complex Jacobi. Sweeps until the off-diagonal Frobenius mass drops
/// below 1e-14 ||A||_F (at most 100 sweeps). Throws InvalidMatrix on NaN/Inf.
[[nodiscard]] EigenDecomposition eigen_hermitian(const HermitianMatrix &a);
[[nodiscard]] double min_eigenvalue(const HermitianMatrix &a);
[[nodiscard]] double trace(const HermitianMatrix &a) noexcept;

[[nodiscard]] HermitianMatrix psd_sqrt(const HermitianMatrix &a, double tol = kDefaultPsdTol);

struct PsdCheck {
    bool psd = false;
    double min_eigenvalue = 0.0;
    CVector witness;  // unit eigenvector of the smallest eigenvalue when !psd
};

/// psd iff min eigenvalue >= -tol * max(1, trace(A)).
[[nodiscard]] PsdCheck is_psd(const HermitianMatrix &a, double tol = kDefaultPsdTol);

/// Lower-triangular L with L L^H = A + jitter I. Pivots within tol*scale of zero
/// are accepted as zero (column zeroed); below that NotPSD names the pivot.
[[nodiscard]] CMatrix cholesky_psd(const HermitianMatrix &a, double jitter, double tol = kDefaultPsdTol);

/// Solves L L^H x = b. Throws IllConditioned when a pivot is zero.
[[nodiscard]] CVector cholesky_solve(const CMatrix &lower, std::span<const Complex> b);

}  // namespace opk
