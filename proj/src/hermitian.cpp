#include "opk/hermitian.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "opk/error.hpp"
#include "opk/simd.hpp"

namespace opk {

const char *to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidMatrix: return "InvalidMatrix";
        case ErrorCode::NotPSD: return "NotPSD";
        case ErrorCode::InvalidGrid: return "InvalidGrid";
        case ErrorCode::InvalidMeasure: return "InvalidMeasure";
        case ErrorCode::InvalidVector: return "InvalidVector";
        case ErrorCode::InvalidPoint: return "InvalidPoint";
        case ErrorCode::NotRadial: return "NotRadial";
        case ErrorCode::UnsupportedJet: return "UnsupportedJet";
        case ErrorCode::DuplicatePoints: return "DuplicatePoints";
        case ErrorCode::IllConditioned: return "IllConditioned";
        case ErrorCode::InvalidDescriptor: return "InvalidDescriptor";
        case ErrorCode::InternalError: return "InternalError";
    }
    return "Unknown";
}

// ---------------------------------------------------------------- CMatrix

CMatrix CMatrix::identity(std::size_t n) {
    CMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

CMatrix CMatrix::adjoint() const {
    CMatrix out(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
    return out;
}

double CMatrix::frobenius_norm() const noexcept {
    double acc = 0.0;
    for (const Complex &z : data_) acc += std::norm(z);
    return std::sqrt(acc);
}

double CMatrix::max_abs() const noexcept {
    double out = 0.0;
    for (const Complex &z : data_) out = std::max(out, std::abs(z));
    return out;
}

CMatrix &CMatrix::operator+=(const CMatrix &rhs) {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_) throw Error(ErrorCode::InvalidMatrix, "shape mismatch in +");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += rhs.data_[k];
    return *this;
}

CMatrix &CMatrix::operator-=(const CMatrix &rhs) {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_) throw Error(ErrorCode::InvalidMatrix, "shape mismatch in -");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= rhs.data_[k];
    return *this;
}

CMatrix &CMatrix::operator*=(Complex s) noexcept {
    for (Complex &z : data_) z *= s;
    return *this;
}

CMatrix &CMatrix::add_scaled(const CMatrix &rhs, Complex s) {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_) throw Error(ErrorCode::InvalidMatrix, "shape mismatch in add_scaled");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += s * rhs.data_[k];
    return *this;
}

CMatrix matmul(const CMatrix &a, const CMatrix &b) {
    if (a.cols() != b.rows()) throw Error(ErrorCode::InvalidMatrix, "shape mismatch in matmul");
    CMatrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const Complex aik = a(i, k);
            if (aik == Complex{}) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
        }
    return out;
}

CVector matvec(const CMatrix &a, std::span<const Complex> v) {
    if (a.cols() != v.size()) throw Error(ErrorCode::InvalidMatrix, "shape mismatch in matvec");
    CVector out(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) out[i] = simd::dot(a.row(i).data(), v.data(), v.size());
    return out;
}

Complex inner(std::span<const Complex> a, std::span<const Complex> b) {
    if (a.size() != b.size()) throw Error(ErrorCode::InvalidVector, "length mismatch in inner product");
    return simd::dotc(b.data(), a.data(), a.size());
}

double norm(std::span<const Complex> v) {
    double acc = 0.0;
    for (const Complex &z : v) acc += std::norm(z);
    return std::sqrt(acc);
}

// -------------------------------------------------------- HermitianMatrix

HermitianMatrix::HermitianMatrix(const CMatrix &a) : m_(a.rows(), a.cols()) {
    if (a.rows() != a.cols()) throw Error(ErrorCode::InvalidMatrix, "Hermitian matrix must be square");
    const std::size_t n = a.rows();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const Complex z = a(i, j);
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
                throw Error(ErrorCode::InvalidMatrix,
                            "non-finite entry at (" + std::to_string(i) + "," + std::to_string(j) + ")");
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        m_(i, i) = a(i, i).real();
        for (std::size_t j = i + 1; j < n; ++j) {
            const Complex z = 0.5 * (a(i, j) + std::conj(a(j, i)));
            m_(i, j) = z;
            m_(j, i) = std::conj(z);
        }
    }
}

HermitianMatrix HermitianMatrix::zeros(std::size_t n) { return HermitianMatrix(CMatrix(n, n)); }

HermitianMatrix HermitianMatrix::identity(std::size_t n) { return HermitianMatrix(CMatrix::identity(n)); }

HermitianMatrix HermitianMatrix::diagonal(std::span<const double> d) {
    CMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return HermitianMatrix(m);
}

HermitianMatrix HermitianMatrix::outer(std::span<const Complex> v) {
    CMatrix m(v.size(), v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = v[i] * std::conj(v[j]);
    return HermitianMatrix(m);
}

double HermitianMatrix::quadratic_form(std::span<const Complex> v) const {
    if (v.size() != dim()) throw Error(ErrorCode::InvalidVector, "length mismatch in quadratic form");
    double acc = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) {
        const Complex row_dot = simd::dot(m_.row(i).data(), v.data(), v.size());
        acc += (std::conj(v[i]) * row_dot).real();
    }
    return acc;
}

HermitianMatrix HermitianMatrix::scaled(double s) const {
    HermitianMatrix out = *this;
    out.m_ *= s;
    return out;
}

HermitianMatrix operator+(const HermitianMatrix &a, const HermitianMatrix &b) {
    HermitianMatrix out = a;
    out.m_ += b.m_;
    return out;
}

// ------------------------------------------------------------ eigensolver

CVector EigenDecomposition::eigenvector(std::size_t k) const {
    CVector v(eigenvectors.rows());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = eigenvectors(i, k);
    return v;
}

namespace {

double off_diagonal_norm(const CMatrix &a) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (i != j) acc += std::norm(a(i, j));
    return std::sqrt(acc);
}

}  // namespace

EigenDecomposition eigen_hermitian(const HermitianMatrix &input) {
    const std::size_t n = input.dim();
    if (n == 0) throw Error(ErrorCode::InvalidMatrix, "empty matrix");

    CMatrix a = input.matrix();
    // Row p of vt holds eigenvector p, so V <- V J becomes a contiguous row rotation.
    CMatrix vt = CMatrix::identity(n);
    const double scale = a.frobenius_norm();
    const double target = 1e-14 * scale;

    for (int sweep = 0; sweep < 100 && off_diagonal_norm(a) > target; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const Complex apq = a(p, q);
                const double g = std::abs(apq);
                if (g == 0.0 || g < 1e-300) continue;
                const Complex phase = apq / g;
                const double tau = (a(q, q).real() - a(p, p).real()) / (2.0 * g);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                // A <- J^H A  (rows p, q)
                simd::rotate_pair(a.row(p).data(), a.row(q).data(), n, c, s * phase);
                // A <- A J    (columns p, q)
                const Complex sigma_col = s * std::conj(phase);
                for (std::size_t k = 0; k < n; ++k) {
                    const Complex x = a(k, p);
                    const Complex y = a(k, q);
                    a(k, p) = c * x - sigma_col * y;
                    a(k, q) = std::conj(sigma_col) * x + c * y;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
                simd::rotate_pair(vt.row(p).data(), vt.row(q).data(), n, c, sigma_col);
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });

    EigenDecomposition out;
    out.eigenvalues.resize(n);
    out.eigenvectors = CMatrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        out.eigenvalues[k] = a(order[k], order[k]).real();
        for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, k) = vt(order[k], i);
    }
    return out;
}

double min_eigenvalue(const HermitianMatrix &a) { return eigen_hermitian(a).eigenvalues.front(); }

double trace(const HermitianMatrix &a) noexcept {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) acc += a(i, i).real();
    return acc;
}

HermitianMatrix psd_sqrt(const HermitianMatrix &a, double tol) {
    const EigenDecomposition eig = eigen_hermitian(a);
    const double scale = std::max(1.0, std::abs(trace(a)));
    if (eig.eigenvalues.front() < -tol * scale) {
        throw Error(ErrorCode::NotPSD, "min eigenvalue " + std::to_string(eig.eigenvalues.front()));
    }
    const std::size_t n = a.dim();
    CMatrix out(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const double root = std::sqrt(std::max(0.0, eig.eigenvalues[k]));
        if (root == 0.0) continue;
        for (std::size_t i = 0; i < n; ++i) {
            const Complex vik = root * eig.eigenvectors(i, k);
            for (std::size_t j = 0; j < n; ++j) out(i, j) += vik * std::conj(eig.eigenvectors(j, k));
        }
    }
    return HermitianMatrix(out);
}

PsdCheck is_psd(const HermitianMatrix &a, double tol) {
    const EigenDecomposition eig = eigen_hermitian(a);
    PsdCheck out;
    out.min_eigenvalue = eig.eigenvalues.front();
    out.psd = out.min_eigenvalue >= -tol * std::max(1.0, trace(a));
    if (!out.psd) out.witness = eig.eigenvector(0);
    return out;
}

// --------------------------------------------------------------- Cholesky

CMatrix cholesky_psd(const HermitianMatrix &a, double jitter, double tol) {
    if (jitter < 0.0) throw Error(ErrorCode::InvalidMatrix, "negative jitter");
    const std::size_t n = a.dim();
    const double scale = std::max(1.0, trace(a) + jitter * static_cast<double>(n));
    CMatrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double pivot = a(j, j).real() + jitter;
        for (std::size_t k = 0; k < j; ++k) pivot -= std::norm(l(j, k));
        if (pivot < -tol * scale) {
            throw Error(ErrorCode::NotPSD,
                        "negative pivot " + std::to_string(pivot) + " at index " + std::to_string(j));
        }
        if (pivot <= tol * scale) continue;  // numerically zero: leave column j empty
        const double d = std::sqrt(pivot);
        l(j, j) = d;
        for (std::size_t i = j + 1; i < n; ++i) {
            // a_ij - sum_k l_ik conj(l_jk)
            const Complex s = a(i, j) - simd::dotc(l.row(j).data(), l.row(i).data(), j);
            l(i, j) = s / d;
        }
    }
    return l;
}

CVector cholesky_solve(const CMatrix &lower, std::span<const Complex> b) {
    const std::size_t n = lower.rows();
    if (b.size() != n) throw Error(ErrorCode::InvalidVector, "length mismatch in cholesky_solve");
    CVector y(b.begin(), b.end());
    for (std::size_t i = 0; i < n; ++i) {
        if (lower(i, i) == Complex{}) {
            throw Error(ErrorCode::IllConditioned, "zero pivot at index " + std::to_string(i) + "; increase ridge");
        }
        y[i] = (y[i] - simd::dot(lower.row(i).data(), y.data(), i)) / lower(i, i);
    }
    for (std::size_t ii = n; ii-- > 0;) {
        Complex s = y[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= std::conj(lower(k, ii)) * y[k];
        y[ii] = s / lower(ii, ii).real();
    }
    return y;
}

}  // namespace opk
