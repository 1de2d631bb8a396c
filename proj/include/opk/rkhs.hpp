#pragma once

// Discrete vector measures, the RKHS embedding K_eta, the universality
// quadratic forms and (Hermite) interpolation.

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "opk/kernel.hpp"

namespace opk {

struct VectorAtom {
    Point x;
    CVector v;
    bool operator==(const VectorAtom &) const = default;
};

/// Finite C^l-valued measure sum_i v_i delta_{x_i}; atoms at identical points
/// are merged by summing their vectors.
class VectorAtomMeasure {
public:
    VectorAtomMeasure() = default;
    VectorAtomMeasure(std::size_t m, std::size_t ell) : m_(m), ell_(ell) {}

    void add(const Point &x, std::span<const Complex> v);

    [[nodiscard]] std::size_t ambient_dim() const noexcept { return m_; }
    [[nodiscard]] std::size_t matrix_dim() const noexcept { return ell_; }
    [[nodiscard]] const std::vector<VectorAtom> &atoms() const noexcept { return atoms_; }
    [[nodiscard]] bool empty() const noexcept { return atoms_.empty(); }

    bool operator==(const VectorAtomMeasure &) const = default;

private:
    std::size_t m_ = 0;
    std::size_t ell_ = 0;
    std::vector<VectorAtom> atoms_;
};

/// eta = (eta_alpha)_{|alpha| <= q}.
class DerivVectorMeasure {
public:
    DerivVectorMeasure() = default;
    DerivVectorMeasure(int q, std::size_t m, std::size_t ell);
    /// q = 0 measure wrapping a single component.
    [[nodiscard]] static DerivVectorMeasure from_values(const VectorAtomMeasure &eta);

    void add(const MultiIndex &alpha, const Point &x, std::span<const Complex> v);

    [[nodiscard]] int q() const noexcept { return q_; }
    [[nodiscard]] std::size_t ambient_dim() const noexcept { return m_; }
    [[nodiscard]] std::size_t matrix_dim() const noexcept { return ell_; }
    /// Components in graded-lex order of their multi-index.
    [[nodiscard]] const std::map<MultiIndex, VectorAtomMeasure> &components() const noexcept { return components_; }
    [[nodiscard]] bool empty() const noexcept;
    [[nodiscard]] std::size_t atom_count() const noexcept;

    bool operator==(const DerivVectorMeasure &) const = default;

private:
    int q_ = 0;
    std::size_t m_ = 0;
    std::size_t ell_ = 0;
    std::map<MultiIndex, VectorAtomMeasure> components_;
};

struct ExpansionAtom {
    MultiIndex alpha;
    Point x;
    CVector v;
};

/// K_eta(y) = sum_i (d_1^{alpha_i} K)(x_i, y)^H v_i.
class RkhsElement {
public:
    RkhsElement(OperatorKernel kernel, std::vector<ExpansionAtom> atoms);

    [[nodiscard]] const OperatorKernel &kernel() const noexcept { return kernel_; }
    [[nodiscard]] const std::vector<ExpansionAtom> &atoms() const noexcept { return atoms_; }

private:
    OperatorKernel kernel_;
    std::vector<ExpansionAtom> atoms_;
};

[[nodiscard]] RkhsElement embed(const OperatorKernel &k, const DerivVectorMeasure &eta);
[[nodiscard]] CVector rkhs_eval(const RkhsElement &f, std::span<const double> y);
[[nodiscard]] CVector rkhs_deriv_eval(const RkhsElement &f, const MultiIndex &beta, std::span<const double> y);

/// Cauchy-Schwarz bound (sum_k |w_k|)^2 max_diag(M) for the form of eta.
[[nodiscard]] double quadratic_form_scale(const OperatorKernel &k, const DerivVectorMeasure &eta);

struct QuadraticFormResult {
    double value = 0.0;          // w^H M w via the derivative block Gram
    double pairing_value = 0.0;  // sum <d^beta K_eta(y_j), u_j> via the embedding
    double scale = 0.0;
};

/// <K_eta, K_eta>_{H_K}, computed by two independent routes which must agree
/// within 1e-12 * scale (InternalError otherwise).
[[nodiscard]] QuadraticFormResult quadratic_form_detailed(const OperatorKernel &k, const DerivVectorMeasure &eta);
[[nodiscard]] double quadratic_form(const OperatorKernel &k, const DerivVectorMeasure &eta);

struct InterpolationDatum {
    Point x;
    CVector target;
};

struct HermiteDatum {
    Point x;
    MultiIndex alpha;
    CVector target;
};

struct InterpolationResult {
    RkhsElement element;
    double ridge = 0.0;
    double residual = 0.0;  // max |(rkhs_deriv_eval - target)| over the data
};

/// ridge < 0 selects the default 1e-10 trace(Gram)/dim.
[[nodiscard]] InterpolationResult interpolate(const OperatorKernel &k, const std::vector<InterpolationDatum> &data,
                                              double ridge = -1.0);
[[nodiscard]] InterpolationResult hermite_interpolate(const OperatorKernel &k, const std::vector<HermiteDatum> &data,
                                                      double ridge = -1.0);

}  // namespace opk
