#pragma once

// Finite atomic nonnegative operator-valued measures on [0, inf) and the
// exact radial classification criterion built on them.

#include <cstddef>
#include <span>
#include <vector>

#include "opk/hermitian.hpp"
#include "opk/profiles.hpp"

namespace opk {

struct OperatorAtom {
    double omega = 0.0;
    HermitianMatrix weight;
    bool operator==(const OperatorAtom &) const = default;
};

/// Lambda = sum_j G_j delta_{omega_j}. Construction merges atoms at equal
/// support points, drops zero matrices (remembering where they sat) and
/// rejects weights that are not PSD.
class OperatorMeasure {
public:
    OperatorMeasure() = default;
    OperatorMeasure(std::size_t dim, std::vector<OperatorAtom> atoms, double psd_tol = kDefaultPsdTol);

    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] const std::vector<OperatorAtom> &atoms() const noexcept { return atoms_; }
    [[nodiscard]] const std::vector<double> &null_support() const noexcept { return null_support_; }
    [[nodiscard]] bool empty() const noexcept { return atoms_.empty(); }

    [[nodiscard]] OperatorMeasure scaled(double c) const;

    bool operator==(const OperatorMeasure &) const = default;

private:
    std::size_t dim_ = 0;
    std::vector<OperatorAtom> atoms_;  // sorted by omega
    std::vector<double> null_support_;
};

struct ScalarAtom {
    double omega = 0.0;
    double weight = 0.0;
    bool operator==(const ScalarAtom &) const = default;
};

class ScalarMeasure {
public:
    ScalarMeasure() = default;
    explicit ScalarMeasure(std::vector<ScalarAtom> atoms);

    [[nodiscard]] const std::vector<ScalarAtom> &atoms() const noexcept { return atoms_; }
    [[nodiscard]] double total() const noexcept;
    [[nodiscard]] double total_off_origin() const noexcept;

    bool operator==(const ScalarMeasure &) const = default;

private:
    std::vector<ScalarAtom> atoms_;
};

/// Lambda_v(A) = <Lambda(A) v, v>.
[[nodiscard]] ScalarMeasure scalar_projection_measure(const OperatorMeasure &measure, std::span<const Complex> v);

struct RNDecomposition {
    ScalarMeasure trace_measure;           // (omega_j, tr G_j)
    std::vector<HermitianMatrix> densities;  // G_j / tr G_j, aligned with trace_measure atoms
    std::vector<double> null_atoms;        // support points that carried a zero matrix
};

[[nodiscard]] RNDecomposition radon_nikodym(const OperatorMeasure &measure);

/// Sum of G_j, over omega_j > 0 only when restricted.
[[nodiscard]] HermitianMatrix total_operator(const OperatorMeasure &measure, bool restrict_positive_support);

enum class RadialVerdict { StrictlyPDAndUniversal, NotStrictlyPD };

[[nodiscard]] const char *to_string(RadialVerdict v) noexcept;

struct RadialClassification {
    RadialVerdict verdict = RadialVerdict::NotStrictlyPD;
    double restricted_min_eigenvalue = 0.0;
    double tolerance = 0.0;  // absolute threshold the eigenvalue was compared with
    CVector witness;         // unit vector with <G_j v, v> = 0 for omega_j > 0 when NotStrictlyPD
    std::vector<CVector> null_space;  // orthonormal basis of the numerically null eigenspace
    bool c0_membership = false;
};

/// Strictly PD (and universal) iff the total operator over omega > 0 is
/// positive definite; equivalently every projection <F(t) v, v> is
/// nonconstant.
[[nodiscard]] RadialClassification classify_radial(const OperatorMeasure &measure, ProfileKind family,
                                                   double tol = kDefaultPsdTol);

/// True iff no mass sits at omega = 0.
[[nodiscard]] bool c0_membership(const OperatorMeasure &measure) noexcept;

}  // namespace opk
