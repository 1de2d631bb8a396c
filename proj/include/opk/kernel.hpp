#pragma once

// Operator-valued kernels P(x,y) = sum_j p_{w_j}(x,y) G_j, their mixed partial
// derivatives, and (derivative) block Gram matrices.

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "opk/hermitian.hpp"
#include "opk/measures.hpp"
#include "opk/profiles.hpp"

namespace opk {

using Point = std::vector<double>;

/// Highest |alpha| + |beta| accepted by derivative evaluation.
inline constexpr int kMaxDerivOrder = 8;

struct PlaneWaveAtom {
    std::vector<double> xi;
    HermitianMatrix weight;
    bool operator==(const PlaneWaveAtom &) const = default;
};

enum class KernelFamily { Radial, PlaneWave, ShiftedGaussian };

/// Immutable after construction.
class OperatorKernel {
public:
    [[nodiscard]] static OperatorKernel radial(RadialProfile profile, OperatorMeasure measure, std::size_t m);
    [[nodiscard]] static OperatorKernel plane_wave(std::vector<PlaneWaveAtom> atoms, std::size_t m, std::size_t ell);
    /// The 2x2 kernel [[g(x-y), g(x-y+2w)], [g(x-y-2w), g(x-y)]] with g = exp(-|.|^2).
    [[nodiscard]] static OperatorKernel shifted_gaussian(std::vector<double> w);

    [[nodiscard]] KernelFamily family() const noexcept { return family_; }
    [[nodiscard]] bool is_radial() const noexcept { return family_ == KernelFamily::Radial; }
    [[nodiscard]] bool has_analytic_jets() const noexcept;
    [[nodiscard]] std::size_t ambient_dim() const noexcept { return m_; }
    [[nodiscard]] std::size_t matrix_dim() const noexcept { return ell_; }

    [[nodiscard]] const RadialProfile &profile() const noexcept { return profile_; }
    [[nodiscard]] const OperatorMeasure &measure() const noexcept { return measure_; }
    [[nodiscard]] const std::vector<PlaneWaveAtom> &plane_wave_atoms() const noexcept { return waves_; }
    [[nodiscard]] const std::vector<double> &shift() const noexcept { return shift_; }

    [[nodiscard]] std::string describe() const;

    bool operator==(const OperatorKernel &) const = default;

private:
    KernelFamily family_ = KernelFamily::Radial;
    std::size_t m_ = 0;
    std::size_t ell_ = 0;
    RadialProfile profile_;
    OperatorMeasure measure_;
    std::vector<PlaneWaveAtom> waves_;
    std::vector<double> shift_;
};

[[nodiscard]] CMatrix kernel_eval(const OperatorKernel &k, std::span<const double> x, std::span<const double> y);

/// F(t), the kernel value at any pair with |x - y| = t. Throws NotRadial.
[[nodiscard]] CMatrix radial_function_eval(const OperatorKernel &k, double t);

enum class DerivMethod { Analytic, FiniteDifference };

/// d_1^alpha d_2^beta K(x, y). Analytic for gaussian, omega, plane-wave and
/// shifted-gaussian kernels; FiniteDifference uses nested central differences
/// with h = 1e-4 max(1, |x-y|) and refuses points within 10h of 0 or of an
/// askey kink t = 1/w.
[[nodiscard]] CMatrix kernel_deriv_eval(const OperatorKernel &k, const MultiIndex &alpha, const MultiIndex &beta,
                                        std::span<const double> x, std::span<const double> y,
                                        DerivMethod method = DerivMethod::Analytic);

/// Max entrywise gap between d_1^alpha d_2^beta K(x, x) and the closed-form
/// moment expression (-1)^|beta| f^(alpha+beta)(0) sum_j w_j^p G_j.
[[nodiscard]] double deriv_diag_identity_check(const OperatorKernel &k, const MultiIndex &alpha,
                                               const MultiIndex &beta);

struct BlockGram {
    std::vector<Point> points;
    std::size_t ell = 0;
    HermitianMatrix matrix;  // block (mu, nu) = K(x_mu, x_nu)
};

struct DerivBlockGram {
    std::vector<Point> points;
    std::vector<MultiIndex> indices;  // graded-lex, |alpha| <= q
    std::size_t ell = 0;
    HermitianMatrix matrix;  // row ((mu * |A| + a) * ell + i)

    [[nodiscard]] std::string layout() const;
};

/// Throws DuplicatePoints if two points are within 1e-12 of each other.
[[nodiscard]] BlockGram gram(const OperatorKernel &k, const std::vector<Point> &points);

[[nodiscard]] DerivBlockGram deriv_gram(const OperatorKernel &k, const std::vector<Point> &points, int q);

struct GramRow {
    Point x;
    MultiIndex alpha;
};

/// Derivative Gram restricted to the requested (point, alpha) rows:
/// block (r, s) = d_1^{alpha_r} d_2^{alpha_s} K(x_r, x_s). Rows need not be distinct.
[[nodiscard]] HermitianMatrix deriv_gram_rows(const OperatorKernel &k, const std::vector<GramRow> &rows);

/// (x, y) -> <K(x, y) v, v>.
class ScalarProjectionKernel {
public:
    ScalarProjectionKernel(OperatorKernel kernel, CVector v);
    [[nodiscard]] Complex operator()(std::span<const double> x, std::span<const double> y) const;
    [[nodiscard]] const CVector &vector() const noexcept { return v_; }

private:
    OperatorKernel kernel_;
    CVector v_;
};

[[nodiscard]] ScalarProjectionKernel scalar_projection_kernel(const OperatorKernel &k, std::span<const Complex> v);

/// Scalar Gram [K_v(x_mu, x_nu)].
[[nodiscard]] HermitianMatrix projection_gram(const ScalarProjectionKernel &kv, const std::vector<Point> &points);

/// Minimum pairwise distance check shared by the Gram builders.
void require_distinct(const std::vector<Point> &points, double tol = 1e-12);

}  // namespace opk
