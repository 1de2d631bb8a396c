#pragma once

// Scalar base families p_w, their derivative jets in the squared distance,
// and the monotonicity checks behind the Schoenberg and Williamson classes.

#include <complex>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace opk {

using Complex = std::complex<double>;

/// Nonnegative multi-index alpha in Z_+^m.
class MultiIndex {
public:
    MultiIndex() = default;
    explicit MultiIndex(std::vector<int> components);
    [[nodiscard]] static MultiIndex zero(std::size_t m) { return MultiIndex(std::vector<int>(m, 0)); }
    [[nodiscard]] static MultiIndex unit(std::size_t m, std::size_t i);

    [[nodiscard]] std::size_t size() const noexcept { return c_.size(); }
    [[nodiscard]] int order() const noexcept;
    int operator[](std::size_t i) const noexcept { return c_[i]; }
    [[nodiscard]] const std::vector<int> &components() const noexcept { return c_; }

    friend MultiIndex operator+(const MultiIndex &a, const MultiIndex &b);
    auto operator<=>(const MultiIndex &) const = default;

    /// All alpha with |alpha| <= q in graded-lex order: by order, then with the
    /// first coordinate varying slowest and largest first, e.g. (0,0) (1,0) (0,1).
    [[nodiscard]] static std::vector<MultiIndex> graded_lex(std::size_t m, int q);

    [[nodiscard]] std::string label() const;

private:
    std::vector<int> c_;
};

/// Graded-lex comparison (order first, then larger leading components first).
[[nodiscard]] bool graded_lex_less(const MultiIndex &a, const MultiIndex &b);

enum class ProfileKind { Gaussian, Askey, Omega };

/// Parameter conventions: gaussian atoms scale the squared distance,
/// p_w = exp(-w |x-y|^2); askey and omega atoms scale the distance,
/// p_w = g(w |x-y|).
struct RadialProfile {
    ProfileKind kind = ProfileKind::Gaussian;
    int askey_ell = 2;  // (1 - w t)_+^(ell-1), ell >= 2
    int omega_m = 1;    // Omega_m(w t), m >= 1

    [[nodiscard]] static RadialProfile gaussian() { return {ProfileKind::Gaussian, 2, 1}; }
    [[nodiscard]] static RadialProfile askey(int ell);
    [[nodiscard]] static RadialProfile omega(int m);

    [[nodiscard]] bool has_jets() const noexcept { return kind != ProfileKind::Askey; }
    [[nodiscard]] std::string name() const;
    bool operator==(const RadialProfile &) const = default;
};

[[nodiscard]] double profile_value(const RadialProfile &p, double omega, double t);

/// Omega_m(t), the average of exp(-i x.xi) over the unit sphere S^{m-1} at |x| = t.
/// Power series summed in quad precision for t <= 40, Bessel closed form beyond.
[[nodiscard]] double omega_eval(int m, double t);

/// g^(k)(s) for k = 0..kmax where p_w(d) = g(|d|^2). Throws UnsupportedJet for askey.
[[nodiscard]] std::vector<double> sjet_derivatives(const RadialProfile &p, double omega, double s, int kmax);

struct PlaneWaveParam {
    std::vector<double> xi;
};

/// d^alpha_x d^beta_y exp(-i (x-y).xi) = (-i)^|alpha| i^|beta| xi^(alpha+beta) exp(-i (x-y).xi)
[[nodiscard]] Complex plane_wave_deriv(const PlaneWaveParam &xi, const MultiIndex &alpha, const MultiIndex &beta,
                                       std::span<const double> x, std::span<const double> y);

/// Real polynomial in d in R^m, sparse map from exponent vector to coefficient.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::size_t m) : m_(m) {}
    [[nodiscard]] static Polynomial constant(std::size_t m, double c);

    [[nodiscard]] std::size_t dim() const noexcept { return m_; }
    [[nodiscard]] bool is_zero() const noexcept { return terms_.empty(); }
    [[nodiscard]] const std::map<std::vector<int>, double> &terms() const noexcept { return terms_; }

    void add_term(const std::vector<int> &exponents, double coeff);
    Polynomial &operator+=(const Polynomial &rhs);

    [[nodiscard]] Polynomial differentiate(std::size_t i) const;
    /// c * d_i * this
    [[nodiscard]] Polynomial times_coordinate(std::size_t i, double c) const;
    [[nodiscard]] double evaluate(std::span<const double> d) const;

    bool operator==(const Polynomial &) const = default;

private:
    std::size_t m_ = 0;
    std::map<std::vector<int>, double> terms_;
};

struct JetTerm {
    Polynomial poly;
    int k = 0;  // derivative order of g
    bool operator==(const JetTerm &) const = default;
};

/// d^alpha f(d) = sum_terms poly(d) * g^(k)(|d|^2) for f(d) = g(|d|^2).
class RadialJet {
public:
    RadialJet() = default;
    /// Order-0 jet: a single (1, k=0) term.
    [[nodiscard]] static RadialJet identity(std::size_t m);

    [[nodiscard]] std::size_t dim() const noexcept { return m_; }
    [[nodiscard]] const std::vector<JetTerm> &terms() const noexcept { return terms_; }
    [[nodiscard]] int max_k() const noexcept;
    [[nodiscard]] bool is_zero() const noexcept { return terms_.empty(); }

    /// g_derivs[k] = g^(k)(|d|^2), must cover max_k().
    [[nodiscard]] double evaluate(std::span<const double> d, std::span<const double> g_derivs) const;

    friend RadialJet jet_differentiate(const RadialJet &jet, std::size_t i);
    static RadialJet from_terms(std::size_t m, std::vector<JetTerm> terms);

private:
    std::size_t m_ = 0;
    std::vector<JetTerm> terms_;  // sorted by k, no zero polynomials
};

/// Chain rule in coordinate i (0-based): d_i[q g^(k)] = (d_i q) g^(k) + 2 d_i q g^(k+1).
[[nodiscard]] RadialJet jet_differentiate(const RadialJet &jet, std::size_t i);

/// Jet of d^gamma f built by repeated differentiation.
[[nodiscard]] RadialJet radial_jet(const MultiIndex &gamma);

using ScalarFunction = std::function<double(double)>;

struct MonotoneReport {
    bool passed = true;
    int violation_order = -1;  // n of the first violation
    double violation_t = 0.0;
    double violation_value = 0.0;
};

/// (-1)^n Delta_h^n g(t) >= -1e-9 |g(t_min)| for n <= nmax and every grid t.
/// Requires an increasing positive grid with t_min > nmax*h.
[[nodiscard]] MonotoneReport completely_monotone_check(const ScalarFunction &g, std::span<const double> grid, int nmax,
                                                       double h = 1e-2);

/// f(t) = sum_j lambda_j (1 - r_j t)_+^(ell-1).
[[nodiscard]] ScalarFunction williamson_construct(const std::vector<std::pair<double, double>> &atoms, int ell);

struct EllCmReport {
    bool passed = true;
    bool nonnegative = true;
    bool tail_bounded = true;  // heuristic proxy for the existence of lim f(t)
    bool convex = true;        // of (-1)^(ell-2) Delta_h^(ell-2) f
    double violation_t = 0.0;
    std::string failed_condition;
};

[[nodiscard]] EllCmReport ell_cm_check(const ScalarFunction &f, int ell, std::span<const double> grid, double h = 1e-2);

/// n equally spaced points on [a, b].
[[nodiscard]] std::vector<double> linspace(double a, double b, std::size_t n);

}  // namespace opk
