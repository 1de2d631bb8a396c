#include "opk/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "opk/error.hpp"

namespace opk {

// ------------------------------------------------------------- MultiIndex

MultiIndex::MultiIndex(std::vector<int> components) : c_(std::move(components)) {
    for (int v : c_)
        if (v < 0) throw Error(ErrorCode::InvalidDescriptor, "multi-index components must be nonnegative");
}

MultiIndex MultiIndex::unit(std::size_t m, std::size_t i) {
    std::vector<int> c(m, 0);
    c.at(i) = 1;
    return MultiIndex(std::move(c));
}

int MultiIndex::order() const noexcept { return std::accumulate(c_.begin(), c_.end(), 0); }

MultiIndex operator+(const MultiIndex &a, const MultiIndex &b) {
    if (a.size() != b.size()) throw Error(ErrorCode::InvalidPoint, "multi-index dimension mismatch");
    std::vector<int> c(a.size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = a[i] + b[i];
    return MultiIndex(std::move(c));
}

bool graded_lex_less(const MultiIndex &a, const MultiIndex &b) {
    if (a.order() != b.order()) return a.order() < b.order();
    return a.components() > b.components();
}

std::vector<MultiIndex> MultiIndex::graded_lex(std::size_t m, int q) {
    std::vector<MultiIndex> out;
    std::vector<int> c(m, 0);
    // odometer over [0, q]^m, keeping |c| <= q
    while (true) {
        if (std::accumulate(c.begin(), c.end(), 0) <= q) out.emplace_back(c);
        std::size_t i = 0;
        while (i < m && ++c[i] > q) c[i++] = 0;
        if (i == m) break;
    }
    std::sort(out.begin(), out.end(), graded_lex_less);
    return out;
}

std::string MultiIndex::label() const {
    std::string s = "(";
    for (std::size_t i = 0; i < c_.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(c_[i]);
    }
    return s + ")";
}

// --------------------------------------------------------------- profiles

RadialProfile RadialProfile::askey(int ell) {
    if (ell < 2) throw Error(ErrorCode::InvalidDescriptor, "askey smoothness ell must be >= 2");
    return {ProfileKind::Askey, ell, 1};
}

RadialProfile RadialProfile::omega(int m) {
    if (m < 1) throw Error(ErrorCode::InvalidDescriptor, "omega family dimension must be >= 1");
    return {ProfileKind::Omega, 2, m};
}

std::string RadialProfile::name() const {
    switch (kind) {
        case ProfileKind::Gaussian: return "gaussian";
        case ProfileKind::Askey: return "askey";
        case ProfileKind::Omega: return "omega";
    }
    return "unknown";
}

double profile_value(const RadialProfile &p, double omega, double t) {
    switch (p.kind) {
        case ProfileKind::Gaussian: return std::exp(-omega * t * t);
        case ProfileKind::Askey: return std::pow(std::max(0.0, 1.0 - omega * t), p.askey_ell - 1);
        case ProfileKind::Omega: return omega_eval(p.omega_m, omega * t);
    }
    return 0.0;
}

namespace {

using Quad = boost::multiprecision::cpp_bin_float_quad;

constexpr double kSeriesLimit = 40.0;
constexpr int kMaxSeriesTerms = 500;

// Partial sums alternate in sign and peak near k ~ t/2 at about cosh(t); quad
// precision keeps the cancellation error below 1e-17 up to t = 40.
double omega_series(int m, double t) {
    const Quad half_m = Quad(m) / 2;
    const Quad x = -Quad(t) * Quad(t) / 4;
    Quad term = 1;
    Quad sum = 1;
    for (int k = 0; k < kMaxSeriesTerms; ++k) {
        const Quad ratio = x / ((k + 1) * (k + half_m));
        term *= ratio;
        sum += term;
        if (abs(ratio) < 1 && abs(term) < Quad(1e-17) * std::max(Quad(1), abs(sum))) break;
    }
    return static_cast<double>(sum);
}

}  // namespace

double omega_eval(int m, double t) {
    if (m < 1) throw Error(ErrorCode::InvalidDescriptor, "omega_eval requires m >= 1");
    t = std::abs(t);
    if (t == 0.0) return 1.0;
    if (t <= kSeriesLimit) return omega_series(m, t);
    // Gamma(nu+1) (2/t)^nu J_nu(t), nu = m/2 - 1
    const double nu = 0.5 * m - 1.0;
    return std::exp(std::lgamma(nu + 1.0) + nu * std::log(2.0 / t)) * boost::math::cyl_bessel_j(nu, t);
}

std::vector<double> sjet_derivatives(const RadialProfile &p, double omega, double s, int kmax) {
    if (kmax < 0) throw Error(ErrorCode::UnsupportedJet, "kmax must be >= 0");
    std::vector<double> out(static_cast<std::size_t>(kmax) + 1);
    switch (p.kind) {
        case ProfileKind::Gaussian: {
            const double e = std::exp(-omega * s);
            double factor = 1.0;
            for (int k = 0; k <= kmax; ++k) {
                out[k] = factor * e;
                factor *= -omega;
            }
            return out;
        }
        case ProfileKind::Omega: {
            // h(s) = Omega_m(sqrt s) has h^(j)(s) = (-1/4)^j Gamma(m/2)/Gamma(m/2+j) Omega_{m+2j}(sqrt s),
            // and g(s) = h(w^2 s).
            const double r = omega * std::sqrt(std::max(0.0, s));
            double factor = 1.0;
            for (int k = 0; k <= kmax; ++k) {
                out[k] = factor * omega_eval(p.omega_m + 2 * k, r);
                factor *= -omega * omega / (4.0 * (k + 0.5 * p.omega_m));
            }
            return out;
        }
        case ProfileKind::Askey:
            throw Error(ErrorCode::UnsupportedJet, "askey profiles are not smooth in the squared distance");
    }
    return out;
}

Complex plane_wave_deriv(const PlaneWaveParam &xi, const MultiIndex &alpha, const MultiIndex &beta,
                         std::span<const double> x, std::span<const double> y) {
    const std::size_t m = xi.xi.size();
    if (x.size() != m || y.size() != m || alpha.size() != m || beta.size() != m) {
        throw Error(ErrorCode::InvalidPoint, "plane-wave dimension mismatch");
    }
    double phase = 0.0;
    double mono = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
        phase += (x[i] - y[i]) * xi.xi[i];
        mono *= std::pow(xi.xi[i], alpha[i] + beta[i]);
    }
    // (-i)^a i^b = i^(b - a)
    static constexpr Complex kPowI[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const int e = ((beta.order() - alpha.order()) % 4 + 4) % 4;
    return kPowI[e] * mono * std::polar(1.0, -phase);
}

// ------------------------------------------------------------- Polynomial

Polynomial Polynomial::constant(std::size_t m, double c) {
    Polynomial p(m);
    p.add_term(std::vector<int>(m, 0), c);
    return p;
}

void Polynomial::add_term(const std::vector<int> &exponents, double coeff) {
    if (coeff == 0.0) return;
    auto [it, inserted] = terms_.emplace(exponents, coeff);
    if (!inserted) {
        it->second += coeff;
        if (it->second == 0.0) terms_.erase(it);
    }
}

Polynomial &Polynomial::operator+=(const Polynomial &rhs) {
    for (const auto &[e, c] : rhs.terms_) add_term(e, c);
    return *this;
}

Polynomial Polynomial::differentiate(std::size_t i) const {
    Polynomial out(m_);
    for (const auto &[e, c] : terms_) {
        if (e[i] == 0) continue;
        std::vector<int> ne = e;
        --ne[i];
        out.add_term(ne, c * e[i]);
    }
    return out;
}

Polynomial Polynomial::times_coordinate(std::size_t i, double c) const {
    Polynomial out(m_);
    for (const auto &[e, coeff] : terms_) {
        std::vector<int> ne = e;
        ++ne[i];
        out.add_term(ne, coeff * c);
    }
    return out;
}

double Polynomial::evaluate(std::span<const double> d) const {
    double acc = 0.0;
    for (const auto &[e, c] : terms_) {
        double mono = c;
        for (std::size_t i = 0; i < m_; ++i)
            for (int p = 0; p < e[i]; ++p) mono *= d[i];
        acc += mono;
    }
    return acc;
}

// -------------------------------------------------------------- RadialJet

RadialJet RadialJet::identity(std::size_t m) { return from_terms(m, {{Polynomial::constant(m, 1.0), 0}}); }

RadialJet RadialJet::from_terms(std::size_t m, std::vector<JetTerm> terms) {
    std::map<int, Polynomial> by_k;
    for (auto &t : terms) {
        auto [it, inserted] = by_k.try_emplace(t.k, Polynomial(m));
        it->second += t.poly;
    }
    RadialJet jet;
    jet.m_ = m;
    for (auto &[k, poly] : by_k)
        if (!poly.is_zero()) jet.terms_.push_back({std::move(poly), k});
    return jet;
}

int RadialJet::max_k() const noexcept { return terms_.empty() ? 0 : terms_.back().k; }

double RadialJet::evaluate(std::span<const double> d, std::span<const double> g_derivs) const {
    double acc = 0.0;
    for (const JetTerm &t : terms_) acc += t.poly.evaluate(d) * g_derivs[static_cast<std::size_t>(t.k)];
    return acc;
}

RadialJet jet_differentiate(const RadialJet &jet, std::size_t i) {
    if (i >= jet.dim()) throw Error(ErrorCode::InvalidPoint, "jet coordinate out of range");
    std::vector<JetTerm> out;
    out.reserve(2 * jet.terms().size());
    for (const JetTerm &t : jet.terms()) {
        out.push_back({t.poly.differentiate(i), t.k});
        out.push_back({t.poly.times_coordinate(i, 2.0), t.k + 1});
    }
    return RadialJet::from_terms(jet.dim(), std::move(out));
}

RadialJet radial_jet(const MultiIndex &gamma) {
    RadialJet jet = RadialJet::identity(gamma.size());
    for (std::size_t i = 0; i < gamma.size(); ++i)
        for (int p = 0; p < gamma[i]; ++p) jet = jet_differentiate(jet, i);
    return jet;
}

// ------------------------------------------------------ monotonicity tools

std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = a;
        return out;
    }
    for (std::size_t i = 0; i < n; ++i) out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    return out;
}

namespace {

void validate_grid(std::span<const double> grid, double h, int room) {
    if (grid.empty()) throw Error(ErrorCode::InvalidGrid, "empty grid");
    if (!(h > 0.0)) throw Error(ErrorCode::InvalidGrid, "step h must be positive");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!std::isfinite(grid[i]) || grid[i] <= 0.0) throw Error(ErrorCode::InvalidGrid, "grid must lie in (0, inf)");
        if (i > 0 && grid[i] <= grid[i - 1]) throw Error(ErrorCode::InvalidGrid, "grid must be increasing");
    }
    if (grid.front() <= room * h) throw Error(ErrorCode::InvalidGrid, "grid minimum must exceed nmax*h");
}

// d[n] = Delta_h^n g(t) for n = 0..nmax
std::vector<double> forward_differences(const ScalarFunction &g, double t, int nmax, double h) {
    std::vector<double> vals(static_cast<std::size_t>(nmax) + 1);
    for (int i = 0; i <= nmax; ++i) vals[i] = g(t + i * h);
    std::vector<double> out(vals.size());
    out[0] = vals[0];
    for (int n = 1; n <= nmax; ++n) {
        for (int i = 0; i + n <= nmax; ++i) vals[i] = vals[i + 1] - vals[i];
        out[n] = vals[0];
    }
    return out;
}

}  // namespace

MonotoneReport completely_monotone_check(const ScalarFunction &g, std::span<const double> grid, int nmax, double h) {
    if (nmax < 0) throw Error(ErrorCode::InvalidGrid, "nmax must be >= 0");
    validate_grid(grid, h, nmax);
    const double tol = 1e-9 * std::abs(g(grid.front()));

    std::vector<std::vector<double>> diffs;
    diffs.reserve(grid.size());
    for (double t : grid) diffs.push_back(forward_differences(g, t, nmax, h));

    MonotoneReport report;
    for (int n = 0; n <= nmax; ++n) {
        const double sign = (n % 2 == 0) ? 1.0 : -1.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double v = sign * diffs[i][n];
            if (!(v >= -tol)) {
                report.passed = false;
                report.violation_order = n;
                report.violation_t = grid[i];
                report.violation_value = v;
                return report;
            }
        }
    }
    return report;
}

ScalarFunction williamson_construct(const std::vector<std::pair<double, double>> &atoms, int ell) {
    if (ell < 2) throw Error(ErrorCode::InvalidMeasure, "williamson order ell must be >= 2");
    for (const auto &[r, lambda] : atoms) {
        if (!(r >= 0.0) || !(lambda >= 0.0) || !std::isfinite(r) || !std::isfinite(lambda)) {
            throw Error(ErrorCode::InvalidMeasure, "williamson atoms need r >= 0 and lambda >= 0");
        }
    }
    return [atoms, ell](double t) {
        double acc = 0.0;
        for (const auto &[r, lambda] : atoms) acc += lambda * std::pow(std::max(0.0, 1.0 - r * t), ell - 1);
        return acc;
    };
}

EllCmReport ell_cm_check(const ScalarFunction &f, int ell, std::span<const double> grid, double h) {
    if (ell < 2) throw Error(ErrorCode::InvalidGrid, "ell must be >= 2");
    validate_grid(grid, h, ell);
    const double tol = 1e-8 * std::abs(f(grid.front()));
    EllCmReport report;
    auto fail = [&](const char *what, double t) {
        if (report.passed) {
            report.passed = false;
            report.failed_condition = what;
            report.violation_t = t;
        }
    };

    std::vector<double> values(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        values[i] = f(grid[i]);
        if (!std::isfinite(values[i]) || !(values[i] >= -tol)) {
            report.nonnegative = false;
            fail("nonnegative", grid[i]);
            break;
        }
    }

    // Tail proxy: the spread over the last quarter of the grid must not exceed
    // the spread over the first quarter.
    const std::size_t quarter = std::max<std::size_t>(1, grid.size() / 4);
    auto spread = [&](std::size_t begin, std::size_t end) {
        const auto [lo, hi] = std::minmax_element(values.begin() + begin, values.begin() + end);
        return *hi - *lo;
    };
    if (report.nonnegative && spread(grid.size() - quarter, grid.size()) > spread(0, quarter) + tol) {
        report.tail_bounded = false;
        fail("tail_bounded", grid.back());
    }

    const int base = ell - 2;
    const double sign = (base % 2 == 0) ? 1.0 : -1.0;
    for (double t : grid) {
        const std::vector<double> d = forward_differences(f, t, base + 2, h);
        // second difference of sign * Delta^base f is sign * Delta^(base+2) f
        if (!(sign * d[base + 2] >= -tol)) {
            report.convex = false;
            fail("convex", t);
            break;
        }
    }
    return report;
}

}  // namespace opk
