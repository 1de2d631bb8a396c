#include "opk/kernel.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include "opk/error.hpp"
#include "opk/simd.hpp"

namespace opk {

namespace {

void require_dims(const OperatorKernel &k, std::span<const double> x, std::span<const double> y) {
    if (x.size() != k.ambient_dim() || y.size() != k.ambient_dim()) {
        throw Error(ErrorCode::InvalidPoint, "point dimension " + std::to_string(x.size()) + "/" +
                                                 std::to_string(y.size()) + " does not match kernel dimension " +
                                                 std::to_string(k.ambient_dim()));
    }
    for (std::size_t i = 0; i < x.size(); ++i)
        if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw Error(ErrorCode::InvalidPoint, "non-finite coordinate");
}

double squared_norm_diff(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        s += d * d;
    }
    return s;
}

double radial_scalar(const RadialProfile &p, double omega, double s) {
    if (p.kind == ProfileKind::Gaussian) return std::exp(-omega * s);
    return profile_value(p, omega, std::sqrt(s));
}

CMatrix radial_value_from_s(const OperatorKernel &k, double s) {
    CMatrix out(k.matrix_dim(), k.matrix_dim());
    for (const auto &atom : k.measure().atoms()) {
        const double w = radial_scalar(k.profile(), atom.omega, s);
        if (w != 0.0) out.add_scaled(atom.weight.matrix(), w);
    }
    return out;
}

// Jets depend only on the multi-index; cached for the lifetime of the process.
const RadialJet &cached_jet(const MultiIndex &gamma) {
    static std::mutex mutex;
    static std::map<MultiIndex, RadialJet> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(gamma);
    if (it == cache.end()) it = cache.emplace(gamma, radial_jet(gamma)).first;
    return it->second;
}

double gaussian_shift_entry(std::span<const double> d, const std::vector<double> &shift, double sign) {
    double s = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double v = d[i] + sign * shift[i];
        s += v * v;
    }
    return std::exp(-s);
}

CMatrix shifted_gaussian_value(const OperatorKernel &k, std::span<const double> x, std::span<const double> y) {
    std::vector<double> d(x.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = x[i] - y[i];
    CMatrix out(2, 2);
    const double diag = gaussian_shift_entry(d, k.shift(), 0.0);
    out(0, 0) = diag;
    out(1, 1) = diag;
    out(0, 1) = gaussian_shift_entry(d, k.shift(), 2.0);
    out(1, 0) = gaussian_shift_entry(d, k.shift(), -2.0);
    return out;
}

CMatrix plane_wave_value(const OperatorKernel &k, std::span<const double> x, std::span<const double> y) {
    CMatrix out(k.matrix_dim(), k.matrix_dim());
    for (const auto &atom : k.plane_wave_atoms()) {
        double phase = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) phase += (x[i] - y[i]) * atom.xi[i];
        out.add_scaled(atom.weight.matrix(), std::polar(1.0, -phase));
    }
    return out;
}

CMatrix analytic_deriv(const OperatorKernel &k, const MultiIndex &alpha, const MultiIndex &beta,
                       std::span<const double> x, std::span<const double> y) {
    const double sign = (beta.order() % 2 == 0) ? 1.0 : -1.0;
    const std::size_t ell = k.matrix_dim();
    CMatrix out(ell, ell);
    switch (k.family()) {
        case KernelFamily::Radial: {
            const MultiIndex gamma = alpha + beta;
            const RadialJet &jet = cached_jet(gamma);
            std::vector<double> d(x.size());
            for (std::size_t i = 0; i < d.size(); ++i) d[i] = x[i] - y[i];
            const double s = squared_norm_diff(x, y);
            for (const auto &atom : k.measure().atoms()) {
                const std::vector<double> g = sjet_derivatives(k.profile(), atom.omega, s, jet.max_k());
                const double v = jet.evaluate(d, g);
                if (v != 0.0) out.add_scaled(atom.weight.matrix(), sign * v);
            }
            return out;
        }
        case KernelFamily::PlaneWave: {
            for (const auto &atom : k.plane_wave_atoms()) {
                out.add_scaled(atom.weight.matrix(), plane_wave_deriv(PlaneWaveParam{atom.xi}, alpha, beta, x, y));
            }
            return out;
        }
        case KernelFamily::ShiftedGaussian: {
            const MultiIndex gamma = alpha + beta;
            const RadialJet &jet = cached_jet(gamma);
            const RadialProfile unit = RadialProfile::gaussian();
            auto entry = [&](double shift_sign) {
                std::vector<double> d(x.size());
                double s = 0.0;
                for (std::size_t i = 0; i < d.size(); ++i) {
                    d[i] = x[i] - y[i] + shift_sign * k.shift()[i];
                    s += d[i] * d[i];
                }
                return sign * jet.evaluate(d, sjet_derivatives(unit, 1.0, s, jet.max_k()));
            };
            out(0, 0) = entry(0.0);
            out(1, 1) = out(0, 0);
            out(0, 1) = entry(2.0);
            out(1, 0) = entry(-2.0);
            return out;
        }
    }
    return out;
}

CMatrix finite_difference_deriv(const OperatorKernel &k, const MultiIndex &alpha, const MultiIndex &beta,
                                std::span<const double> x, std::span<const double> y) {
    const std::size_t m = x.size();
    const double t = std::sqrt(squared_norm_diff(x, y));
    const double h = 1e-4 * std::max(1.0, t);
    const int order = alpha.order() + beta.order();

    if (k.is_radial() && k.profile().kind == ProfileKind::Askey) {
        if (order > 0 && t < 10.0 * h) {
            throw Error(ErrorCode::UnsupportedJet, "finite differences refused within 10h of x = y for askey");
        }
        for (const auto &atom : k.measure().atoms()) {
            if (atom.omega > 0.0 && std::abs(t - 1.0 / atom.omega) < 10.0 * h) {
                throw Error(ErrorCode::UnsupportedJet, "finite differences refused within 10h of the askey kink");
            }
        }
    }

    // coordinate directions over z = (x, y) in R^{2m}
    std::vector<std::size_t> dirs;
    for (std::size_t i = 0; i < m; ++i)
        for (int p = 0; p < alpha[i]; ++p) dirs.push_back(i);
    for (std::size_t i = 0; i < m; ++i)
        for (int p = 0; p < beta[i]; ++p) dirs.push_back(m + i);

    CMatrix out(k.matrix_dim(), k.matrix_dim());
    const std::size_t combos = std::size_t{1} << dirs.size();
    std::vector<double> z(2 * m);
    for (std::size_t mask = 0; mask < combos; ++mask) {
        std::copy(x.begin(), x.end(), z.begin());
        std::copy(y.begin(), y.end(), z.begin() + static_cast<std::ptrdiff_t>(m));
        double weight = 1.0;
        for (std::size_t b = 0; b < dirs.size(); ++b) {
            const bool plus = (mask >> b) & 1U;
            z[dirs[b]] += plus ? h : -h;
            weight *= plus ? 1.0 : -1.0;
        }
        out.add_scaled(kernel_eval(k, std::span(z).first(m), std::span(z).subspan(m)), weight);
    }
    out *= 1.0 / std::pow(2.0 * h, static_cast<double>(dirs.size()));
    return out;
}

}  // namespace

// --------------------------------------------------------- OperatorKernel

OperatorKernel OperatorKernel::radial(RadialProfile profile, OperatorMeasure measure, std::size_t m) {
    if (m == 0) throw Error(ErrorCode::InvalidDescriptor, "ambient dimension must be positive");
    OperatorKernel k;
    k.family_ = KernelFamily::Radial;
    k.m_ = m;
    k.ell_ = measure.dim();
    k.profile_ = profile;
    k.measure_ = std::move(measure);
    return k;
}

OperatorKernel OperatorKernel::plane_wave(std::vector<PlaneWaveAtom> atoms, std::size_t m, std::size_t ell) {
    if (m == 0 || ell == 0) throw Error(ErrorCode::InvalidDescriptor, "plane-wave kernel dimensions must be positive");
    for (const auto &atom : atoms) {
        if (atom.xi.size() != m) throw Error(ErrorCode::InvalidMeasure, "plane-wave frequency has wrong dimension");
        if (atom.weight.dim() != ell) throw Error(ErrorCode::InvalidMeasure, "plane-wave weight has wrong dimension");
        for (double v : atom.xi)
            if (!std::isfinite(v)) throw Error(ErrorCode::InvalidMeasure, "non-finite plane-wave frequency");
        if (!is_psd(atom.weight).psd) throw Error(ErrorCode::InvalidMeasure, "plane-wave weight is not PSD");
    }
    OperatorKernel k;
    k.family_ = KernelFamily::PlaneWave;
    k.m_ = m;
    k.ell_ = ell;
    k.waves_ = std::move(atoms);
    return k;
}

OperatorKernel OperatorKernel::shifted_gaussian(std::vector<double> w) {
    if (w.empty()) throw Error(ErrorCode::InvalidDescriptor, "shift must have positive dimension");
    double n2 = 0.0;
    for (double v : w) n2 += v * v;
    if (!(n2 > 0.0)) throw Error(ErrorCode::InvalidDescriptor, "shift w must be nonzero");
    OperatorKernel k;
    k.family_ = KernelFamily::ShiftedGaussian;
    k.m_ = w.size();
    k.ell_ = 2;
    k.shift_ = std::move(w);
    return k;
}

bool OperatorKernel::has_analytic_jets() const noexcept {
    return family_ != KernelFamily::Radial || profile_.has_jets();
}

std::string OperatorKernel::describe() const {
    std::ostringstream os;
    switch (family_) {
        case KernelFamily::Radial:
            os << profile_.name();
            if (profile_.kind == ProfileKind::Askey) os << "(ell=" << profile_.askey_ell << ")";
            if (profile_.kind == ProfileKind::Omega) os << "(m=" << profile_.omega_m << ")";
            os << " mixture, " << measure_.atoms().size() << " atoms";
            break;
        case KernelFamily::PlaneWave: os << "plane-wave mixture, " << waves_.size() << " atoms"; break;
        case KernelFamily::ShiftedGaussian: os << "shifted gaussian pair"; break;
    }
    os << ", m=" << m_ << ", l=" << ell_;
    return os.str();
}

// ------------------------------------------------------------- evaluation

CMatrix kernel_eval(const OperatorKernel &k, std::span<const double> x, std::span<const double> y) {
    require_dims(k, x, y);
    switch (k.family()) {
        case KernelFamily::Radial: return radial_value_from_s(k, squared_norm_diff(x, y));
        case KernelFamily::PlaneWave: return plane_wave_value(k, x, y);
        case KernelFamily::ShiftedGaussian: return shifted_gaussian_value(k, x, y);
    }
    return {};
}

CMatrix radial_function_eval(const OperatorKernel &k, double t) {
    if (!k.is_radial()) throw Error(ErrorCode::NotRadial, "radial function requested for a non-radial kernel");
    if (!(t >= 0.0) || !std::isfinite(t)) throw Error(ErrorCode::InvalidPoint, "t must be finite and >= 0");
    return radial_value_from_s(k, t * t);
}

CMatrix kernel_deriv_eval(const OperatorKernel &k, const MultiIndex &alpha, const MultiIndex &beta,
                          std::span<const double> x, std::span<const double> y, DerivMethod method) {
    require_dims(k, x, y);
    if (alpha.size() != k.ambient_dim() || beta.size() != k.ambient_dim()) {
        throw Error(ErrorCode::InvalidPoint, "multi-index dimension does not match kernel");
    }
    if (alpha.order() + beta.order() > kMaxDerivOrder) {
        throw Error(ErrorCode::UnsupportedJet, "derivative order above cap " + std::to_string(kMaxDerivOrder));
    }
    if (alpha.order() + beta.order() == 0) return kernel_eval(k, x, y);
    if (method == DerivMethod::FiniteDifference) return finite_difference_deriv(k, alpha, beta, x, y);
    if (!k.has_analytic_jets()) {
        throw Error(ErrorCode::UnsupportedJet, "no analytic derivatives for " + k.profile().name() + " profiles");
    }
    return analytic_deriv(k, alpha, beta, x, y);
}

double deriv_diag_identity_check(const OperatorKernel &k, const MultiIndex &alpha, const MultiIndex &beta) {
    if (!k.is_radial() || !k.has_analytic_jets()) {
        throw Error(ErrorCode::UnsupportedJet, "moment identity needs a radial family with jets");
    }
    const Point origin(k.ambient_dim(), 0.0);
    const CMatrix lhs = kernel_deriv_eval(k, alpha, beta, origin, origin);

    // Closed form: d^gamma g(|d|^2) at 0 is g^(k)(0) prod gamma_i!/(gamma_i/2)! when every
    // gamma_i is even (k = |gamma|/2), and 0 otherwise.
    const MultiIndex gamma = alpha + beta;
    CMatrix rhs(k.matrix_dim(), k.matrix_dim());
    bool all_even = true;
    double multinomial = 1.0;
    for (std::size_t i = 0; i < gamma.size(); ++i) {
        if (gamma[i] % 2 != 0) all_even = false;
        multinomial *= std::tgamma(gamma[i] + 1.0) / std::tgamma(gamma[i] / 2 + 1.0);
    }
    if (all_even) {
        const int half = gamma.order() / 2;
        double base = 0.0;
        double moment_power = 0.0;
        if (k.profile().kind == ProfileKind::Gaussian) {
            base = (half % 2 == 0) ? 1.0 : -1.0;
            moment_power = half;
        } else {
            const double hm = 0.5 * k.profile().omega_m;
            base = std::pow(-0.25, half) * std::exp(std::lgamma(hm) - std::lgamma(hm + half));
            moment_power = 2.0 * half;
        }
        const double sign = (beta.order() % 2 == 0) ? 1.0 : -1.0;
        for (const auto &atom : k.measure().atoms()) {
            rhs.add_scaled(atom.weight.matrix(), sign * base * multinomial * std::pow(atom.omega, moment_power));
        }
    }
    return (lhs - rhs).max_abs();
}

// ------------------------------------------------------------------- Grams

void require_distinct(const std::vector<Point> &points, double tol) {
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j)
            if (std::sqrt(squared_norm_diff(points[i], points[j])) <= tol) {
                throw Error(ErrorCode::DuplicatePoints,
                            "points " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
            }
}

BlockGram gram(const OperatorKernel &k, const std::vector<Point> &points) {
    const std::size_t n = points.size();
    const std::size_t ell = k.matrix_dim();
    const std::size_t m = k.ambient_dim();
    for (const auto &p : points)
        if (p.size() != m) throw Error(ErrorCode::InvalidPoint, "point dimension does not match kernel");
    require_distinct(points);

    CMatrix big(n * ell, n * ell);
    std::vector<double> sq;
    if (k.is_radial()) {
        std::vector<double> flat(n * m);
        for (std::size_t i = 0; i < n; ++i) std::copy(points[i].begin(), points[i].end(), flat.begin() + i * m);
        sq.resize(n * n);
        simd::squared_distances(flat.data(), n, m, sq.data());
    }
    for (std::size_t mu = 0; mu < n; ++mu) {
        for (std::size_t nu = mu; nu < n; ++nu) {
            const CMatrix block =
                k.is_radial() ? radial_value_from_s(k, sq[mu * n + nu]) : kernel_eval(k, points[mu], points[nu]);
            for (std::size_t i = 0; i < ell; ++i)
                for (std::size_t j = 0; j < ell; ++j) {
                    big(mu * ell + i, nu * ell + j) = block(i, j);
                    big(nu * ell + j, mu * ell + i) = std::conj(block(i, j));
                }
        }
    }
    return {points, ell, HermitianMatrix(big)};
}

std::string DerivBlockGram::layout() const {
    std::ostringstream os;
    os << "points=" << points.size() << ";indices=";
    for (std::size_t a = 0; a < indices.size(); ++a) os << (a ? "|" : "") << indices[a].label();
    os << ";ell=" << ell << ";row=(point*" << indices.size() << "+index)*" << ell << "+component";
    return os.str();
}

HermitianMatrix deriv_gram_rows(const OperatorKernel &k, const std::vector<GramRow> &rows) {
    const std::size_t ell = k.matrix_dim();
    const std::size_t n = rows.size();
    CMatrix big(n * ell, n * ell);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t s = r; s < n; ++s) {
            const CMatrix block = kernel_deriv_eval(k, rows[r].alpha, rows[s].alpha, rows[r].x, rows[s].x);
            for (std::size_t i = 0; i < ell; ++i)
                for (std::size_t j = 0; j < ell; ++j) {
                    big(r * ell + i, s * ell + j) = block(i, j);
                    big(s * ell + j, r * ell + i) = std::conj(block(i, j));
                }
        }
    }
    return HermitianMatrix(big);
}

DerivBlockGram deriv_gram(const OperatorKernel &k, const std::vector<Point> &points, int q) {
    if (q < 0) throw Error(ErrorCode::UnsupportedJet, "q must be >= 0");
    if (2 * q > kMaxDerivOrder) throw Error(ErrorCode::UnsupportedJet, "2q exceeds the derivative cap");
    if (q > 0 && !k.has_analytic_jets()) {
        throw Error(ErrorCode::UnsupportedJet, "derivative Gram needs analytic jets up to order 2q");
    }
    for (const auto &p : points)
        if (p.size() != k.ambient_dim()) throw Error(ErrorCode::InvalidPoint, "point dimension does not match kernel");
    require_distinct(points);

    DerivBlockGram out;
    out.points = points;
    out.indices = MultiIndex::graded_lex(k.ambient_dim(), q);
    out.ell = k.matrix_dim();
    std::vector<GramRow> rows;
    rows.reserve(points.size() * out.indices.size());
    for (const auto &p : points)
        for (const auto &a : out.indices) rows.push_back({p, a});
    out.matrix = deriv_gram_rows(k, rows);
    return out;
}

// ------------------------------------------------------- scalar projection

ScalarProjectionKernel::ScalarProjectionKernel(OperatorKernel kernel, CVector v)
    : kernel_(std::move(kernel)), v_(std::move(v)) {
    if (v_.size() != kernel_.matrix_dim()) throw Error(ErrorCode::InvalidVector, "projection vector has wrong length");
    if (norm(v_) == 0.0) throw Error(ErrorCode::InvalidVector, "projection vector must be nonzero");
}

Complex ScalarProjectionKernel::operator()(std::span<const double> x, std::span<const double> y) const {
    const CMatrix kxy = kernel_eval(kernel_, x, y);
    const CVector kv = matvec(kxy, v_);
    return inner(kv, v_);
}

ScalarProjectionKernel scalar_projection_kernel(const OperatorKernel &k, std::span<const Complex> v) {
    return {k, CVector(v.begin(), v.end())};
}

HermitianMatrix projection_gram(const ScalarProjectionKernel &kv, const std::vector<Point> &points) {
    require_distinct(points);
    const std::size_t n = points.size();
    CMatrix g(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            g(i, j) = kv(points[i], points[j]);
            g(j, i) = std::conj(g(i, j));
        }
    return HermitianMatrix(g);
}

}  // namespace opk
