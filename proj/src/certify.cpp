#include "opk/certify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <thread>

#include "opk/error.hpp"

namespace opk {

// ---------------------------------------------------------------- tolerances

namespace {

template <class F>
void for_each_tolerance(Tolerances &t, F &&f) {
    f("psd", t.psd);
    f("probe", t.probe);
    f("witness", t.witness);
    f("null_form", t.null_form);
    f("bump_relative", t.bump_relative);
    f("reference_ratio", t.reference_ratio);
    f("projection_eig", t.projection_eig);
}

}  // namespace

void Tolerances::set(const std::string &name, double value) {
    if (!std::isfinite(value) || value <= 0.0) {
        throw Error(ErrorCode::InvalidDescriptor, "tolerance " + name + " must be positive and finite");
    }
    bool found = false;
    for_each_tolerance(*this, [&](const char *key, double &slot) {
        if (name == key) {
            slot = value;
            found = true;
        }
    });
    if (!found) throw Error(ErrorCode::InvalidDescriptor, "unknown tolerance '" + name + "'");
}

std::map<std::string, double> Tolerances::as_map() const {
    std::map<std::string, double> out;
    Tolerances copy = *this;
    for_each_tolerance(copy, [&](const char *key, double &slot) { out[key] = slot; });
    return out;
}

// -------------------------------------------------------------------- probes

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) noexcept {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (trial + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::vector<Point> draw_design(std::uint64_t stream_seed, std::size_t n, std::size_t m, double box) {
    std::mt19937_64 rng(stream_seed);
    // Portable: std::uniform_real_distribution is implementation-defined.
    auto uniform = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    const double min_dist2 = (1e-6 * box) * (1e-6 * box);
    std::vector<Point> points;
    while (points.size() < n) {
        Point p(m);
        for (double &c : p) c = box * (2.0 * uniform() - 1.0);
        const bool clash = std::any_of(points.begin(), points.end(), [&](const Point &q) {
            double s = 0.0;
            for (std::size_t i = 0; i < m; ++i) s += (p[i] - q[i]) * (p[i] - q[i]);
            return s < min_dist2;
        });
        if (!clash) points.push_back(std::move(p));
    }
    return points;
}

namespace {

struct TrialOutcome {
    double min_eigenvalue = 0.0;
    double scale = 0.0;
    CVector witness;
    std::vector<Point> points;
};

TrialOutcome run_trial(const OperatorKernel &k, const ProbeOptions &o, std::size_t trial) {
    TrialOutcome out;
    out.points = draw_design(trial_seed(o.seed, trial), o.n, k.ambient_dim(), o.box);
    const BlockGram g = gram(k, out.points);
    const EigenDecomposition eig = eigen_hermitian(g.matrix);
    out.min_eigenvalue = eig.eigenvalues.front();
    out.scale = std::max(1.0, trace(g.matrix));
    out.witness = eig.eigenvector(0);
    return out;
}

}  // namespace

ProbeReport probe_strict_pd(const OperatorKernel &k, const ProbeOptions &options) {
    if (options.n < 2) throw Error(ErrorCode::InvalidDescriptor, "probe needs n >= 2 points per design");
    if (!(options.box > 0.0) || !std::isfinite(options.box)) {
        throw Error(ErrorCode::InvalidDescriptor, "probe box must be positive");
    }
    std::vector<TrialOutcome> outcomes(options.trials);
    const unsigned jobs = std::max(1u, std::min<unsigned>(options.jobs, static_cast<unsigned>(options.trials)));
    if (jobs <= 1) {
        for (std::size_t t = 0; t < options.trials; ++t) outcomes[t] = run_trial(k, options, t);
    } else {
        // Trials are striped over threads; each slot depends only on its index.
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(jobs);
        for (unsigned j = 0; j < jobs; ++j) {
            pool.emplace_back([&, j] {
                try {
                    for (std::size_t t = j; t < options.trials; t += jobs) outcomes[t] = run_trial(k, options, t);
                } catch (...) {
                    errors[j] = std::current_exception();
                }
            });
        }
        for (auto &th : pool) th.join();
        for (auto &e : errors)
            if (e) std::rethrow_exception(e);
    }

    ProbeReport report;
    report.options = options;
    report.global_min = outcomes.empty() ? 0.0 : outcomes.front().min_eigenvalue;
    for (std::size_t t = 0; t < outcomes.size(); ++t) {
        const TrialOutcome &o = outcomes[t];
        report.min_eigenvalues.push_back(o.min_eigenvalue);
        report.global_min = std::min(report.global_min, o.min_eigenvalue);
        if (!report.violation && o.min_eigenvalue <= options.tol * o.scale) {
            report.violation = ProbeViolation{t, o.points, o.witness, o.min_eigenvalue, o.scale};
        }
    }
    return report;
}

NullDirection find_null_direction(const OperatorKernel &k, const std::vector<Point> &points) {
    const BlockGram g = gram(k, points);
    const EigenDecomposition eig = eigen_hermitian(g.matrix);
    NullDirection out;
    out.eigenvalue = eig.eigenvalues.front();
    out.vector = eig.eigenvector(0);
    out.measure = VectorAtomMeasure(k.ambient_dim(), k.matrix_dim());
    const std::size_t ell = k.matrix_dim();
    for (std::size_t mu = 0; mu < points.size(); ++mu) {
        out.measure.add(points[mu], std::span<const Complex>(out.vector).subspan(mu * ell, ell));
    }
    return out;
}

// ----------------------------------------------------------- counterexamples

namespace {

constexpr std::size_t kProjectionPoints = 6;
constexpr double kProjectionBox = 2.0;

void check_projections(const OperatorKernel &k, std::uint64_t seed, std::vector<ProjectionCheck> checks,
                       CounterexampleResult &out) {
    out.projection_points = draw_design(trial_seed(seed, 0), kProjectionPoints, k.ambient_dim(), kProjectionBox);
    out.min_projection_eigenvalue = std::numeric_limits<double>::infinity();
    for (auto &c : checks) {
        const HermitianMatrix g = projection_gram(scalar_projection_kernel(k, c.v), out.projection_points);
        c.min_eigenvalue = min_eigenvalue(g);
        out.min_projection_eigenvalue = std::min(out.min_projection_eigenvalue, c.min_eigenvalue);
    }
    out.projections = std::move(checks);
}

}  // namespace

CounterexampleResult demo_counterexample_shifted_gaussian(const std::vector<double> &w, std::uint64_t seed,
                                                          const Tolerances &tol) {
    const OperatorKernel k = OperatorKernel::shifted_gaussian(w);
    const std::size_t m = w.size();

    DerivVectorMeasure eta(0, m, 2);
    Point shifted(m);
    for (std::size_t i = 0; i < m; ++i) shifted[i] = 2.0 * w[i];
    const CVector e1{1.0, 0.0};
    const CVector minus_e2{0.0, -1.0};
    eta.add(MultiIndex::zero(m), Point(m, 0.0), e1);
    eta.add(MultiIndex::zero(m), shifted, minus_e2);

    CounterexampleResult out;
    out.name = "shifted-gaussian";
    const QuadraticFormResult q = quadratic_form_detailed(k, eta);
    out.mixed_form = q.value;
    out.reference_scale = q.scale;
    // Each single atom has form K_ii(0) = 1.
    out.reference_form = 1.0;
    out.relative_form = out.mixed_form / out.reference_form;
    for (std::size_t i = 0; i < m; ++i) out.parameters["w" + std::to_string(i)] = w[i];
    out.parameters["seed"] = static_cast<double>(seed);

    const Complex i{0.0, 1.0};
    check_projections(k, seed,
                      {{"e1", {1.0, 0.0}, 0.0},
                       {"e2", {0.0, 1.0}, 0.0},
                       {"e1+e2", {1.0, 1.0}, 0.0},
                       {"e1+ie2", {1.0, i}, 0.0}},
                      out);
    out.reproduced = std::abs(out.mixed_form) <= tol.null_form && out.min_projection_eigenvalue > tol.projection_eig;
    return out;
}

double bump(double x) noexcept {
    const double r = 1.0 - x * x;
    return r > 0.0 ? std::exp(-1.0 / r) : 0.0;
}

CounterexampleResult demo_counterexample_radial_bump(std::size_t grid_n, double box, std::uint64_t seed,
                                                     const Tolerances &tol) {
    if (grid_n < 128) throw Error(ErrorCode::InvalidGrid, "grid_n must be at least 128");
    if (!std::isfinite(box) || box < 1.0) throw Error(ErrorCode::InvalidGrid, "box must contain [-1, 1]");

    const std::vector<double> xs = linspace(-box, box, grid_n);
    const double dx = xs[1] - xs[0];
    const double xi_max = std::numbers::pi / dx;
    const std::vector<double> xis = linspace(-xi_max, xi_max, grid_n);
    const double dxi = xis[1] - xis[0];

    std::vector<double> phi1(grid_n), phi2(grid_n);
    for (std::size_t j = 0; j < grid_n; ++j) {
        phi1[j] = bump(xs[j]);
        phi2[j] = bump(2.0 * xs[j]);
    }
    // Both bumps are even and the grid is symmetric, so the transforms are real.
    auto transform = [&](const std::vector<double> &phi, double xi) {
        double s = 0.0;
        for (std::size_t j = 0; j < grid_n; ++j) s += phi[j] * std::cos(xs[j] * xi);
        return s * dx;
    };

    std::vector<PlaneWaveAtom> atoms;
    atoms.reserve(grid_n);
    for (double xi : xis) {
        const double a = transform(phi1, xi);
        const double b = transform(phi2, xi);
        // (b, -a)(b, -a)^T dxi
        CMatrix g(2, 2);
        g(0, 0) = b * b * dxi;
        g(0, 1) = -a * b * dxi;
        g(1, 0) = -a * b * dxi;
        g(1, 1) = a * a * dxi;
        atoms.push_back({{xi}, HermitianMatrix(g)});
    }
    const OperatorKernel k = OperatorKernel::plane_wave(std::move(atoms), 1, 2);

    DerivVectorMeasure eta(0, 1, 2);
    DerivVectorMeasure eta1(0, 1, 2);
    const MultiIndex zero = MultiIndex::zero(1);
    for (std::size_t j = 0; j < grid_n; ++j) {
        if (phi1[j] == 0.0 && phi2[j] == 0.0) continue;
        eta.add(zero, {xs[j]}, CVector{phi1[j] * dx, phi2[j] * dx});
        if (phi1[j] != 0.0) eta1.add(zero, {xs[j]}, CVector{phi1[j] * dx, 0.0});
    }

    CounterexampleResult out;
    out.name = "radial-bump";
    out.mixed_form = quadratic_form(k, eta);
    out.reference_form = quadratic_form(k, eta1);
    out.relative_form = out.mixed_form / out.reference_form;
    double l1 = 0.0;
    for (double p : phi1) l1 += std::abs(p) * dx;
    out.reference_scale = l1 * l1 * kernel_eval(k, Point{0.0}, Point{0.0})(0, 0).real();
    out.parameters = {{"grid_n", static_cast<double>(grid_n)}, {"box", box},       {"dx", dx},
                      {"xi_max", xi_max},                      {"dxi", dxi},       {"seed", static_cast<double>(seed)}};

    check_projections(k, seed, {{"e1", {1.0, 0.0}, 0.0}, {"e2", {0.0, 1.0}, 0.0}}, out);
    out.reproduced = std::abs(out.relative_form) <= tol.bump_relative &&
                     out.reference_form > tol.reference_ratio * out.reference_scale &&
                     out.min_projection_eigenvalue > 0.0;
    return out;
}

// ------------------------------------------------------------ classification

ClassificationReport classify_and_report(const OperatorMeasure &measure, const RadialProfile &profile, std::size_t m,
                                         const ProbeOptions &probe, const Tolerances &tol) {
    if (m == 0) throw Error(ErrorCode::InvalidDescriptor, "ambient dimension must be >= 1");
    if (profile.kind == ProfileKind::Askey && static_cast<int>(m) > 2 * profile.askey_ell - 3) {
        throw Error(ErrorCode::InvalidDescriptor,
                    "askey profile with ell = " + std::to_string(profile.askey_ell) +
                        " is positive definite only for m <= 2 ell - 3 = " + std::to_string(2 * profile.askey_ell - 3) +
                        ", got m = " + std::to_string(m));
    }
    if (profile.kind == ProfileKind::Omega && static_cast<int>(m) >= profile.omega_m) {
        throw Error(ErrorCode::InvalidDescriptor,
                    "omega profile with source dimension " + std::to_string(profile.omega_m) +
                        " is classified only on R^m with m < " + std::to_string(profile.omega_m) +
                        ", got m = " + std::to_string(m));
    }

    ClassificationReport r;
    r.profile = profile;
    r.m = m;
    r.classification = classify_radial(measure, profile.kind, tol.psd);
    const OperatorKernel k = OperatorKernel::radial(profile, measure, m);
    ProbeOptions opts = probe;
    opts.tol = tol.probe;
    r.probe = probe_strict_pd(k, opts);

    if (profile.has_jets()) {
        r.supported_jet_order = kMaxDerivOrder / 2;
    } else {
        r.supported_jet_order = (profile.askey_ell - 2) / 2;
        r.finite_differences_only = true;
    }

    const bool strict = r.classification.verdict == RadialVerdict::StrictlyPDAndUniversal;
    if (strict) {
        r.consistent = !r.probe.violation_found();
        if (!r.consistent) r.note = "probe found a near-singular Gram for a kernel classified strictly PD";
    } else {
        // Two points, 0 and e1, carrying (v, -v): the constant part cancels.
        std::vector<Point> design{Point(m, 0.0), Point(m, 0.0)};
        design[1][0] = 1.0;
        const BlockGram g = gram(k, design);
        r.witness_design_min_eigenvalue = min_eigenvalue(g.matrix);
        r.witness_design_scale = std::max(1.0, trace(g.matrix));
        r.consistent = *r.witness_design_min_eigenvalue <= tol.witness * r.witness_design_scale;
        if (!r.consistent) r.note = "witness design Gram is not near-singular";
    }
    if (r.consistent && profile.kind == ProfileKind::Omega) {
        r.note = "omega profiles are C-infinity universal but not C0-universal";
    }
    return r;
}

}  // namespace opk
