#pragma once

// Finite-design probes for strict positive definiteness, null directions, the
// two counterexample constructions and combined classification reports.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "opk/kernel.hpp"
#include "opk/measures.hpp"
#include "opk/rkhs.hpp"

namespace opk {

/// Named numeric thresholds; every report echoes the values it used.
struct Tolerances {
    double psd = kDefaultPsdTol;      // classification and PSD checks, relative to max(1, trace)
    double probe = 1e-10;             // probe violation threshold, relative to max(1, trace)
    double witness = 1e-9;            // witness-design Gram eigenvalue, relative to its trace
    double null_form = 1e-12;         // shifted-gaussian mixed form
    double bump_relative = 1e-6;      // radial-bump mixed form / reference form
    double reference_ratio = 1e-4;    // radial-bump reference form / its own scale
    double projection_eig = 1e-8;     // projection Gram eigenvalues

    /// Throws InvalidDescriptor on an unknown name or a non-positive value.
    void set(const std::string &name, double value);
    [[nodiscard]] std::map<std::string, double> as_map() const;
};

/// splitmix64 finalizer applied to (seed, trial); stable across platforms.
[[nodiscard]] std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) noexcept;

/// n distinct points uniform in [-box, box]^m, redrawn while any pair is closer
/// than 1e-6 box. Deterministic for a given stream seed.
[[nodiscard]] std::vector<Point> draw_design(std::uint64_t stream_seed, std::size_t n, std::size_t m, double box);

struct ProbeViolation {
    std::size_t trial = 0;
    std::vector<Point> points;
    CVector witness;  // unit eigenvector of the Gram
    double value = 0.0;
    double scale = 0.0;  // max(1, trace) of the violating Gram
};

struct ProbeOptions {
    std::size_t n = 4;
    std::size_t trials = 20;
    std::uint64_t seed = 0;
    double box = 2.0;
    unsigned jobs = 1;
    double tol = 1e-10;
};

struct ProbeReport {
    ProbeOptions options;
    std::vector<double> min_eigenvalues;  // indexed by trial
    double global_min = 0.0;
    std::optional<ProbeViolation> violation;  // the lowest-index violating trial

    [[nodiscard]] std::size_t design_count() const noexcept { return min_eigenvalues.size(); }
    [[nodiscard]] bool violation_found() const noexcept { return violation.has_value(); }
};

/// Requires n >= 2.
[[nodiscard]] ProbeReport probe_strict_pd(const OperatorKernel &k, const ProbeOptions &options);

struct NullDirection {
    double eigenvalue = 0.0;
    CVector vector;             // stacked unit vector, block mu belongs to points[mu]
    VectorAtomMeasure measure;  // the same vector as atoms over the points
};

[[nodiscard]] NullDirection find_null_direction(const OperatorKernel &k, const std::vector<Point> &points);

struct ProjectionCheck {
    std::string label;
    CVector v;
    double min_eigenvalue = 0.0;
};

struct CounterexampleResult {
    std::string name;
    double mixed_form = 0.0;      // quadratic form of the annihilating measure
    double reference_form = 0.0;  // positive form it is compared with
    double relative_form = 0.0;   // mixed / reference
    double reference_scale = 0.0;
    std::vector<ProjectionCheck> projections;
    double min_projection_eigenvalue = 0.0;
    std::vector<Point> projection_points;
    std::map<std::string, double> parameters;
    bool reproduced = false;  // null mixed form and positive projections
};

/// Kernel [[g(d), g(d+2w)], [g(d-2w), g(d)]], null measure e1 at 0 and -e2 at 2w,
/// projections e1, e2, e1+e2, e1+ie2 on 6 seeded points in [-2, 2]^m.
[[nodiscard]] CounterexampleResult demo_counterexample_shifted_gaussian(const std::vector<double> &w,
                                                                        std::uint64_t seed = 0,
                                                                        const Tolerances &tol = {});

/// One-dimensional bump construction; requires grid_n >= 128 and box >= 1.
[[nodiscard]] CounterexampleResult demo_counterexample_radial_bump(std::size_t grid_n = 512, double box = 4.0,
                                                                   std::uint64_t seed = 0,
                                                                   const Tolerances &tol = {});

/// The bump exp(-1/(1-x^2)) on |x| < 1.
[[nodiscard]] double bump(double x) noexcept;

struct ClassificationReport {
    RadialProfile profile;
    std::size_t m = 0;
    RadialClassification classification;
    ProbeReport probe;
    std::optional<double> witness_design_min_eigenvalue;
    double witness_design_scale = 0.0;
    int supported_jet_order = 0;
    bool finite_differences_only = false;
    bool consistent = true;
    std::string note;
};

/// Exact criterion plus random probes. Throws InvalidDescriptor when the family
/// is not positive definite on R^m (askey: m > 2 ell - 3; omega: m >= source dimension).
[[nodiscard]] ClassificationReport classify_and_report(const OperatorMeasure &measure, const RadialProfile &profile,
                                                       std::size_t m, const ProbeOptions &probe,
                                                       const Tolerances &tol = {});

}  // namespace opk
