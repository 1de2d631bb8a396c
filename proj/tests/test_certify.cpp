#include <doctest.h>

#include <cmath>

#include "opk/certify.hpp"
#include "opk/error.hpp"
#include "oracles.hpp"

using namespace opk;

namespace {

OperatorKernel radial_kernel(const RadialProfile &p, std::size_t ell, std::size_t m, double w = 1.0) {
    return OperatorKernel::radial(p, OperatorMeasure(ell, {{w, HermitianMatrix::identity(ell)}}), m);
}

OperatorKernel constant_kernel(std::size_t ell, std::size_t m) {
    return OperatorKernel::radial(RadialProfile::gaussian(), OperatorMeasure(ell, {{0.0, HermitianMatrix::identity(ell)}}), m);
}

bool same_report(const ProbeReport &a, const ProbeReport &b) {
    if (a.min_eigenvalues != b.min_eigenvalues || a.global_min != b.global_min) return false;
    if (a.violation.has_value() != b.violation.has_value()) return false;
    if (!a.violation) return true;
    return a.violation->trial == b.violation->trial && a.violation->points == b.violation->points &&
           a.violation->witness == b.violation->witness && a.violation->value == b.violation->value;
}

}  // namespace

TEST_SUITE("certify") {
    TEST_CASE("trial seeds and designs are deterministic") {
        CHECK(trial_seed(0, 0) == trial_seed(0, 0));
        CHECK(trial_seed(0, 1) != trial_seed(0, 0));
        CHECK(trial_seed(1, 0) != trial_seed(0, 0));
        const auto a = draw_design(trial_seed(7, 3), 8, 3, 2.0);
        CHECK(a == draw_design(trial_seed(7, 3), 8, 3, 2.0));
        REQUIRE(a.size() == 8);
        for (const auto &p : a) {
            REQUIRE(p.size() == 3);
            for (double c : p) CHECK(std::abs(c) <= 2.0);
        }
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t j = i + 1; j < a.size(); ++j) {
                double d = 0.0;
                for (std::size_t k = 0; k < 3; ++k) d += (a[i][k] - a[j][k]) * (a[i][k] - a[j][k]);
                CHECK(std::sqrt(d) >= 2e-6);
            }
    }

    TEST_CASE("probe examples") {
        ProbeOptions opt;
        opt.trials = 50;
        const ProbeReport g = probe_strict_pd(radial_kernel(RadialProfile::gaussian(), 2, 2), opt);
        CHECK_FALSE(g.violation_found());
        CHECK(g.design_count() == 50);
        CHECK(g.global_min > 0.0);

        opt.trials = 5;
        for (std::size_t n : {2u, 3u, 5u}) {
            opt.n = n;
            const ProbeReport c = probe_strict_pd(constant_kernel(2, 1), opt);
            REQUIRE(c.violation_found());
            CHECK(c.violation->trial == 0);
            CHECK(std::abs(c.violation->value) <= 1e-10 * c.violation->scale);
            CHECK(norm(c.violation->witness) == doctest::Approx(1.0).epsilon(1e-12));
            for (double e : c.min_eigenvalues) CHECK(std::abs(e) <= 1e-10 * static_cast<double>(2 * n));
        }

        opt.n = 2;
        const OperatorKernel pw = OperatorKernel::plane_wave({{{1.3}, HermitianMatrix::identity(1)}}, 1, 1);
        const ProbeReport r = probe_strict_pd(pw, opt);
        CHECK(r.violation_found());
        for (double e : r.min_eigenvalues) CHECK(std::abs(e) <= 1e-12);

        opt.n = 1;
        CHECK_THROWS_AS(probe_strict_pd(pw, opt), Error);
    }

    TEST_CASE("probes are reproducible and independent of the thread count") {
        const OperatorKernel k = OperatorKernel::radial(RadialProfile::omega(3), OperatorMeasure(2, {{0.7, HermitianMatrix::identity(2)}, {2.0, HermitianMatrix::diagonal(std::vector<double>{1.0, 0.0})}}), 2);
        ProbeOptions opt;
        opt.trials = 17;
        opt.seed = 12345;
        const ProbeReport a = probe_strict_pd(k, opt);
        const ProbeReport b = probe_strict_pd(k, opt);
        opt.jobs = 4;
        const ProbeReport c = probe_strict_pd(k, opt);
        CHECK(same_report(a, b));
        CHECK(same_report(a, c));
        opt.seed = 12346;
        CHECK_FALSE(same_report(a, probe_strict_pd(k, opt)));
    }

    TEST_CASE("null direction examples") {
        const NullDirection c = find_null_direction(constant_kernel(1, 1), {{0.0}, {1.0}});
        CHECK(std::abs(c.eigenvalue) <= 1e-14);
        REQUIRE(c.vector.size() == 2);
        CHECK(std::abs(c.vector[0] + c.vector[1]) <= 1e-14);
        REQUIRE(c.measure.atoms().size() == 2);
        CHECK(c.measure.atoms()[0].v[0] == c.vector[0]);

        const OperatorKernel sg = OperatorKernel::shifted_gaussian({1.0});
        const NullDirection s = find_null_direction(sg, {{0.0}, {2.0}});
        CHECK(s.eigenvalue <= 1e-12);
        // Proportional to (1, 0, 0, -1).
        const Complex phase = s.vector[0];
        CHECK(std::abs(phase) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-10));
        CHECK(std::abs(s.vector[1]) <= 1e-10);
        CHECK(std::abs(s.vector[2]) <= 1e-10);
        CHECK(std::abs(s.vector[3] + phase) <= 1e-10);

        const NullDirection pd = find_null_direction(radial_kernel(RadialProfile::gaussian(), 2, 1), {{0.0}, {0.5}, {1.5}});
        CHECK(pd.eigenvalue > 0.0);
        CHECK_THROWS_AS(find_null_direction(sg, {{0.0}, {0.0}}), Error);
    }

    TEST_CASE("shifted gaussian counterexample") {
        const CounterexampleResult r = demo_counterexample_shifted_gaussian({1.0});
        CHECK(std::abs(r.mixed_form) <= 1e-12);
        // Hand evaluation of the four blocks: 1 + 1 - 1 - 1.
        CHECK(std::abs(r.mixed_form) <= 1e-14);
        REQUIRE(r.projections.size() == 4);
        CHECK(r.projections[0].label == "e1");
        CHECK(r.projections[3].label == "e1+ie2");
        for (const auto &p : r.projections) CHECK(p.min_eigenvalue > 1e-8);
        CHECK(r.projection_points.size() == 6);
        CHECK(r.reproduced);

        const CounterexampleResult r2 = demo_counterexample_shifted_gaussian({0.5, -0.3});
        CHECK(std::abs(r2.mixed_form) <= 1e-12);
        CHECK(r2.min_projection_eigenvalue > 0.0);
        CHECK_THROWS_AS(demo_counterexample_shifted_gaussian({0.0}), Error);
    }

    TEST_CASE("radial bump counterexample") {
        CHECK(bump(0.0) == doctest::Approx(std::exp(-1.0)));
        CHECK(bump(1.0) == 0.0);
        CHECK(bump(-1.5) == 0.0);
        const CounterexampleResult r = demo_counterexample_radial_bump(512, 4.0);
        CHECK(r.relative_form <= 1e-6);
        CHECK(r.reference_form > 1e-4 * r.reference_scale);
        CHECK(r.min_projection_eigenvalue > 0.0);
        CHECK(r.reproduced);
        CHECK_THROWS_AS(demo_counterexample_radial_bump(64, 4.0), Error);
        CHECK_THROWS_AS(demo_counterexample_radial_bump(512, 0.5), Error);
    }

    TEST_CASE("classification reports") {
        ProbeOptions opt;
        opt.trials = 10;
        const OperatorMeasure id2(2, {{1.0, HermitianMatrix::identity(2)}});

        const ClassificationReport g = classify_and_report(id2, RadialProfile::gaussian(), 2, opt);
        CHECK(g.classification.verdict == RadialVerdict::StrictlyPDAndUniversal);
        CHECK_FALSE(g.probe.violation_found());
        CHECK(g.consistent);
        CHECK(g.supported_jet_order == 4);

        const ClassificationReport a = classify_and_report(id2, RadialProfile::askey(4), 5, opt);
        CHECK(a.classification.verdict == RadialVerdict::StrictlyPDAndUniversal);
        CHECK(a.consistent);
        CHECK(a.finite_differences_only);
        CHECK(a.supported_jet_order == 1);
        CHECK_THROWS_AS(classify_and_report(id2, RadialProfile::askey(4), 6, opt), Error);

        const ClassificationReport o = classify_and_report(id2, RadialProfile::omega(3), 2, opt);
        CHECK(o.classification.verdict == RadialVerdict::StrictlyPDAndUniversal);
        CHECK(o.consistent);
        CHECK_FALSE(o.note.empty());
        CHECK_THROWS_AS(classify_and_report(id2, RadialProfile::omega(3), 3, opt), Error);

        // Mass only along e1 away from the origin: e2 is a witness.
        const OperatorMeasure singular(2, {{0.0, HermitianMatrix::identity(2)}, {1.5, HermitianMatrix::diagonal(std::vector<double>{2.0, 0.0})}});
        const ClassificationReport s = classify_and_report(singular, RadialProfile::gaussian(), 1, opt);
        CHECK(s.classification.verdict == RadialVerdict::NotStrictlyPD);
        REQUIRE(s.witness_design_min_eigenvalue.has_value());
        CHECK(*s.witness_design_min_eigenvalue <= 1e-9 * s.witness_design_scale);
        CHECK(std::abs(s.classification.witness[0]) <= 1e-12);
        CHECK(s.consistent);
    }

    TEST_CASE("tolerances") {
        Tolerances t;
        t.set("probe", 1e-8);
        CHECK(t.probe == 1e-8);
        CHECK(t.as_map().at("probe") == 1e-8);
        CHECK(t.as_map().size() == 7);
        CHECK_THROWS_AS(t.set("nope", 1.0), Error);
        CHECK_THROWS_AS(t.set("psd", -1.0), Error);
    }
}
