#include <doctest.h>

#include <cmath>

#include "opk/error.hpp"
#include "opk/kernel.hpp"
#include "oracles.hpp"

using namespace opk;

namespace {

OperatorKernel gaussian_identity(std::size_t ell, std::size_t m, double w = 1.0) {
    return OperatorKernel::radial(RadialProfile::gaussian(), OperatorMeasure(ell, {{w, HermitianMatrix::identity(ell)}}), m);
}

OperatorKernel random_kernel(oracle::Rng &rng, RadialProfile profile, std::size_t ell, std::size_t m) {
    std::vector<OperatorAtom> atoms;
    const int n = rng.integer(1, 3);
    for (int j = 0; j < n; ++j)
        atoms.push_back({rng.uniform(0.3, 2.0), oracle::random_psd(rng, ell, static_cast<std::size_t>(rng.integer(1, 3)))});
    return OperatorKernel::radial(profile, OperatorMeasure(ell, atoms), m);
}

// d_1^alpha d_2^beta K by differencing kernel_eval in the stacked variable (x, y).
CMatrix fd_deriv(const OperatorKernel &k, const MultiIndex &alpha, const MultiIndex &beta, const Point &x,
                 const Point &y, double h = 0.05) {
    const std::size_t m = k.ambient_dim();
    std::vector<double> z(x);
    z.insert(z.end(), y.begin(), y.end());
    std::vector<int> gamma(alpha.components());
    gamma.insert(gamma.end(), beta.components().begin(), beta.components().end());
    return oracle::mixed_partial(
        [&](const std::vector<double> &zz) {
            return kernel_eval(k, std::span<const double>(zz).first(m), std::span<const double>(zz).subspan(m));
        },
        z, gamma, h);
}

std::vector<std::pair<MultiIndex, MultiIndex>> index_pairs(std::size_t m, int max_total) {
    std::vector<std::pair<MultiIndex, MultiIndex>> out;
    for (const auto &a : MultiIndex::graded_lex(m, max_total))
        for (const auto &b : MultiIndex::graded_lex(m, max_total - a.order())) out.emplace_back(a, b);
    return out;
}

}  // namespace

TEST_SUITE("kernel") {
    TEST_CASE("evaluation examples") {
        const OperatorKernel k = gaussian_identity(2, 1);
        CHECK(kernel_eval(k, Point{0.3}, Point{0.3}) == CMatrix::identity(2));
        const OperatorKernel empty = OperatorKernel::radial(RadialProfile::gaussian(), OperatorMeasure(2, {}), 1);
        CHECK(kernel_eval(empty, Point{0.0}, Point{1.0}).max_abs() == 0.0);
        const double d[] = {1.0, 2.0};
        const OperatorKernel kd =
            OperatorKernel::radial(RadialProfile::gaussian(), OperatorMeasure(2, {{1.0, HermitianMatrix::diagonal(d)}}), 1);
        const CMatrix v = kernel_eval(kd, Point{0.0}, Point{1.0});
        CHECK(v(0, 0).real() == doctest::Approx(std::exp(-1.0)));
        CHECK(v(1, 1).real() == doctest::Approx(2.0 * std::exp(-1.0)));
        CHECK(std::abs(v(0, 1)) == 0.0);
        CHECK_THROWS_AS(kernel_eval(k, Point{0.0, 1.0}, Point{1.0}), Error);
    }

    TEST_CASE("radial function") {
        oracle::Rng rng(2);
        const OperatorKernel k = random_kernel(rng, RadialProfile::omega(3), 2, 2);
        CHECK((radial_function_eval(k, 0.0) - total_operator(k.measure(), false).matrix()).max_abs() < 1e-14);
        CHECK((radial_function_eval(gaussian_identity(2, 1), 1.0) - std::exp(-1.0) * CMatrix::identity(2)).max_abs() < 1e-15);
        for (double t : {0.2, 1.0, 2.5})
            CHECK((radial_function_eval(k, t) - kernel_eval(k, Point{0.0, 0.0}, Point{t, 0.0})).max_abs() < 1e-14);
        const OperatorKernel pw = OperatorKernel::plane_wave({{{1.0}, HermitianMatrix::identity(1)}}, 1, 1);
        CHECK_THROWS_AS(radial_function_eval(pw, 1.0), Error);
    }

    TEST_CASE("hermitian symmetry for every family") {
        oracle::Rng rng(4);
        std::vector<OperatorKernel> kernels{random_kernel(rng, RadialProfile::gaussian(), 3, 2),
                                            random_kernel(rng, RadialProfile::askey(4), 2, 2),
                                            random_kernel(rng, RadialProfile::omega(4), 2, 2),
                                            OperatorKernel::shifted_gaussian({0.4, -0.3})};
        std::vector<PlaneWaveAtom> waves;
        for (int j = 0; j < 3; ++j) waves.push_back({rng.point(2, 2.0), oracle::random_psd(rng, 2, 1)});
        kernels.push_back(OperatorKernel::plane_wave(waves, 2, 2));
        for (const auto &k : kernels) {
            for (int i = 0; i < 100; ++i) {
                const Point x = rng.point(2, 2.0), y = rng.point(2, 2.0);
                const CMatrix a = kernel_eval(k, x, y);
                const CMatrix b = kernel_eval(k, y, x);
                CHECK((a - b.adjoint()).max_abs() <= 1e-12 * std::max(1.0, a.max_abs()));
            }
        }
    }

    TEST_CASE("derivative examples") {
        const double w = 1.7;
        const OperatorKernel k = gaussian_identity(2, 1, w);
        const Point o{0.4};
        CHECK(kernel_deriv_eval(k, MultiIndex({0}), MultiIndex({0}), o, Point{1.0}) == kernel_eval(k, o, Point{1.0}));
        CHECK(kernel_deriv_eval(k, MultiIndex({1}), MultiIndex({0}), o, o).max_abs() < 1e-15);
        CHECK((kernel_deriv_eval(k, MultiIndex({1}), MultiIndex({1}), o, o) - 2.0 * w * CMatrix::identity(2)).max_abs() < 1e-14);
        CHECK_THROWS_AS(kernel_deriv_eval(k, MultiIndex({5}), MultiIndex({4}), o, o), Error);
        const OperatorKernel a = OperatorKernel::radial(RadialProfile::askey(6), OperatorMeasure(1, {{1.0, HermitianMatrix::identity(1)}}), 1);
        CHECK_THROWS_AS(kernel_deriv_eval(a, MultiIndex({1}), MultiIndex({0}), Point{0.0}, Point{0.3}), Error);
    }

    TEST_CASE("analytic derivatives match Richardson differences") {
        oracle::Rng rng(31);
        for (const RadialProfile &p : {RadialProfile::gaussian(), RadialProfile::omega(3), RadialProfile::omega(2)}) {
            for (int trial = 0; trial < 4; ++trial) {
                const std::size_t m = static_cast<std::size_t>(rng.integer(1, 2));
                const OperatorKernel k = random_kernel(rng, p, 2, m);
                const Point x = rng.point(m, 1.0), y = rng.point(m, 1.0);
                for (const auto &[alpha, beta] : index_pairs(m, 3)) {
                    const CMatrix an = kernel_deriv_eval(k, alpha, beta, x, y);
                    const CMatrix fd = fd_deriv(k, alpha, beta, x, y);
                    CHECK(oracle::max_abs_diff(an, fd) <= 1e-6 * std::max(an.max_abs(), 1e-300));
                }
            }
        }
    }

    TEST_CASE("plane-wave and shifted-gaussian derivatives match differences") {
        oracle::Rng rng(37);
        std::vector<PlaneWaveAtom> waves;
        for (int j = 0; j < 3; ++j) waves.push_back({rng.point(2, 1.5), oracle::random_psd(rng, 2, 1)});
        const OperatorKernel pw = OperatorKernel::plane_wave(waves, 2, 2);
        const OperatorKernel sg = OperatorKernel::shifted_gaussian({0.3, 0.2});
        for (const auto *k : {&pw, &sg}) {
            const Point x = rng.point(2, 1.0), y = rng.point(2, 1.0);
            for (const auto &[alpha, beta] : index_pairs(2, 3)) {
                const CMatrix an = kernel_deriv_eval(*k, alpha, beta, x, y);
                const CMatrix fd = fd_deriv(*k, alpha, beta, x, y);
                CHECK(oracle::max_abs_diff(an, fd) <= 1e-6 * std::max(an.max_abs(), 1e-300));
            }
        }
    }

    TEST_CASE("askey finite-difference fallback") {
        const OperatorKernel a =
            OperatorKernel::radial(RadialProfile::askey(6), OperatorMeasure(1, {{0.5, HermitianMatrix::identity(1)}}), 1);
        // (1 - 0.5|x-y|)^5 with x - y = 0.6: d/dx = -2.5 (0.7)^4.
        const CMatrix d = kernel_deriv_eval(a, MultiIndex({1}), MultiIndex({0}), Point{0.6}, Point{0.0}, DerivMethod::FiniteDifference);
        CHECK(d(0, 0).real() == doctest::Approx(-2.5 * std::pow(0.7, 4)).epsilon(1e-6));
        CHECK_THROWS_AS(kernel_deriv_eval(a, MultiIndex({1}), MultiIndex({0}), Point{2.0}, Point{0.0}, DerivMethod::FiniteDifference), Error);
        CHECK_THROWS_AS(kernel_deriv_eval(a, MultiIndex({1}), MultiIndex({0}), Point{0.0}, Point{0.0}, DerivMethod::FiniteDifference), Error);
    }

    TEST_CASE("moment identity at the diagonal") {
        const double w = 0.9;
        oracle::Rng rng(12);
        const HermitianMatrix g = oracle::random_psd(rng, 2, 2);
        const OperatorKernel k = OperatorKernel::radial(RadialProfile::gaussian(), OperatorMeasure(2, {{w, g}}), 1);
        CHECK(deriv_diag_identity_check(k, MultiIndex({0}), MultiIndex({0})) == 0.0);
        CHECK(deriv_diag_identity_check(k, MultiIndex({1}), MultiIndex({1})) <= 1e-12);
        CHECK((kernel_deriv_eval(k, MultiIndex({1}), MultiIndex({1}), Point{0.0}, Point{0.0}) - 2.0 * w * g.matrix()).max_abs() < 1e-13);
        CHECK(deriv_diag_identity_check(k, MultiIndex({2}), MultiIndex({1})) == 0.0);
        // Independent oracle for the 2-d gaussian: (-1)^|beta| d^(alpha+beta) exp(-w|d|^2) at 0.
        const OperatorKernel k2 = OperatorKernel::radial(RadialProfile::gaussian(), OperatorMeasure(2, {{w, g}}), 2);
        for (const auto &[alpha, beta] : index_pairs(2, 4)) {
            std::vector<int> gamma(2);
            for (int i = 0; i < 2; ++i) gamma[i] = alpha[i] + beta[i];
            const double s = (beta.order() % 2 ? -1.0 : 1.0) * oracle::gaussian_derivative_at_zero(gamma, w);
            const CMatrix got = kernel_deriv_eval(k2, alpha, beta, Point{0.3, -0.2}, Point{0.3, -0.2});
            CHECK((got - s * g.matrix()).max_abs() <= 1e-12 * std::max(1.0, std::abs(s)));
        }
    }

    TEST_CASE("gram examples") {
        const OperatorKernel k = gaussian_identity(2, 1);
        const BlockGram one = gram(k, {{0.5}});
        CHECK(one.matrix == HermitianMatrix::identity(2));
        const BlockGram far = gram(k, {{0.0}, {10.0}});
        CHECK(std::abs(far.matrix(0, 2) - std::exp(-100.0)) < 1e-300);
        CHECK(min_eigenvalue(far.matrix) == doctest::Approx(1.0));
        CHECK_THROWS_AS(gram(k, {{0.0}, {0.0}}), Error);

        const OperatorKernel c = OperatorKernel::radial(RadialProfile::gaussian(), OperatorMeasure(2, {{0.0, HermitianMatrix::identity(2)}}), 1);
        const BlockGram cg = gram(c, {{0.0}, {1.0}});
        const auto e = eigen_hermitian(cg.matrix);
        CHECK(std::abs(e.eigenvalues[0]) < 1e-14);
        const CVector v = e.eigenvector(0);
        CHECK(std::abs(v[0] + v[2]) < 1e-12);
        CHECK(std::abs(v[1] + v[3]) < 1e-12);
    }

    TEST_CASE("derivative gram examples") {
        const OperatorKernel k = gaussian_identity(1, 1);
        const DerivBlockGram g = deriv_gram(k, {{0.0}}, 1);
        REQUIRE(g.matrix.dim() == 2);
        CHECK(g.matrix(0, 0).real() == doctest::Approx(1.0));
        CHECK(g.matrix(1, 1).real() == doctest::Approx(2.0));
        CHECK(std::abs(g.matrix(0, 1)) < 1e-15);

        oracle::Rng rng(6);
        const OperatorKernel r = random_kernel(rng, RadialProfile::gaussian(), 2, 2);
        const std::vector<Point> pts{rng.point(2, 1.0), rng.point(2, 1.0), rng.point(2, 1.0)};
        CHECK(deriv_gram(r, pts, 0).matrix == gram(r, pts).matrix);
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<Point> design;
            for (int i = 0; i < 4; ++i) design.push_back(rng.point(2, 2.0));
            const DerivBlockGram dg = deriv_gram(r, design, 1);
            CHECK(min_eigenvalue(dg.matrix) >= -1e-9 * trace(dg.matrix));
        }
        const OperatorKernel a = OperatorKernel::radial(RadialProfile::askey(4), OperatorMeasure(1, {{1.0, HermitianMatrix::identity(1)}}), 1);
        CHECK_THROWS_AS(deriv_gram(a, {{0.0}}, 1), Error);
        CHECK(g.layout().find("(1)") != std::string::npos);
    }

    TEST_CASE("derivative gram rows match the full layout") {
        oracle::Rng rng(14);
        const OperatorKernel k = random_kernel(rng, RadialProfile::gaussian(), 2, 2);
        const std::vector<Point> pts{rng.point(2, 1.0), rng.point(2, 1.0)};
        const DerivBlockGram full = deriv_gram(k, pts, 1);
        std::vector<GramRow> rows;
        for (const auto &p : pts)
            for (const auto &a : full.indices) rows.push_back({p, a});
        CHECK((deriv_gram_rows(k, rows).matrix() - full.matrix.matrix()).max_abs() < 1e-15);
    }

    TEST_CASE("scalar projection consistency") {
        oracle::Rng rng(21);
        const OperatorKernel k = random_kernel(rng, RadialProfile::gaussian(), 3, 2);
        for (int i = 0; i < 100; ++i) {
            const CVector v = oracle::random_vector(rng, 3);
            const Point x = rng.point(2, 2.0), y = rng.point(2, 2.0);
            const ScalarProjectionKernel kv = scalar_projection_kernel(k, v);
            const ScalarMeasure sm = scalar_projection_measure(k.measure(), v);
            double d2 = 0.0;
            for (int j = 0; j < 2; ++j) d2 += (x[j] - y[j]) * (x[j] - y[j]);
            double assembled = 0.0;
            for (const auto &a : sm.atoms()) assembled += std::exp(-a.omega * d2) * a.weight;
            CHECK(std::abs(kv(x, y) - assembled) <= 1e-13 * std::max(1.0, std::abs(assembled)));
        }
        const CVector e1{1.0, 0.0};
        const OperatorKernel id = gaussian_identity(2, 1);
        CHECK(std::abs(scalar_projection_kernel(id, e1)(Point{0.0}, Point{0.7}) - std::exp(-0.49)) < 1e-15);
        const CVector zero{0.0, 0.0};
        CHECK_THROWS_AS(scalar_projection_kernel(id, zero), Error);
        const HermitianMatrix pg = projection_gram(scalar_projection_kernel(id, e1), {{0.0}, {1.0}});
        CHECK(pg(0, 1).real() == doctest::Approx(std::exp(-1.0)));
    }

    TEST_CASE("shifted gaussian closed form") {
        const OperatorKernel k = OperatorKernel::shifted_gaussian({1.0});
        const CMatrix v = kernel_eval(k, Point{0.0}, Point{2.0});
        CHECK(v(0, 1).real() == 1.0);
        CHECK(v(1, 0).real() == doctest::Approx(std::exp(-16.0)));
        CHECK(v(0, 0).real() == doctest::Approx(std::exp(-4.0)));
        CHECK_THROWS_AS(OperatorKernel::shifted_gaussian({0.0}), Error);
    }
}
