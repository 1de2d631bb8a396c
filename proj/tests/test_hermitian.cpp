#include <doctest.h>

#include <cmath>

#include "opk/error.hpp"
#include "opk/hermitian.hpp"
#include "oracles.hpp"

using namespace opk;

namespace {

HermitianMatrix from_rows(std::initializer_list<std::initializer_list<Complex>> rows) {
    CMatrix a(rows.size(), rows.size());
    std::size_t i = 0;
    for (const auto &r : rows) {
        std::size_t j = 0;
        for (const Complex &z : r) a(i, j++) = z;
        ++i;
    }
    return HermitianMatrix(a);
}

CMatrix reconstruct(const EigenDecomposition &e) {
    const std::size_t n = e.eigenvalues.size();
    CMatrix d(n, n);
    for (std::size_t i = 0; i < n; ++i) d(i, i) = e.eigenvalues[i];
    return matmul(matmul(e.eigenvectors, d), e.eigenvectors.adjoint());
}

}  // namespace

TEST_SUITE("hermitian") {
    TEST_CASE("construction symmetrizes") {
        CMatrix a(2, 2);
        a(0, 1) = {1.0, 2.0};
        a(1, 0) = {3.0, 0.0};
        a(0, 0) = {1.0, 5.0};
        const HermitianMatrix h(a);
        CHECK(h(0, 1) == std::conj(h(1, 0)));
        CHECK(h(0, 0).imag() == 0.0);
        CHECK(h(0, 1) == Complex(2.0, 1.0));
    }

    TEST_CASE("non-finite entries are rejected") {
        CMatrix a(1, 1);
        a(0, 0) = std::nan("");
        CHECK_THROWS_AS(HermitianMatrix{a}, Error);
    }

    TEST_CASE("eigenvalues of closed-form examples") {
        const auto id = eigen_hermitian(HermitianMatrix::identity(3));
        for (double l : id.eigenvalues) CHECK(l == doctest::Approx(1.0).epsilon(1e-15));

        const auto e = eigen_hermitian(from_rows({{2.0, 1.0}, {1.0, 2.0}}));
        CHECK(e.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(e.eigenvalues[1] == doctest::Approx(3.0).epsilon(1e-14));

        const Complex i{0.0, 1.0};
        const auto p = eigen_hermitian(from_rows({{0.0, i}, {-i, 0.0}}));
        CHECK(p.eigenvalues[0] == doctest::Approx(-1.0).epsilon(1e-14));
        CHECK(p.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-14));
    }

    TEST_CASE("min eigenvalue examples") {
        const double d49[] = {4.0, 9.0};
        CHECK(min_eigenvalue(HermitianMatrix::diagonal(d49)) == doctest::Approx(4.0));
        CHECK(std::abs(min_eigenvalue(from_rows({{1.0, 1.0}, {1.0, 1.0}}))) < 1e-15);
        CHECK(min_eigenvalue(from_rows({{2.0, 1.0}, {1.0, 2.0}})) == doctest::Approx(1.0));
    }

    TEST_CASE("reconstruction and unitarity on random matrices") {
        oracle::Rng rng(11);
        for (int trial = 0; trial < 30; ++trial) {
            const std::size_t n = static_cast<std::size_t>(rng.integer(1, 12));
            CMatrix a(n, n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) a(i, j) = rng.complex_normal();
            const HermitianMatrix h(a);
            const auto e = eigen_hermitian(h);
            CHECK((reconstruct(e) - h.matrix()).frobenius_norm() <= 1e-12 * std::max(1.0, h.matrix().frobenius_norm()));
            CHECK((matmul(e.eigenvectors.adjoint(), e.eigenvectors) - CMatrix::identity(n)).frobenius_norm() <= 1e-12);
            CHECK(std::is_sorted(e.eigenvalues.begin(), e.eigenvalues.end()));
        }
    }

    TEST_CASE("eigen_hermitian is deterministic") {
        oracle::Rng rng(3);
        const HermitianMatrix h = oracle::random_psd(rng, 7, 4);
        const auto a = eigen_hermitian(h);
        const auto b = eigen_hermitian(h);
        CHECK(a.eigenvalues == b.eigenvalues);
        CHECK(a.eigenvectors == b.eigenvectors);
    }

    TEST_CASE("min eigenvalue is invariant under unitary conjugation") {
        oracle::Rng rng(5);
        for (int trial = 0; trial < 20; ++trial) {
            const std::size_t n = static_cast<std::size_t>(rng.integer(2, 8));
            CMatrix r(n, n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) r(i, j) = rng.complex_normal();
            const CMatrix u = eigen_hermitian(HermitianMatrix(r)).eigenvectors;
            const HermitianMatrix a = oracle::random_psd(rng, n, n);
            const HermitianMatrix b(matmul(matmul(u, a.matrix()), u.adjoint()));
            CHECK(std::abs(min_eigenvalue(a) - min_eigenvalue(b)) <= 1e-10);
        }
    }

    TEST_CASE("psd_sqrt examples and random squares") {
        const double d49[] = {4.0, 9.0};
        const HermitianMatrix s = psd_sqrt(HermitianMatrix::diagonal(d49));
        CHECK(s(0, 0).real() == doctest::Approx(2.0));
        CHECK(s(1, 1).real() == doctest::Approx(3.0));
        CHECK(std::abs(s(0, 1)) < 1e-15);
        CHECK((psd_sqrt(HermitianMatrix::identity(3)).matrix() - CMatrix::identity(3)).max_abs() < 1e-15);
        const HermitianMatrix ones = from_rows({{1.0, 1.0}, {1.0, 1.0}});
        const HermitianMatrix r = psd_sqrt(ones);
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j) CHECK(std::abs(r(i, j) - 1.0 / std::sqrt(2.0)) < 1e-14);

        oracle::Rng rng(17);
        for (int trial = 0; trial < 100; ++trial) {
            const std::size_t n = static_cast<std::size_t>(rng.integer(1, 6));
            const HermitianMatrix a = oracle::random_psd(rng, n, static_cast<std::size_t>(rng.integer(1, 6)));
            const HermitianMatrix b = psd_sqrt(a);
            const CMatrix bb = matmul(b.matrix(), b.matrix());
            const double scale = std::max(1.0, a.matrix().frobenius_norm());
            CHECK((bb - a.matrix()).frobenius_norm() <= 1e-10 * scale);
            CHECK(std::abs(trace(HermitianMatrix(bb)) - trace(a)) <= 1e-10 * scale);
            CHECK(is_psd(b).psd);
        }
    }

    TEST_CASE("psd_sqrt rejects indefinite input") {
        const double d[] = {1.0, -1.0};
        try {
            (void)psd_sqrt(HermitianMatrix::diagonal(d));
            FAIL("expected NotPSD");
        } catch (const Error &e) {
            CHECK(e.code() == ErrorCode::NotPSD);
        }
    }

    TEST_CASE("trace examples") {
        CHECK(trace(HermitianMatrix::identity(4)) == 4.0);
        const double d49[] = {4.0, 9.0};
        CHECK(trace(HermitianMatrix::diagonal(d49)) == 13.0);
        CHECK(trace(HermitianMatrix::zeros(3)) == 0.0);
    }

    TEST_CASE("is_psd examples") {
        CHECK(is_psd(HermitianMatrix::identity(2)).psd);
        const double d[] = {1.0, -1.0};
        const PsdCheck c = is_psd(HermitianMatrix::diagonal(d));
        CHECK_FALSE(c.psd);
        REQUIRE(c.witness.size() == 2);
        CHECK(std::abs(c.witness[0]) < 1e-15);
        CHECK(std::abs(std::abs(c.witness[1]) - 1.0) < 1e-15);
        CHECK(is_psd(from_rows({{1.0, 1.0}, {1.0, 1.0}})).psd);
    }

    TEST_CASE("cholesky examples") {
        const CMatrix l = cholesky_psd(HermitianMatrix::identity(3), 0.0);
        CHECK((l - CMatrix::identity(3)).max_abs() < 1e-15);
        const double d49[] = {4.0, 9.0};
        const CMatrix l2 = cholesky_psd(HermitianMatrix::diagonal(d49), 0.0);
        CHECK(l2(0, 0).real() == doctest::Approx(2.0));
        CHECK(l2(1, 1).real() == doctest::Approx(3.0));

        const HermitianMatrix ones = from_rows({{1.0, 1.0}, {1.0, 1.0}});
        const CMatrix lj = cholesky_psd(ones, 1e-8);
        CMatrix target = ones.matrix();
        target(0, 0) += 1e-8;
        target(1, 1) += 1e-8;
        CHECK((matmul(lj, lj.adjoint()) - target).max_abs() <= 1e-10 * 2.0);
        const CMatrix l0 = cholesky_psd(ones, 0.0);
        CHECK((matmul(l0, l0.adjoint()) - ones.matrix()).max_abs() <= 1e-10 * 2.0);
    }

    TEST_CASE("cholesky reports the failing pivot") {
        const double d[] = {1.0, -1.0};
        try {
            (void)cholesky_psd(HermitianMatrix::diagonal(d), 0.0);
            FAIL("expected NotPSD");
        } catch (const Error &e) {
            CHECK(e.code() == ErrorCode::NotPSD);
            CHECK(std::string(e.what()).find('1') != std::string::npos);
        }
    }

    TEST_CASE("cholesky solve recovers a random system") {
        oracle::Rng rng(23);
        const HermitianMatrix a = oracle::random_psd(rng, 6, 6);
        const CVector x = oracle::random_vector(rng, 6);
        const CVector b = matvec(a.matrix(), x);
        const CVector got = cholesky_solve(cholesky_psd(a, 0.0), b);
        for (std::size_t i = 0; i < 6; ++i) CHECK(std::abs(got[i] - x[i]) < 1e-8);
    }

    TEST_CASE("inner is conjugate-linear in the second slot") {
        const CVector a{{1.0, 1.0}};
        const CVector b{{0.0, 1.0}};
        CHECK(inner(a, b) == Complex(1.0, -1.0));
    }
}
