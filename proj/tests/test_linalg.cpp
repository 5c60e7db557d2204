#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <random>

#include "oracles.hpp"
#include "platoon/linalg.hpp"

using namespace platoon;

namespace {

Mat4 published_T() {
    return Mat4{{1, 0.8, 0, 0}, {0, 1, 1, 0.7}, {0, 0, 1, -0.5}, {0, 0, 0, 1}};
}

}  // namespace

TEST_CASE("Mat4 rejects non-finite entries") {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS((Mat4{{nan, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}}), NonFinite);
    Mat4 m = Mat4::identity();
    m(1, 2) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(sym_eigen(m), NonFinite);
    CHECK_THROWS_AS(mu2(m), NonFinite);
    CHECK_THROWS_AS(spectral_norm(m), NonFinite);
    CHECK_THROWS_AS(singular_values(m), NonFinite);
}

TEST_CASE("sym_eigen on identity and diagonal matrices") {
    const auto id = sym_eigen(Mat4::identity());
    for (double l : id.eigenvalues) CHECK(l == doctest::Approx(1.0));

    const auto d = sym_eigen(Mat4::diagonal({-1, -2, 0.5, 3}));
    CHECK(d.eigenvalues[0] == doctest::Approx(-2.0));
    CHECK(d.eigenvalues[1] == doctest::Approx(-1.0));
    CHECK(d.eigenvalues[2] == doctest::Approx(0.5));
    CHECK(d.eigenvalues[3] == doctest::Approx(3.0));
}

TEST_CASE("sym_eigen rejects asymmetric input") {
    Mat4 m = Mat4::identity();
    m(0, 1) = 1e-3;
    CHECK_THROWS_AS(sym_eigen(m), NonSymmetric);
}

TEST_CASE("sym_eigen matches the inertia-bisection oracle and reconstructs A") {
    std::mt19937_64 rng(20200330);
    for (int trial = 0; trial < 500; ++trial) {
        const double scale = trial % 3 == 0 ? 100.0 : 1.0;
        const Mat4 a = oracle::random_symmetric(rng, scale);
        const auto got = sym_eigen(a, true);
        const Vec4 want = oracle::bisection_eigenvalues(a);
        const double norm_a = a.frobenius();
        for (int i = 0; i < 4; ++i) CHECK(std::abs(got.eigenvalues[i] - want[i]) <= 1e-9 * (1 + norm_a));
        for (int i = 0; i < 3; ++i) CHECK(got.eigenvalues[i] <= got.eigenvalues[i + 1]);

        REQUIRE(got.eigenvectors.has_value());
        const Mat4& v = *got.eigenvectors;
        const Mat4 recon = v * Mat4::diagonal(got.eigenvalues) * v.transpose();
        CHECK((a - recon).frobenius() <= 1e-10 * (1 + norm_a));
        CHECK((v.transpose() * v - Mat4::identity()).max_abs() <= 1e-12);
    }
}

TEST_CASE("mu2 examples") {
    CHECK(mu2(Mat4::identity() * -1.0) == doctest::Approx(-1.0));

    Mat4 skew = Mat4::identity() * -1.0;
    skew(0, 0) = 0.0;
    skew(1, 1) = 0.0;
    skew(0, 1) = 1.0;
    skew(1, 0) = -1.0;
    CHECK(std::abs(mu2(skew)) <= 1e-15);
}

TEST_CASE("mu2 properties over random matrices") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> shift(-5.0, 5.0);
    for (int trial = 0; trial < 300; ++trial) {
        const Mat4 a = oracle::random_matrix(rng, 3.0);
        CHECK(mu2(a) == mu2(a.symmetric_part()));
        const double c = shift(rng);
        CHECK(std::abs(mu2(a + Mat4::identity() * c) - (mu2(a) + c)) <= 1e-10);
        CHECK(std::abs(mu2(a) - oracle::mu2(a)) <= 1e-9);
    }
}

TEST_CASE("spectral_norm examples and properties") {
    CHECK(spectral_norm(Mat4::diagonal({1.5, -4, 2, 0.25})) == doctest::Approx(4.0));
    CHECK(spectral_norm(Mat4::zero()) == 0.0);

    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const Mat4 a = oracle::random_matrix(rng);
        const double s = spectral_norm(a);
        CHECK(std::abs(s - oracle::power_spectral_norm(a)) <= 1e-8);
        // Every eigenvalue of a symmetric matrix is bounded by its spectral norm.
        const Mat4 sym = a.symmetric_part();
        for (double l : sym_eigen(sym).eigenvalues) CHECK(spectral_norm(sym) >= std::abs(l) - 1e-12);
        // Spectral radius of the general matrix via ||A^64||^(1/64); bounded by sigma_max.
        Mat4 p = a;
        for (int k = 0; k < 6; ++k) p = p * p;
        CHECK(std::pow(spectral_norm(p), 1.0 / 64.0) <= s * (1 + 1e-12));
    }
}

TEST_CASE("singular_values of unit upper-triangular matrices have product 1") {
    const Vec4 id = singular_values(Mat4::identity());
    for (double s : id) CHECK(s == doctest::Approx(1.0));

    const Vec4 s = singular_values(published_T());
    CHECK(std::abs(s[0] * s[1] * s[2] * s[3] - 1.0) <= 1e-10);
    for (int i = 0; i < 3; ++i) CHECK(s[i] <= s[i + 1]);
    const Vec4 lam = oracle::bisection_eigenvalues(published_T().transpose() * published_T());
    CHECK(s[0] == doctest::Approx(std::sqrt(lam[0])).epsilon(1e-10));
    CHECK(s[3] == doctest::Approx(std::sqrt(lam[3])).epsilon(1e-10));

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 100; ++trial) {
        Mat4 t = Mat4::identity();
        for (int r = 0; r < 4; ++r)
            for (int c = r + 1; c < 4; ++c) t(r, c) = u(rng);
        const Vec4 sv = singular_values(t);
        CHECK(std::abs(sv[0] * sv[1] * sv[2] * sv[3] - 1.0) <= 1e-10);
    }
}

TEST_CASE("unit_triangular_inverse") {
    CHECK(unit_triangular_inverse(Mat4::identity()) == Mat4::identity());

    Mat4 t = Mat4::identity();
    t(0, 1) = 0.8;
    const Mat4 ti = unit_triangular_inverse(t);
    CHECK(ti(0, 1) == -0.8);

    const Mat4 tp = published_T();
    CHECK((tp * unit_triangular_inverse(tp) - Mat4::identity()).max_abs() <= 1e-14);
    CHECK((unit_triangular_inverse(tp) * tp - Mat4::identity()).max_abs() <= 1e-14);

    Mat4 bad_diag = tp;
    bad_diag(2, 2) = 2.0;
    CHECK_THROWS_AS(unit_triangular_inverse(bad_diag), NotUnitTriangular);
    Mat4 bad_lower = tp;
    bad_lower(3, 0) = 0.1;
    CHECK_THROWS_AS(unit_triangular_inverse(bad_lower), NotUnitTriangular);
}

TEST_CASE("general inverse and singular detection") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const Mat4 a = oracle::random_matrix(rng) + Mat4::identity() * 3.0;
        CHECK((a * inverse(a) - Mat4::identity()).max_abs() <= 1e-12);
    }
    Mat4 s = Mat4::identity();
    s(3, 3) = 0.0;
    CHECK_THROWS_AS(inverse(s), SingularMatrix);
    CHECK_THROWS_AS(condition_number(s), SingularMatrix);
    CHECK(condition_number(Mat4::diagonal({1, 2, 4, 8})) == doctest::Approx(8.0));
}
