#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "ctsid/sylvester.hpp"
#include "oracles.hpp"

using namespace ctsid;

namespace {

double expected_sign(int n, int m) {
    const int exponent = m + n * (n - 1) / 2 + m * (m - 1) / 2;
    return exponent % 2 == 0 ? 1.0 : -1.0;
}

}  // namespace

TEST_CASE("determinant equals the root-product resultant on 100 random pairs") {
    int checked = 0;
    while (checked < 100) {
        const int m = 1 + checked % 3;       // deg p1
        const int n = 1 + (checked / 3) % 4; // deg p2
        const CtPolynomial p1 = oracles::random_poly(m, false, 1.5);
        const CtPolynomial p2 = oracles::random_poly(n, false, 1.5);
        if (std::abs(p2.constant_term()) < 1e-3) continue;  // identity assumes p2(0) != 0
        const Eigen::MatrixXd s = build_sylvester(p1, p2, n, m);
        REQUIRE(s.rows() == n + m + 1);
        const double det = s.determinant();
        const double oracle =
            expected_sign(n, m) * p2.constant_term() * oracles::resultant_from_roots(p1, p2);
        CHECK(det == doctest::Approx(oracle).epsilon(1e-8));
        ++checked;
    }
}

TEST_CASE("a shared root makes the matrix singular") {
    // p1 = (x+1)(x-2), p2 = (x+1)(x+3): common root -1.
    const CtPolynomial p1 = CtPolynomial::from_roots({{-1.0, 0.0}, {2.0, 0.0}});
    const CtPolynomial p2 = CtPolynomial::from_roots({{-1.0, 0.0}, {-3.0, 0.0}});
    const Eigen::MatrixXd s = build_sylvester(p1, p2, 2, 2);
    CHECK(std::abs(s.determinant()) < 1e-9);
}

TEST_CASE("p2 with a root at zero makes the matrix singular") {
    const CtPolynomial p1({1.0, 1.0});
    const CtPolynomial p2({0.0, 3.0, 1.0});  // x(x+3)
    const Eigen::MatrixXd s = build_sylvester(p1, p2, 2, 1);
    CHECK(std::abs(s.determinant()) < 1e-12);
}

TEST_CASE("coprime pair is comfortably nonsingular") {
    const CtPolynomial p1({1.0, 1.0});        // x + 1
    const CtPolynomial p2({2.0, 0.0, 1.0});   // x^2 + 2
    const Eigen::MatrixXd s = build_sylvester(p1, p2, 2, 1);
    CHECK(std::abs(s.determinant()) > 1e-6);
}

TEST_CASE("rows realize the documented coefficient map") {
    // Multiplying the stacked monomial basis by the matrix must reproduce
    // p^{i+1} p1 and p^j p2 as polynomials.
    const CtPolynomial p1({1.0, 2.0});        // 2p + 1   (deg m = 1)
    const CtPolynomial p2({3.0, 0.0, 1.0});   // p^2 + 3  (deg n = 2)
    const int n = 2, m = 1;
    const Eigen::MatrixXd s = build_sylvester(p1, p2, n, m);
    const double x = 1.7;
    Eigen::VectorXd basis(n + m + 1);  // [p^{n+m}, ..., p, 1]
    for (int k = 0; k <= n + m; ++k) basis(k) = std::pow(x, n + m - k);
    const Eigen::VectorXd vals = s * basis;
    for (int i = 0; i < n; ++i) {
        CHECK(vals(i) == doctest::Approx(std::pow(x, i + 1) * p1(x)).epsilon(1e-12));
    }
    for (int j = 0; j <= m; ++j) {
        CHECK(vals(n + j) == doctest::Approx(std::pow(x, j) * p2(x)).epsilon(1e-12));
    }
}
