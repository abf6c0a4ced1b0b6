#include <doctest.h>

#include <cmath>
#include <complex>

#include "ctsid/discretize.hpp"
#include "ctsid/linear_system.hpp"
#include "oracles.hpp"

using namespace ctsid;

TEST_CASE("zero-order hold closed forms at h = 0.1") {
    const double h = 0.1;
    SUBCASE("integrator 1/p -> h/(q-1)") {
        const DtTransferFunction d = c2d_zoh(CtTransferFunction(CtPolynomial({1.0}), CtPolynomial({0.0, 1.0})), h);
        REQUIRE(d.den().size() == 2);
        CHECK(d.den()[0] == doctest::Approx(1.0));
        CHECK(d.den()[1] == doctest::Approx(-1.0).epsilon(1e-12));
        const double b = d.num().back();
        CHECK(b == doctest::Approx(0.1).epsilon(1e-12));
        CHECK(d.num_degree() < d.den_degree());
    }
    SUBCASE("first-order lag 1/(p+1) -> (1-e^{-h})/(q-e^{-h})") {
        const DtTransferFunction d = c2d_zoh(CtTransferFunction(CtPolynomial({1.0}), CtPolynomial({1.0, 1.0})), h);
        const double a = std::exp(-h);
        CHECK(d.den()[1] == doctest::Approx(-a).epsilon(1e-12));
        CHECK(d.num().back() == doctest::Approx(1.0 - a).epsilon(1e-12));
    }
    SUBCASE("gain with damped numerator") {
        // 2/(p+3): pole e^{-0.3}, DC gain preserved at 2/3.
        const DtTransferFunction d = c2d_zoh(CtTransferFunction(CtPolynomial({2.0}), CtPolynomial({3.0, 1.0})), h);
        CHECK(d.den()[1] == doctest::Approx(-std::exp(-0.3)).epsilon(1e-12));
        CHECK(d.dc_gain() == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    }
}

TEST_CASE("every continuous pole maps to e^{ph} and DC gain is preserved") {
    // The discrete denominator must vanish at e^{ph} for every continuous
    // pole p.  Evaluating the polynomial there avoids a discrete root solve,
    // whose own eigenvalue error would otherwise dominate the budget.
    for (int trial = 0; trial < 40; ++trial) {
        const CtPolynomial den = oracles::random_poly(2 + trial % 3, true);
        const CtPolynomial num = oracles::random_poly(1, true);
        const double h = 0.05 + 0.01 * (trial % 7);
        const CtTransferFunction g(num, den);
        const DtTransferFunction d = c2d_zoh(g, h);
        REQUIRE(d.den_degree() == den.degree());
        double scale = 0.0;
        for (double c : d.den()) scale += std::abs(c);
        for (const auto& p : g.poles()) {
            const std::complex<double> zp = std::exp(p * h);
            std::complex<double> val = 0.0;
            for (double c : d.den()) val = val * zp + c;
            CHECK(std::abs(val) < 1e-10 * scale);
        }
        // Slightly looser than the pole check: random near-integrating
        // systems make the gain evaluation itself ill-conditioned.
        CHECK(d.dc_gain() == doctest::Approx(g.dc_gain()).epsilon(1e-9));
    }
}

TEST_CASE("ZOH equivalence: discrete filter equals RK4 of the held input") {
    const CtTransferFunction g(CtPolynomial({0.5, -0.25}), CtPolynomial({1.0, 0.707, 0.5}));
    const double h = 0.1;
    const StateSpaceModel ct = realize_ct(g);
    const StateSpaceModel dt = c2d_zoh_ss(ct, h);
    std::vector<double> u(60);
    for (size_t k = 0; k < u.size(); ++k) u[k] = std::sin(0.37 * static_cast<double>(k)) + 0.2;
    const std::vector<double> via_dt = dt_lsim(dt, u);
    const std::vector<double> via_rk4 = oracles::rk4_held_response(ct, u, h, 400);
    for (size_t k = 0; k < u.size(); ++k) {
        CHECK(std::abs(via_dt[k] - via_rk4[k]) < 1e-8);
    }
}

TEST_CASE("ZOH state matrices satisfy their defining integrals") {
    Eigen::MatrixXd a(2, 2);
    a << -0.3, 1.0, -0.5, -0.9;
    const StateSpaceModel ct(a, Eigen::MatrixXd::Ones(2, 1), Eigen::MatrixXd::Ones(1, 2),
                             Eigen::MatrixXd::Zero(1, 1));
    const double h = 0.2;
    const StateSpaceModel dt = c2d_zoh_ss(ct, h);
    CHECK((dt.A - oracles::taylor_expm(a * h)).cwiseAbs().maxCoeff() < 1e-12);
    // Bd = int_0^h e^{As} ds B by fine midpoint quadrature.
    Eigen::MatrixXd bd = Eigen::MatrixXd::Zero(2, 1);
    const int steps = 20000;
    for (int i = 0; i < steps; ++i) {
        const double s = (i + 0.5) * h / steps;
        bd += oracles::taylor_expm(a * s) * ct.B * (h / steps);
    }
    CHECK((dt.B - bd).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("first-order hold reproduces piecewise-linear responses exactly") {
    // x' = -x + u with u(t) linear between samples: FOH discretization must
    // match the closed-form response of the ramp r(t) = t at the samples,
    // x(t) = t - 1 + e^{-t}.
    const CtTransferFunction g(CtPolynomial({1.0}), CtPolynomial({1.0, 1.0}));
    const double h = 0.25;
    const StateSpaceModel dt = c2d_foh_ss(realize_ct(g), h);
    std::vector<double> u(40);
    for (size_t k = 0; k < u.size(); ++k) u[k] = h * static_cast<double>(k);
    const std::vector<double> y = dt_lsim(dt, u);
    for (size_t k = 2; k < u.size(); ++k) {
        const double t = h * static_cast<double>(k);
        CHECK(y[k] == doctest::Approx(t - 1.0 + std::exp(-t)).epsilon(1e-9));
    }
}

TEST_CASE("pole aliasing is reported when two poles collapse") {
    // Poles at -1 +/- i*pi/h alias onto the same discrete pole magnitude/angle.
    const double h = 1.0;
    const double w = 2.0 * 3.14159265358979323846;  // full wheel: e^{iwh} = 1
    const CtPolynomial den = CtPolynomial::from_roots({{-1.0, w}, {-1.0, -w}, {-1.0, 0.0}});
    C2dInfo info;
    const DtTransferFunction d = c2d_zoh(CtTransferFunction(CtPolynomial({1.0}), den), h, &info);
    CHECK(info.pole_aliasing);
    (void)d;
}
