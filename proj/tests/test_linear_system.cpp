#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "ctsid/linear_system.hpp"
#include "ctsid/transfer_function.hpp"
#include "oracles.hpp"

using namespace ctsid;

TEST_CASE("matrix exponential matches the Taylor-series oracle on random matrices") {
    std::mt19937 gen(11);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    for (int trial = 0; trial < 25; ++trial) {
        const int n = 1 + trial % 5;
        Eigen::MatrixXd a(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) a(i, j) = unif(gen);
        const Eigen::MatrixXd lib = matrix_exponential(a);
        const Eigen::MatrixXd ref = oracles::taylor_expm(a);
        CHECK((lib - ref).cwiseAbs().maxCoeff() < 1e-10 * std::max(1.0, ref.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("matrix exponential closed forms") {
    Eigen::MatrixXd nilpotent = Eigen::MatrixXd::Zero(2, 2);
    nilpotent(0, 1) = 3.0;
    const Eigen::MatrixXd e1 = matrix_exponential(nilpotent);
    CHECK(e1(0, 0) == doctest::Approx(1.0));
    CHECK(e1(0, 1) == doctest::Approx(3.0));
    CHECK(e1(1, 1) == doctest::Approx(1.0));

    Eigen::MatrixXd diag = Eigen::Vector2d(-1.0, 2.0).asDiagonal();
    const Eigen::MatrixXd e2 = matrix_exponential(diag);
    CHECK(e2(0, 0) == doctest::Approx(std::exp(-1.0)));
    CHECK(e2(1, 1) == doctest::Approx(std::exp(2.0)));
    CHECK(std::abs(e2(0, 1)) < 1e-14);
}

TEST_CASE("controllable canonical realizations reproduce the transfer function") {
    const CtTransferFunction g(CtPolynomial({0.5, -0.25}), CtPolynomial({1.0, 0.707, 0.5}));
    const StateSpaceModel ss = realize_ct(g);
    REQUIRE(ss.order() == 2);
    // (sI - A)^{-1} spot check through the resolvent at a few points.
    for (double s : {0.3, 1.7, -0.4}) {
        const Eigen::MatrixXd resolvent =
            (s * Eigen::MatrixXd::Identity(2, 2) - ss.A).inverse();
        const double val = (ss.C * resolvent * ss.B + ss.D)(0);
        CHECK(val == doctest::Approx(g(std::complex<double>(s, 0.0)).real()).epsilon(1e-10));
    }
}

TEST_CASE("biproper realization splits the feedthrough") {
    const CtTransferFunction g(CtPolynomial({1.0, -0.3}), CtPolynomial({1.0, 1.0}));
    const StateSpaceModel ss = realize_ct(g);
    CHECK(ss.D(0, 0) == doctest::Approx(-0.3));
    for (double s : {0.5, 2.0}) {
        const Eigen::MatrixXd resolvent =
            (s * Eigen::MatrixXd::Identity(ss.order(), ss.order()) - ss.A).inverse();
        const double val = (ss.C * resolvent * ss.B + ss.D)(0);
        CHECK(val == doctest::Approx(g(std::complex<double>(s, 0.0)).real()).epsilon(1e-10));
    }
}

TEST_CASE("dt_lsim equals the hand-rolled difference equation") {
    const DtTransferFunction g({0.4, 0.1}, {1.0, -0.5}, 0.1);  // (0.4q + 0.1)/(q - 0.5)
    const StateSpaceModel ss = realize_dt(g);
    std::vector<double> u = {1.0, 0.0, -2.0, 3.0, 0.5, 0.0, 0.0};
    const std::vector<double> y = dt_lsim(ss, u);
    // y[k] = 0.5 y[k-1] + 0.4 u[k] + 0.1 u[k-1]
    std::vector<double> ref(u.size(), 0.0);
    for (size_t k = 0; k < u.size(); ++k) {
        ref[k] = (k > 0 ? 0.5 * ref[k - 1] + 0.1 * u[k - 1] : 0.0) + 0.4 * u[k];
    }
    REQUIRE(y.size() == ref.size());
    for (size_t k = 0; k < y.size(); ++k) CHECK(y[k] == doctest::Approx(ref[k]).epsilon(1e-12));
}

TEST_CASE("characteristic polynomial matches companion construction") {
    const CtPolynomial den({2.0, 3.0, 1.0});  // x^2 + 3x + 2 = (x+1)(x+2)
    const CtTransferFunction g(CtPolynomial({1.0}), den);
    const StateSpaceModel ss = realize_ct(g);
    const std::vector<double> chi = characteristic_polynomial(ss.A);
    REQUIRE(chi.size() == 3);
    CHECK(chi[0] == doctest::Approx(1.0));
    CHECK(chi[1] == doctest::Approx(3.0));
    CHECK(chi[2] == doctest::Approx(2.0));
}

TEST_CASE("ss_to_dt_tf inverts realize_dt") {
    const DtTransferFunction g({0.2, -0.05}, {1.0, -1.3, 0.4}, 0.1);
    const DtTransferFunction back = ss_to_dt_tf(realize_dt(g), 0.1);
    for (double w : {0.3, 1.1, 2.9}) {
        const std::complex<double> z = std::polar(1.0, w);
        CHECK(std::abs(back(z) - g(z)) < 1e-9);
    }
}
