#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

#include "ctsid/estimator.hpp"
#include "ctsid/experiment.hpp"
#include "ctsid/loop_sim.hpp"
#include "ctsid/rng.hpp"

#include <nlohmann/json.hpp>

using namespace ctsid;

namespace {

SampledRecord quiet_setting2(int n_samples, uint64_t seed = 3, int oversample = 1) {
    ScenarioConfig cfg = preset_scenario("paper-setting2");
    cfg.n_samples = n_samples;
    cfg.sigma_v2 = 0.0;
    cfg.oversample_m = oversample;
    cfg.seed = seed;
    return simulate(cfg);
}

EstimatorConfig model_2_1() {
    EstimatorConfig cfg;
    cfg.n = 2;
    cfg.m = 1;
    return cfg;
}

ThetaVector truth_2_1() {
    return ThetaVector::from_tf(preset_scenario("paper-setting2").plant, 2, 1);
}

}  // namespace

TEST_CASE("theta vector round-trips and anchors the denominator") {
    const ThetaVector t = truth_2_1();
    CHECK(t.a(0) == doctest::Approx(0.707));
    CHECK(t.a(1) == doctest::Approx(0.5));
    CHECK(t.b(0) == doctest::Approx(0.5));
    CHECK(t.b(1) == doctest::Approx(-0.25));
    CHECK(t.a_poly().constant_term() == 1.0);

    const ThetaVector back = ThetaVector::from_stacked(t.stacked(), 2, 1);
    CHECK((back.stacked() - t.stacked()).norm() == 0.0);
    CHECK_THROWS_AS(ThetaVector::from_stacked(t.stacked(), 3, 1), std::invalid_argument);

    // Degrees above the requested orders and non-anchored denominators are rejected.
    const CtTransferFunction plant = preset_scenario("paper-setting2").plant;
    CHECK_THROWS_AS(ThetaVector::from_tf(plant, 1, 1), std::invalid_argument);
    const CtTransferFunction integrator(CtPolynomial({1.0}), CtPolynomial({0.0, 1.0}));
    CHECK_THROWS_AS(ThetaVector::from_tf(integrator, 1, 0), std::invalid_argument);

    // Zero padding is allowed when the true orders are lower.
    const ThetaVector padded = ThetaVector::from_tf(plant, 3, 2);
    CHECK(padded.a(2) == 0.0);
    CHECK(padded.b(2) == 0.0);
}

TEST_CASE("configuration errors throw instead of failing softly") {
    const SampledRecord rec = quiet_setting2(100);
    EstimatorConfig cfg = model_2_1();
    cfg.m = 3;  // m > n
    CHECK_THROWS_AS(estimate(rec, cfg, InstrumentKind::model_output), std::invalid_argument);
    cfg = model_2_1();
    cfg.n = 0;
    CHECK_THROWS_AS(estimate(rec, cfg, InstrumentKind::model_output), std::invalid_argument);
    cfg = model_2_1();
    cfg.oversampled = true;  // record has no fast track
    CHECK_THROWS_AS(estimate(rec, cfg, InstrumentKind::model_output), std::invalid_argument);
    cfg = model_2_1();
    CHECK_THROWS_AS(estimate(rec, cfg, InstrumentKind::reference_ct_sensitivity),
                    std::invalid_argument);

    const SampledRecord tiny = quiet_setting2(6);
    CHECK_THROWS_AS(estimate(tiny, model_2_1(), InstrumentKind::model_output),
                    std::invalid_argument);
}

TEST_CASE("filter stabilization projects exactly when needed") {
    const CtPolynomial stable({1.0, 0.707, 0.5});
    bool projected = true;
    const CtPolynomial same = stabilized_filter_poly(stable, StabilityPolicy::reflect, &projected);
    CHECK_FALSE(projected);
    CHECK(same == stable);

    const CtPolynomial unstable({1.0, -1.0});  // root at +1
    const CtPolynomial fixed = stabilized_filter_poly(unstable, StabilityPolicy::reflect, &projected);
    CHECK(projected);
    CHECK(stability_check(fixed, Domain::continuous).stable);
    CHECK_THROWS_AS(stabilized_filter_poly(unstable, StabilityPolicy::abort), std::runtime_error);
}

TEST_CASE("noise-free closed-loop data is recovered exactly") {
    const SampledRecord rec = quiet_setting2(500);
    const ThetaVector truth = truth_2_1();
    for (const InstrumentKind kind :
         {InstrumentKind::model_output, InstrumentKind::reference_dt_sensitivity}) {
        const EstimationResult res = estimate(rec, model_2_1(), kind);
        CHECK(res.converged);
        CHECK(res.iterations <= 20);
        CHECK((res.theta.stacked() - truth.stacked()).cwiseAbs().maxCoeff() < 1e-6);
        for (const auto& info : res.info) {
            CHECK(info.regressor_condition >= 1.0);
            CHECK(info.instrument_condition >= 1.0);
            CHECK(info.condition >= 1.0);
        }
    }
}

TEST_CASE("the true parameters are a fixed point of the refinement step") {
    const SampledRecord rec = quiet_setting2(800);
    const EstimatorConfig cfg = model_2_1();
    const ThetaVector truth = truth_2_1();
    const Regressor reg = build_regressor(rec, truth, cfg);

    // With a held input and the shared-discretization banks the equation
    // error vanishes identically at the truth, not just in the mean.
    const Eigen::VectorXd resid = reg.y_f - reg.phi * truth.stacked();
    CHECK(resid.cwiseAbs().maxCoeff() < 1e-9);

    for (const InstrumentKind kind :
         {InstrumentKind::model_output, InstrumentKind::reference_dt_sensitivity}) {
        const Eigen::MatrixXd phi_hat = build_instrument(rec, truth, cfg, kind);
        const IvStep step = iv_step(phi_hat, reg, cfg.n, cfg.m);
        CHECK((step.theta.stacked() - truth.stacked()).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("the initializer lands inside the basin of the truth") {
    const SampledRecord rec = quiet_setting2(4000);
    const ThetaVector init = lssvf_init(rec, model_2_1());
    const ThetaVector truth = truth_2_1();
    const double rel = (init.stacked() - truth.stacked()).norm() / truth.stacked().norm();
    CHECK(rel < 0.25);
}

TEST_CASE("a genuinely held input makes the fast path redundant") {
    // The discrete-loop actuator holds u, so stride-m banks on the fast track
    // see the same continuous signal and the estimates must coincide.
    const SampledRecord rec = quiet_setting2(400, 17, 3);
    REQUIRE(rec.u_fast.has_value());
    EstimatorConfig cfg = model_2_1();
    const EstimationResult slow = estimate(rec, cfg, InstrumentKind::model_output);
    cfg.oversampled = true;
    const EstimationResult fast = estimate(rec, cfg, InstrumentKind::model_output);
    REQUIRE(slow.converged);
    REQUIRE(fast.converged);
    CHECK((slow.theta.stacked() - fast.theta.stacked()).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("sensitivity instruments never look at the noisy signals") {
    ScenarioConfig cfg = preset_scenario("paper-setting2");
    cfg.n_samples = 300;
    cfg.seed = 23;
    const SampledRecord rec = simulate(cfg);
    SampledRecord tampered = rec;
    for (auto& v : tampered.y.values) v += 0.5;
    for (auto& v : tampered.u.values) v -= 0.25;
    const ThetaVector truth = truth_2_1();
    const Eigen::MatrixXd a =
        build_instrument(rec, truth, model_2_1(), InstrumentKind::reference_dt_sensitivity);
    const Eigen::MatrixXd b =
        build_instrument(tampered, truth, model_2_1(), InstrumentKind::reference_dt_sensitivity);
    CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("numeric failures are reported, not thrown") {
    // Zero reference: the sensitivity instrument is identically zero and the
    // modified normal matrix is singular.
    ScenarioConfig cfg = preset_scenario("paper-setting2");
    cfg.n_samples = 200;
    cfg.sigma_r2 = 0.0;
    cfg.sigma_v2 = 0.01;
    const EstimationResult res =
        estimate(simulate(cfg), model_2_1(), InstrumentKind::reference_dt_sensitivity);
    CHECK_FALSE(res.converged);
    CHECK_FALSE(res.failure_reason.empty());

    // Identically zero output: no initializer bandwidth exists.
    cfg.sigma_v2 = 0.0;
    const EstimationResult dead = estimate(simulate(cfg), model_2_1(), InstrumentKind::model_output);
    CHECK_FALSE(dead.converged);
    CHECK_FALSE(dead.failure_reason.empty());
}

TEST_CASE("the refinement step solves the instrumented normal equations") {
    const CounterRng rng(555);
    const int rows = 500, dim = 4;
    Regressor reg;
    reg.phi.resize(rows, dim);
    reg.y_f.resize(rows);
    uint64_t c = 0;
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < dim; ++j) reg.phi(i, j) = rng.gaussian(c++);
        reg.y_f(i) = rng.gaussian(c++);
    }
    const IvStep step = iv_step(reg.phi, reg, 2, 1);
    const Eigen::VectorXd ls = reg.phi.householderQr().solve(reg.y_f);
    CHECK((step.theta.stacked() - ls).cwiseAbs().maxCoeff() < 1e-10);

    Regressor short_reg = reg;
    short_reg.phi = reg.phi.topRows(100);
    CHECK_THROWS_AS(iv_step(reg.phi, short_reg, 2, 1), std::invalid_argument);
}

TEST_CASE("estimation results serialize with full iteration diagnostics") {
    const EstimationResult res =
        estimate(quiet_setting2(300), model_2_1(), InstrumentKind::model_output);
    REQUIRE(res.converged);
    const nlohmann::json j = nlohmann::json::parse(estimation_result_to_json(res));
    CHECK(j.at("converged").get<bool>());
    CHECK(j.at("iterations").get<int>() == res.iterations);
    CHECK(j.at("theta").at("a").size() == 2);
    CHECK(j.at("theta").at("b").size() == 2);
    REQUIRE(j.at("info").size() == static_cast<size_t>(res.iterations));
    CHECK(j.at("info").at(0).at("regressor_condition").get<double>() >= 1.0);
    CHECK(j.at("info").at(0).at("instrument_condition").get<double>() >= 1.0);
    CHECK(j.at("history").size() == static_cast<size_t>(res.iterations) + 1);
}
