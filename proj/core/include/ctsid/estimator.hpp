#pragma once

#include "ctsid/hybrid_filter.hpp"
#include "ctsid/loop_sim.hpp"
#include "ctsid/polynomial.hpp"
#include "ctsid/stability.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace ctsid {

/**
 * Parameter vector theta = [a_1, ..., a_n, b_0, ..., b_m] of the model
 *   G(p) = (b_m p^m + ... + b_0) / (a_n p^n + ... + a_1 p + 1),
 * i.e. the denominator is anchored at unit constant term, so every
 * coefficient of theta is free.
 */
struct ThetaVector {
    Eigen::VectorXd a;  // size n; a(i) multiplies p^{i+1}
    Eigen::VectorXd b;  // size m+1; b(j) multiplies p^j

    int n() const { return static_cast<int>(a.size()); }
    int m() const { return static_cast<int>(b.size()) - 1; }

    Eigen::VectorXd stacked() const;
    static ThetaVector from_stacked(const Eigen::VectorXd& v, int n, int m);

    CtPolynomial a_poly() const;  // 1 + a_1 p + ... + a_n p^n
    CtPolynomial b_poly() const;
    CtTransferFunction to_tf() const;
    static ThetaVector from_tf(const CtTransferFunction& g, int n, int m);
};

enum class StabilityPolicy { reflect, abort };

struct EstimatorConfig {
    int n = 1;                  // denominator order
    int m = 0;                  // numerator order, m <= n
    bool oversampled = false;   // input regressor columns from the fast u track
    int max_iterations = 200;
    double rel_tol = 1e-7;      // stop when ||theta_{j+1}-theta_j||/||theta_j|| falls below
    HoldType hold = HoldType::zero_order;
    StabilityPolicy stability_policy = StabilityPolicy::reflect;
    double svf_cutoff = 0.0;    // initializer filter bandwidth (rad/s); <= 0 picks automatically
    double divergence_factor = 1e6;
};

/**
 * Which signal feeds the instrument filter bank
 * [-p B_j/A_j^2, ..., -p^n B_j/A_j^2, 1/A_j, ..., p^m/A_j]^T:
 *
 *  - model_output: the recorded input u itself (the bank then synthesizes
 *    noise-free model output derivatives from u).
 *  - reference_ct_sensitivity: the reference filtered through the model
 *    input sensitivity S_uo,j(p) = C(p)/(1 + G_j(p)C(p)) of a continuous
 *    controller loop.
 *  - reference_dt_sensitivity: the reference filtered through the discrete
 *    model input sensitivity S_uo,j(q) = C_d(q)/(1 + G_dj(q)C_d(q)) with
 *    G_dj the ZOH equivalent of the current model.
 */
enum class InstrumentKind { model_output, reference_ct_sensitivity, reference_dt_sensitivity };

struct Regressor {
    Eigen::MatrixXd phi;  // N x (n+m+1); columns [-p y_f .. -p^n y_f, u_f .. p^m u_f]
    Eigen::VectorXd y_f;  // (1/A_j) y
};

struct IterationInfo {
    double condition = 0.0;             // instrument-regressor normal matrix condition estimate
    double regressor_condition = 0.0;   // sigma_max/sigma_min of the regressor matrix
    double instrument_condition = 0.0;  // sigma_max/sigma_min of the instrument matrix
    double residual_rms = 0.0;          // rms of y_f - phi * theta_next
    double step_rel = 0.0;              // relative parameter step of this iteration
    bool filter_projected = false;       // A_j was reflected to get a stable filter
    bool sensitivity_projected = false;  // the model loop denominator was reflected
};

struct EstimationResult {
    ThetaVector theta;
    bool converged = false;
    int iterations = 0;
    std::vector<ThetaVector> history;  // initializer first; length iterations + 1
    std::vector<IterationInfo> info;   // length iterations
    std::string failure_reason;        // set when converged is false due to a numeric failure
};

// Least-squares state-variable-filter initializer: the regressor of
// build_regressor with A_j replaced by the fixed filter (p/lambda + 1)^n.
ThetaVector lssvf_init(const SampledRecord& rec, const EstimatorConfig& cfg);

// Applies the stability policy to a candidate filter denominator.
CtPolynomial stabilized_filter_poly(const CtPolynomial& a, StabilityPolicy policy,
                                    bool* projected = nullptr);

Regressor build_regressor(const SampledRecord& rec, const ThetaVector& theta,
                          const EstimatorConfig& cfg);

// Columns [-p^i b/a^2 z (i=1..n), p^j/a z (j=0..m)] assembled from two
// derivative banks, so every entry shares a single discretization of its
// filter chain.
Eigen::MatrixXd instrument_columns(const CtPolynomial& a, const CtPolynomial& b,
                                   const SampledSignal& z, int n, int m);

Eigen::MatrixXd build_instrument(const SampledRecord& rec, const ThetaVector& theta,
                                 const EstimatorConfig& cfg, InstrumentKind kind);

// As above, additionally reporting whether the sensitivity denominator had to
// be projected to a stable polynomial before filtering.
Eigen::MatrixXd build_instrument(const SampledRecord& rec, const ThetaVector& theta,
                                 const EstimatorConfig& cfg, InstrumentKind kind,
                                 bool* sensitivity_projected);

struct IvStep {
    ThetaVector theta;
    double condition = 0.0;
};

// Solves [sum phi_hat phi^T] theta = [sum phi_hat y_f] by pivoted LU with an
// SVD condition estimate; throws when the modified normal matrix is
// numerically singular (condition above 1e12).
IvStep iv_step(const Eigen::MatrixXd& phi_hat, const Regressor& reg, int n, int m);

// Full refined-instrument iteration from the LSSVF initializer.  Numeric
// failures inside the iteration (singular normal matrix, improper iterate,
// divergence) end the run with converged = false and a failure_reason;
// configuration errors throw.
EstimationResult estimate(const SampledRecord& rec, const EstimatorConfig& cfg, InstrumentKind kind);

std::string estimation_result_to_json(const EstimationResult& res);

}  // namespace ctsid
