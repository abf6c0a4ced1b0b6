#pragma once

#include <Eigen/Dense>

#include "ctsid/estimator.hpp"
#include "ctsid/loop_sim.hpp"
#include "ctsid/transfer_function.hpp"

namespace ctsid {

// Integral of |g(t)| over [0, inf) for a strictly proper, asymptotically
// stable transfer function.  The horizon is extended until the modal tail
// bound sum_i |w_i| exp(Re(l_i) T)/|Re(l_i)| drops below tail_tol.
double impulse_response_l1(const CtTransferFunction& g, double tail_tol = 1e-8);

// Upper bound on |g_bar applied to the hold-reconstruction error of x|:
// ||g_bar||_1 * gap * max slope of x, where x samples a smooth signal on a
// uniform grid.  Shrinks proportionally with the grid spacing.
double hold_reconstruction_error_bound(const CtTransferFunction& g_bar, const SampledSignal& x);

// Empirical dominance decomposition of the modified normal matrix
// E{phi_hat phi^T}: a main term that must stay away from singularity and a
// perturbation term (hold-reconstruction errors plus, for the model-output
// instrument, noise cross terms) that must stay below its smallest singular
// value.
struct NormalMatrixDecomposition {
    Eigen::MatrixXd main_term;
    Eigen::MatrixXd perturbation;
    double sigma_min_main = 0.0;
    double norm_perturbation = 0.0;
    bool dominant = false;  // norm_perturbation < sigma_min_main
};

// Computes the decomposition for the given instrument at the model theta.
// Requires the record's scenario config (true plant and controller) so the
// disturbance-free parts can be reconstructed exactly.  The model_output
// instrument is only analyzable against a discrete controller.
NormalMatrixDecomposition normal_matrix_decomposition(const SampledRecord& rec,
                                                      const ThetaVector& theta,
                                                      const EstimatorConfig& cfg,
                                                      InstrumentKind kind);

// Normalized frequency-domain distance of the sampled equivalent of `model`
// toward the negative controller inverse: 0 when it matches the sampled true
// plant, 1 when it matches -1/C_d.  Evaluated on a midpoint unit-circle grid.
double controller_inverse_bias_metric(const CtTransferFunction& model,
                                      const CtTransferFunction& true_plant,
                                      const DtTransferFunction& controller, double h);

}  // namespace ctsid
