#pragma once

#include "ctsid/transfer_function.hpp"

#include <Eigen/Dense>

#include <vector>

namespace ctsid {

/**
 * Dense state-space model x' = Ax + Bu, y = Cx + Du (continuous) or
 * x[k+1] = Ax[k] + Bu[k], y[k] = Cx[k] + Du[k] (discrete).  The domain is
 * implied by how the model was produced; the struct itself only enforces
 * dimension consistency.
 */
struct StateSpaceModel {
    Eigen::MatrixXd A, B, C, D;

    StateSpaceModel(Eigen::MatrixXd a, Eigen::MatrixXd b, Eigen::MatrixXd c, Eigen::MatrixXd d);

    int order() const { return static_cast<int>(A.rows()); }
    int n_inputs() const { return static_cast<int>(B.cols()); }
    int n_outputs() const { return static_cast<int>(C.rows()); }
};

// Matrix exponential by scaling-and-squaring with a fixed Pade(13,13)
// approximant; deterministic to ~1e-12 for the well-scaled matrices used here.
Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& a);

// Controllable-canonical SISO realizations (feedthrough split off for
// biproper fractions).
StateSpaceModel realize_ct(const CtTransferFunction& g);
StateSpaceModel realize_dt(const DtTransferFunction& g);

// Monic characteristic polynomial, descending coefficients [1, c1, ..., cn],
// via the Faddeev-LeVerrier recursion.
std::vector<double> characteristic_polynomial(const Eigen::MatrixXd& a);

// SISO discrete state-space back to a transfer function at period h.
DtTransferFunction ss_to_dt_tf(const StateSpaceModel& ss, double h);

// Zero-initial-state propagation of a SISO discrete model over u.
std::vector<double> dt_lsim(const StateSpaceModel& ss, const std::vector<double>& u);

}  // namespace ctsid
