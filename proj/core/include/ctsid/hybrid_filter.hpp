#pragma once

#include "ctsid/polynomial.hpp"
#include "ctsid/signal.hpp"
#include "ctsid/transfer_function.hpp"

#include <Eigen/Dense>

namespace ctsid {

enum class HoldType { zero_order, first_order };

/**
 * Mixed-notation filtering G(p)x(t_k): reconstruct x between samples with
 * the hold, apply the continuous filter, sample the result back on the same
 * grid.  Realized exactly as the hold-equivalent discrete filter at period
 * x.h, so the result is exact whenever the underlying signal really is
 * hold-reconstructed.
 */
SampledSignal filter_sampled(const CtTransferFunction& g, const SampledSignal& x,
                             HoldType hold = HoldType::zero_order);

/**
 * Time-derivative filter bank {p^i / a(p)} x(t_k) for i = 0..max_order,
 * max_order <= deg a.  All rows come from a single zero-order-hold
 * discretization of one companion realization of 1/a(p); the top row
 * (i = deg a, a biproper member) is recovered from the state identity
 *   a_n row_n = x - sum_{i<n} a_i row_i,
 * so the bank satisfies its defining relation sum_i a_i row_i = x at the
 * sample instants to roundoff.  residual_rms reports that defect.
 */
struct DerivativeBank {
    Eigen::MatrixXd rows;  // (max_order+1) x N, row i = {p^i/a} x
    double h = 0.0;
    double residual_rms = 0.0;
};

DerivativeBank derivative_bank(const CtPolynomial& a, const SampledSignal& x,
                               HoldType hold = HoldType::zero_order, int max_order = -1);

// Fast-grid variants: run the filter at period x_fast.h and keep every m-th
// output sample.  The decimation is streamed, the fast output is never
// materialized.
SampledSignal filter_fast_then_sample(const CtTransferFunction& g, const SampledSignal& x_fast,
                                      int m, HoldType hold = HoldType::zero_order);
DerivativeBank derivative_bank_fast(const CtPolynomial& a, const SampledSignal& x_fast, int m,
                                    int max_order = -1);

}  // namespace ctsid
