#include "ctsid/hybrid_filter.hpp"

#include "ctsid/discretize.hpp"
#include "ctsid/linear_system.hpp"

#include <cmath>
#include <stdexcept>

namespace ctsid {

namespace {

void require_grid(const SampledSignal& x) {
    if (!(x.h > 0.0)) throw std::invalid_argument("sampled signal needs a positive sample period");
}

// Propagates the ZOH-discretized companion realization of 1/a and fills the
// bank rows, recording every `stride`-th step.  Returns rows 0..n (full set)
// so the caller can evaluate the self-consistency residual.
Eigen::MatrixXd bank_rows(const CtPolynomial& a, const std::vector<double>& u, double h_step,
                          int stride, size_t n_out) {
    const int n = a.degree();
    const double lead = a.leading_coeff();
    Eigen::MatrixXd rows(n + 1, static_cast<long>(n_out));
    if (n == 0) {
        for (size_t k = 0, o = 0; o < n_out; k += static_cast<size_t>(stride), ++o) {
            rows(0, static_cast<long>(o)) = u[k] / lead;
        }
        return rows;
    }

    // Companion realization of 1/(a_n p^n + ... + a_0): the chain state x
    // satisfies x_{i+1} = p^i x_1 and a_n * (p^i/a) u = x_{i+1}.
    Eigen::MatrixXd ac = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd bc = Eigen::MatrixXd::Zero(n, 1);
    for (int i = 0; i + 1 < n; ++i) ac(i, i + 1) = 1.0;
    for (int i = 0; i < n; ++i) ac(n - 1, i) = -a.coeff(i) / lead;
    bc(n - 1, 0) = 1.0;
    const StateSpaceModel dt = c2d_zoh_ss(
        StateSpaceModel(ac, bc, Eigen::MatrixXd::Zero(1, n), Eigen::MatrixXd::Zero(1, 1)), h_step);

    std::vector<double> ad(static_cast<size_t>(n) * n), bd(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) ad[static_cast<size_t>(i) * n + j] = dt.A(i, j);
    for (int i = 0; i < n; ++i) bd[static_cast<size_t>(i)] = dt.B(i, 0);

    std::vector<double> coeff(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) coeff[static_cast<size_t>(i)] = a.coeff(i);

    std::vector<double> x(static_cast<size_t>(n), 0.0), xn(static_cast<size_t>(n));
    size_t out = 0;
    const size_t total_steps = n_out == 0 ? 0 : (n_out - 1) * static_cast<size_t>(stride) + 1;
    for (size_t k = 0; k < total_steps; ++k) {
        const double uk = u[k];
        if (k % static_cast<size_t>(stride) == 0) {
            double top = uk;  // a_n row_n = u - sum_{i<n} a_i row_i
            for (int i = 0; i < n; ++i) {
                const double ri = x[static_cast<size_t>(i)] / lead;
                rows(i, static_cast<long>(out)) = ri;
                top -= coeff[static_cast<size_t>(i)] * ri;
            }
            rows(n, static_cast<long>(out)) = top / lead;
            ++out;
        }
        for (int i = 0; i < n; ++i) {
            double acc = bd[static_cast<size_t>(i)] * uk;
            const double* ar = ad.data() + static_cast<size_t>(i) * n;
            for (int j = 0; j < n; ++j) acc += ar[j] * x[static_cast<size_t>(j)];
            xn[static_cast<size_t>(i)] = acc;
        }
        x.swap(xn);
    }
    return rows;
}

DerivativeBank finish_bank(const CtPolynomial& a, Eigen::MatrixXd full_rows, double h_out,
                           const std::vector<double>& u, int stride, int max_order) {
    const int n = a.degree();
    const long n_out = full_rows.cols();
    double acc = 0.0;
    for (long k = 0; k < n_out; ++k) {
        double rec = -u[static_cast<size_t>(k) * static_cast<size_t>(stride)];
        for (int i = 0; i <= n; ++i) rec += a.coeff(i) * full_rows(i, k);
        acc += rec * rec;
    }
    DerivativeBank bank;
    bank.h = h_out;
    bank.residual_rms = n_out > 0 ? std::sqrt(acc / static_cast<double>(n_out)) : 0.0;
    bank.rows = full_rows.topRows(max_order + 1);
    return bank;
}

DerivativeBank make_bank(const CtPolynomial& a, const SampledSignal& x, int stride, int max_order) {
    const int n = a.degree();
    if (n < 0) throw std::invalid_argument("bank denominator is the zero polynomial");
    if (max_order < 0) max_order = n;
    if (max_order > n) {
        throw std::invalid_argument("bank order exceeds denominator degree: p^i/a would be improper");
    }
    require_grid(x);
    const size_t n_out = x.size() == 0 ? 0 : (x.size() - 1) / static_cast<size_t>(stride) + 1;
    Eigen::MatrixXd rows = bank_rows(a, x.values, x.h, stride, n_out);
    return finish_bank(a, std::move(rows), x.h * stride, x.values, stride, max_order);
}

}  // namespace

SampledSignal filter_sampled(const CtTransferFunction& g, const SampledSignal& x, HoldType hold) {
    require_grid(x);
    const StateSpaceModel ct = realize_ct(g);
    const StateSpaceModel dt =
        hold == HoldType::zero_order ? c2d_zoh_ss(ct, x.h) : c2d_foh_ss(ct, x.h);
    SampledSignal y;
    y.h = x.h;
    y.t0 = x.t0;
    y.values = dt_lsim(dt, x.values);
    return y;
}

DerivativeBank derivative_bank(const CtPolynomial& a, const SampledSignal& x, HoldType hold,
                               int max_order) {
    if (hold != HoldType::zero_order) {
        throw std::invalid_argument("derivative banks support zero-order hold only");
    }
    return make_bank(a, x, 1, max_order);
}

SampledSignal filter_fast_then_sample(const CtTransferFunction& g, const SampledSignal& x_fast,
                                      int m, HoldType hold) {
    if (m < 1) throw std::invalid_argument("oversampling factor must be >= 1");
    require_grid(x_fast);
    const StateSpaceModel ct = realize_ct(g);
    const StateSpaceModel dt =
        hold == HoldType::zero_order ? c2d_zoh_ss(ct, x_fast.h) : c2d_foh_ss(ct, x_fast.h);

    const int n = dt.order();
    SampledSignal y;
    y.h = x_fast.h * m;
    y.t0 = x_fast.t0;
    if (x_fast.size() == 0) return y;
    const size_t n_out = (x_fast.size() - 1) / static_cast<size_t>(m) + 1;
    y.values.resize(n_out);
    if (n == 0) {
        const double d = dt.D(0, 0);
        for (size_t o = 0; o < n_out; ++o) y.values[o] = d * x_fast.values[o * static_cast<size_t>(m)];
        return y;
    }
    std::vector<double> ad(static_cast<size_t>(n) * n), bv(static_cast<size_t>(n)), cv(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) ad[static_cast<size_t>(i) * n + j] = dt.A(i, j);
    for (int i = 0; i < n; ++i) bv[static_cast<size_t>(i)] = dt.B(i, 0);
    for (int i = 0; i < n; ++i) cv[static_cast<size_t>(i)] = dt.C(0, i);
    const double d = dt.D(0, 0);

    std::vector<double> x(static_cast<size_t>(n), 0.0), xn(static_cast<size_t>(n));
    const size_t total_steps = (n_out - 1) * static_cast<size_t>(m) + 1;
    size_t out = 0;
    for (size_t k = 0; k < total_steps; ++k) {
        const double uk = x_fast.values[k];
        if (k % static_cast<size_t>(m) == 0) {
            double yk = d * uk;
            for (int i = 0; i < n; ++i) yk += cv[static_cast<size_t>(i)] * x[static_cast<size_t>(i)];
            y.values[out++] = yk;
        }
        for (int i = 0; i < n; ++i) {
            double acc = bv[static_cast<size_t>(i)] * uk;
            const double* ar = ad.data() + static_cast<size_t>(i) * n;
            for (int j = 0; j < n; ++j) acc += ar[j] * x[static_cast<size_t>(j)];
            xn[static_cast<size_t>(i)] = acc;
        }
        x.swap(xn);
    }
    return y;
}

DerivativeBank derivative_bank_fast(const CtPolynomial& a, const SampledSignal& x_fast, int m,
                                    int max_order) {
    if (m < 1) throw std::invalid_argument("oversampling factor must be >= 1");
    return make_bank(a, x_fast, m, max_order);
}

}  // namespace ctsid
