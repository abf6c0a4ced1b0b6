#include "ctsid/diagnostics.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "ctsid/discretize.hpp"
#include "ctsid/hybrid_filter.hpp"
#include "ctsid/linear_system.hpp"
#include "ctsid/stability.hpp"

namespace ctsid {

namespace {

// Column sum_l poly[l] * bank.row(shift + l), i.e. (p^shift * poly / den) x
// for a bank built over den.
Eigen::VectorXd combined_column(const DerivativeBank& bank, const CtPolynomial& poly, int shift) {
    Eigen::VectorXd col = Eigen::VectorXd::Zero(bank.rows.cols());
    for (int l = 0; l <= poly.degree(); ++l) col += poly.coeff(l) * bank.rows.row(shift + l).transpose();
    return col;
}

SampledSignal dt_filter(const DtTransferFunction& g, const SampledSignal& x) {
    SampledSignal out;
    out.values = dt_lsim(realize_dt(g), x.values);
    out.h = x.h;
    out.t0 = x.t0;
    return out;
}

SampledSignal signal_like(const SampledSignal& proto, std::vector<double> values) {
    SampledSignal out;
    out.values = std::move(values);
    out.h = proto.h;
    out.t0 = proto.t0;
    return out;
}

struct DtSensitivities {
    DtTransferFunction g_d;    // sampled true plant
    DtTransferFunction s_uo;   // C_d/(1 + G_d C_d)
    DtTransferFunction s_o;    // 1/(1 + G_d C_d)
};

DtSensitivities dt_loop_sensitivities(const CtTransferFunction& plant,
                                      const DtTransferFunction& cd, double h) {
    const DtTransferFunction gd = c2d_zoh(plant, h);
    const std::vector<double> den_cl =
        poly_add(poly_mul(gd.den(), cd.den()), poly_mul(gd.num(), cd.num()));
    return DtSensitivities{gd,
                           DtTransferFunction(poly_mul(cd.num(), gd.den()), den_cl, h),
                           DtTransferFunction(poly_mul(cd.den(), gd.den()), den_cl, h)};
}

NormalMatrixDecomposition finish(const Eigen::MatrixXd& inst, const Eigen::MatrixXd& main_right,
                                 const Eigen::MatrixXd& pert_right, double n_samples,
                                 const Eigen::MatrixXd& main_extra, const Eigen::MatrixXd& pert_extra) {
    NormalMatrixDecomposition d;
    d.main_term = inst.transpose() * main_right / n_samples + main_extra;
    d.perturbation = inst.transpose() * pert_right / n_samples + pert_extra;
    d.sigma_min_main = Eigen::JacobiSVD<Eigen::MatrixXd>(d.main_term).singularValues().minCoeff();
    d.norm_perturbation =
        Eigen::JacobiSVD<Eigen::MatrixXd>(d.perturbation).singularValues().maxCoeff();
    d.dominant = d.norm_perturbation < d.sigma_min_main;
    return d;
}

}  // namespace

double impulse_response_l1(const CtTransferFunction& g, double tail_tol) {
    if (!g.strictly_proper()) {
        throw std::invalid_argument("impulse-response norm requires a strictly proper transfer function");
    }
    const StabilityReport rep = stability_check(g.den(), Domain::continuous);
    if (!rep.stable || rep.marginal) {
        throw std::invalid_argument("impulse-response norm requires an asymptotically stable transfer function");
    }
    if (!(tail_tol > 0.0)) throw std::invalid_argument("tail tolerance must be positive");

    const StateSpaceModel ss = realize_ct(g);
    const Eigen::EigenSolver<Eigen::MatrixXd> es(ss.A);
    if (es.info() != Eigen::Success) throw std::runtime_error("eigenvalue computation failed");
    const Eigen::VectorXcd lam = es.eigenvalues();
    const Eigen::MatrixXcd v = es.eigenvectors();

    double slow = std::numeric_limits<double>::infinity();
    double fast = 0.0;
    for (long i = 0; i < lam.size(); ++i) {
        slow = std::min(slow, -lam(i).real());
        fast = std::max(fast, std::abs(lam(i)));
    }

    // Modal residues w_i of g(t) = sum_i w_i exp(l_i t).
    bool modal_ok = true;
    Eigen::VectorXcd w;
    {
        const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(v);
        const double smin = svd.singularValues().minCoeff();
        const double smax = svd.singularValues().maxCoeff();
        if (smin <= smax * 1e-10) {
            modal_ok = false;
        } else {
            const Eigen::RowVectorXcd cv = ss.C.cast<std::complex<double>>() * v;
            const Eigen::VectorXcd vb = v.partialPivLu().solve(ss.B.cast<std::complex<double>>());
            w = cv.transpose().cwiseProduct(vb);
        }
    }
    auto modal_tail = [&](double T) {
        double tail = 0.0;
        for (long i = 0; i < lam.size(); ++i) {
            tail += std::abs(w(i)) * std::exp(lam(i).real() * T) / (-lam(i).real());
        }
        return tail;
    };

    double horizon = 8.0 / slow;
    if (modal_ok) {
        int doublings = 0;
        while (modal_tail(horizon) > tail_tol) {
            horizon *= 2.0;
            if (++doublings > 60) throw std::runtime_error("impulse-response tail failed to decay");
        }
    }

    const double dt = std::min(1.0 / (64.0 * fast), horizon / 4096.0);
    const Eigen::MatrixXd step = matrix_exponential(ss.A * dt);
    Eigen::VectorXd x = ss.B.col(0);
    double total = 0.0;
    double prev = std::abs((ss.C * x)(0));
    double block = 0.0;
    int quiet_blocks = 0;
    const long steps_per_block = std::max<long>(1, static_cast<long>(std::llround(horizon / dt)));
    for (long k = 1;; ++k) {
        x = step * x;
        const double cur = std::abs((ss.C * x)(0));
        const double piece = 0.5 * (prev + cur) * dt;
        total += piece;
        block += piece;
        prev = cur;
        if (modal_ok) {
            if (k >= steps_per_block) break;
        } else {
            // Without a trustworthy modal bound, stop after two consecutive
            // quiet blocks of the nominal horizon length.
            if (k % steps_per_block == 0) {
                quiet_blocks = (block < tail_tol) ? quiet_blocks + 1 : 0;
                block = 0.0;
                if (quiet_blocks >= 2) break;
                if (k / steps_per_block > 64) {
                    throw std::runtime_error("impulse-response tail failed to decay");
                }
            }
        }
    }
    return total;
}

double hold_reconstruction_error_bound(const CtTransferFunction& g_bar, const SampledSignal& x) {
    if (x.size() < 2) throw std::invalid_argument("slope bound needs at least two samples");
    const double l1 = impulse_response_l1(g_bar);
    double max_diff = 0.0;
    for (size_t k = 0; k + 1 < x.size(); ++k) {
        max_diff = std::max(max_diff, std::abs(x.values[k + 1] - x.values[k]));
    }
    const double slope = max_diff / x.h;
    return l1 * x.h * slope;
}

NormalMatrixDecomposition normal_matrix_decomposition(const SampledRecord& rec,
                                                      const ThetaVector& theta,
                                                      const EstimatorConfig& cfg,
                                                      InstrumentKind kind) {
    const int n = cfg.n, m = cfg.m;
    const double n_samples = static_cast<double>(rec.r.size());
    const CtPolynomial a_proj =
        stabilized_filter_poly(theta.a_poly(), cfg.stability_policy);
    const CtTransferFunction& plant = rec.config.plant;
    const SampledRecord nf = simulate_noise_free(rec.config);
    const Eigen::MatrixXd zeros_extra = Eigen::MatrixXd::Zero(n + m + 1, n + m + 1);

    if (kind == InstrumentKind::reference_ct_sensitivity) {
        if (!rec.config.has_ct_controller()) {
            throw std::invalid_argument(
                "reference_ct_sensitivity instrument requires a record with a continuous controller");
        }
        const auto& c = std::get<CtTransferFunction>(rec.config.controller);
        // Loop polynomials: T_o = B*F/D_cl, S_uo = F A*/D_cl.
        const CtPolynomial d_cl = plant.den() * c.den() + plant.num() * c.num();
        const CtPolynomial big_den = a_proj * d_cl;
        const CtPolynomial num_t = plant.num() * c.num();
        const CtPolynomial num_s = c.num() * plant.den();
        const int max_row = std::max(n + num_t.degree(), m + num_s.degree());
        const DerivativeBank bank_d = derivative_bank(big_den, rec.r, HoldType::zero_order, max_row);
        const DerivativeBank bank_ynf = derivative_bank(a_proj, nf.y, HoldType::zero_order, n);

        Eigen::MatrixXd tilde(static_cast<long>(rec.r.size()), n + m + 1);
        Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(static_cast<long>(rec.r.size()), n + m + 1);
        for (int i = 1; i <= n; ++i) {
            const Eigen::VectorXd smooth = combined_column(bank_d, num_t, i);
            tilde.col(i - 1) = -smooth;
            delta.col(i - 1) = smooth - bank_ynf.rows.row(i).transpose();
        }
        for (int j = 0; j <= m; ++j) tilde.col(n + j) = combined_column(bank_d, num_s, j);

        const Eigen::MatrixXd inst =
            build_instrument(rec, theta, cfg, InstrumentKind::reference_ct_sensitivity);
        return finish(inst, tilde, delta, n_samples, zeros_extra, zeros_extra);
    }

    if (!rec.config.has_ct_controller()) {
        const auto& cd = std::get<DtTransferFunction>(rec.config.controller);
        const DtSensitivities sens = dt_loop_sensitivities(plant, cd, rec.r.h);
        const SampledSignal r_tilde = dt_filter(sens.s_uo, rec.r);

        // Reference-driven parts share the banks over a_proj * A* and a_proj.
        const CtPolynomial big_den = a_proj * plant.den();
        const DerivativeBank bank_aa =
            derivative_bank(big_den, r_tilde, HoldType::zero_order, n + plant.num_degree());
        const DerivativeBank bank_r = derivative_bank(a_proj, r_tilde, HoldType::zero_order,
                                                      std::max(n, m));
        const SampledSignal w = dt_filter(sens.g_d, r_tilde);
        const DerivativeBank bank_w = derivative_bank(a_proj, w, HoldType::zero_order, n);

        const long len = static_cast<long>(rec.r.size());
        Eigen::MatrixXd tilde(len, n + m + 1);
        Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(len, n + m + 1);
        for (int i = 1; i <= n; ++i) {
            const Eigen::VectorXd smooth = combined_column(bank_aa, plant.num(), i);
            tilde.col(i - 1) = -smooth;
            delta.col(i - 1) = smooth - bank_w.rows.row(i).transpose();
        }
        for (int j = 0; j <= m; ++j) tilde.col(n + j) = bank_r.rows.row(j).transpose();

        if (kind == InstrumentKind::reference_dt_sensitivity) {
            const Eigen::MatrixXd inst =
                build_instrument(rec, theta, cfg, InstrumentKind::reference_dt_sensitivity);
            return finish(inst, tilde, delta, n_samples, zeros_extra, zeros_extra);
        }

        // model_output instrument: noise enters both sides.  The disturbance
        // contributions come straight off the record: S_o v = y - y_nf and
        // S_uo v = (S_uo r) - u.
        std::vector<double> so_v(rec.y.values);
        std::vector<double> suo_v(r_tilde.values);
        for (size_t k = 0; k < so_v.size(); ++k) {
            so_v[k] -= nf.y.values[k];
            suo_v[k] -= rec.u.values[k];
        }
        const SampledSignal s_sig = signal_like(rec.y, std::move(so_v));
        const SampledSignal v_tilde = signal_like(rec.y, std::move(suo_v));

        const DerivativeBank bank_s = derivative_bank(a_proj, s_sig, HoldType::zero_order, n);
        const DerivativeBank bank_vt = derivative_bank(a_proj, v_tilde, HoldType::zero_order, m);
        Eigen::MatrixXd v1 = Eigen::MatrixXd::Zero(len, n + m + 1);
        Eigen::MatrixXd v2 = Eigen::MatrixXd::Zero(len, n + m + 1);
        for (int i = 1; i <= n; ++i) v1.col(i - 1) = bank_s.rows.row(i).transpose();
        for (int j = 0; j <= m; ++j) v2.col(n + j) = bank_vt.rows.row(j).transpose();

        const CtPolynomial b_model = theta.b_poly();
        const Eigen::MatrixXd inst_r = instrument_columns(a_proj, b_model, r_tilde, n, m);
        Eigen::MatrixXd vhat1 = instrument_columns(a_proj, b_model, v_tilde, n, m);
        vhat1.rightCols(m + 1).setZero();

        const Eigen::MatrixXd main_extra = v2.transpose() * v2 / n_samples;
        const Eigen::MatrixXd pert_extra =
            (vhat1.transpose() * (v1 + v2) + v2.transpose() * v1) / n_samples;
        return finish(inst_r, tilde, delta, n_samples, main_extra, pert_extra);
    }

    throw std::invalid_argument(
        kind == InstrumentKind::reference_dt_sensitivity
            ? "reference_dt_sensitivity instrument requires a record with a discrete controller"
            : "the model_output instrument with a continuous controller has no dominance "
              "decomposition; use the reference_ct_sensitivity instrument");
}

double controller_inverse_bias_metric(const CtTransferFunction& model,
                                      const CtTransferFunction& true_plant,
                                      const DtTransferFunction& controller, double h) {
    const DtTransferFunction hd = c2d_zoh(model, h);
    const DtTransferFunction gd = c2d_zoh(true_plant, h);
    double acc_plant = 0.0, acc_inv = 0.0;
    int used = 0;
    const int grid = 512;
    for (int k = 0; k < grid; ++k) {
        const double omega = M_PI * (2.0 * k + 1.0) / (2.0 * grid);
        const std::complex<double> z = std::polar(1.0, omega);
        const std::complex<double> hv = hd(z);
        const std::complex<double> gv = gd(z);
        const std::complex<double> cv = controller(z);
        const double d_plant = std::abs(hv - gv);
        const double d_inv = std::abs(hv + 1.0 / cv);
        if (!std::isfinite(d_plant) || !std::isfinite(d_inv)) continue;
        acc_plant += d_plant * d_plant;
        acc_inv += d_inv * d_inv;
        ++used;
    }
    if (used == 0) throw std::runtime_error("bias metric is undefined: no finite grid points");
    const double dist_plant = std::sqrt(acc_plant / used);
    const double dist_inv = std::sqrt(acc_inv / used);
    if (dist_plant + dist_inv == 0.0) return 0.0;
    return dist_plant / (dist_plant + dist_inv);
}

}  // namespace ctsid
