#include "ctsid/estimator.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ctsid/discretize.hpp"
#include "ctsid/linear_system.hpp"

namespace ctsid {

namespace {

void validate_record(const SampledRecord& rec) {
    if (rec.r.size() != rec.u.size() || rec.r.size() != rec.y.size()) {
        throw std::invalid_argument("record signals r, u, y must have equal length");
    }
    if (rec.r.size() == 0) throw std::invalid_argument("record is empty");
    if (!(rec.r.h > 0.0)) throw std::invalid_argument("record sample period must be positive");
}

void validate_config(const EstimatorConfig& cfg) {
    if (cfg.n < 1) throw std::invalid_argument("model denominator order n must be >= 1");
    if (cfg.m < 0 || cfg.m > cfg.n) {
        throw std::invalid_argument("model numerator order m must satisfy 0 <= m <= n");
    }
    if (cfg.max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
    if (!(cfg.rel_tol > 0.0)) throw std::invalid_argument("rel_tol must be positive");
    if (!(cfg.divergence_factor > 1.0)) throw std::invalid_argument("divergence_factor must exceed 1");
}

// Oversampling factor implied by the record grids.
int fast_factor(const SampledRecord& rec) {
    if (!rec.u_fast) {
        throw std::invalid_argument("oversampled estimator requires a fast input track (u_fast)");
    }
    const double ratio = rec.u.h / rec.u_fast->h;
    const int m = static_cast<int>(std::llround(ratio));
    if (m < 1 || std::abs(ratio - m) > 1e-6) {
        throw std::invalid_argument("fast input grid must subdivide the sample period integrally");
    }
    const size_t needed = (rec.u.size() - 1) * static_cast<size_t>(m) + 1;
    if (rec.u_fast->size() < needed) {
        throw std::invalid_argument("fast input track is shorter than the record requires");
    }
    return m;
}

CtPolynomial model_poly_checked(const ThetaVector& theta, int n) {
    CtPolynomial a = theta.a_poly();
    if (a.degree() != n) {
        throw std::runtime_error(
            "model denominator lost degree (leading coefficient vanished); derivative filters would be improper");
    }
    return a;
}

Regressor regressor_with_filter(const SampledRecord& rec, const CtPolynomial& a_filter,
                                const EstimatorConfig& cfg) {
    const int n = cfg.n, m = cfg.m;
    const size_t len = rec.r.size();

    const DerivativeBank y_bank = derivative_bank(a_filter, rec.y, HoldType::zero_order, n);
    DerivativeBank u_bank =
        cfg.oversampled
            ? derivative_bank_fast(a_filter, *rec.u_fast, fast_factor(rec), m)
            : derivative_bank(a_filter, rec.u, HoldType::zero_order, m);

    Regressor reg;
    reg.phi.resize(static_cast<long>(len), n + m + 1);
    for (int i = 1; i <= n; ++i) reg.phi.col(i - 1) = -y_bank.rows.row(i).transpose();
    for (int j = 0; j <= m; ++j) {
        reg.phi.col(n + j) = u_bank.rows.row(j).head(static_cast<long>(len)).transpose();
    }
    reg.y_f = y_bank.rows.row(0).transpose();
    return reg;
}

double condition_estimate(const Eigen::MatrixXd& m) {
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const double smin = svd.singularValues().minCoeff();
    const double smax = svd.singularValues().maxCoeff();
    if (!(smin > 0.0)) return std::numeric_limits<double>::infinity();
    return smax / smin;
}

std::vector<double> reversed(const std::vector<double>& v) {
    return std::vector<double>(v.rbegin(), v.rend());
}

}  // namespace

Eigen::VectorXd ThetaVector::stacked() const {
    Eigen::VectorXd out(a.size() + b.size());
    out << a, b;
    return out;
}

ThetaVector ThetaVector::from_stacked(const Eigen::VectorXd& v, int n, int m) {
    if (v.size() != n + m + 1) throw std::invalid_argument("stacked parameter size must be n+m+1");
    ThetaVector t;
    t.a = v.head(n);
    t.b = v.tail(m + 1);
    return t;
}

CtPolynomial ThetaVector::a_poly() const {
    std::vector<double> c(static_cast<size_t>(a.size()) + 1);
    c[0] = 1.0;
    for (long i = 0; i < a.size(); ++i) c[static_cast<size_t>(i) + 1] = a(i);
    return CtPolynomial(std::move(c));
}

CtPolynomial ThetaVector::b_poly() const {
    std::vector<double> c(static_cast<size_t>(b.size()));
    for (long j = 0; j < b.size(); ++j) c[static_cast<size_t>(j)] = b(j);
    return CtPolynomial(std::move(c));
}

CtTransferFunction ThetaVector::to_tf() const { return CtTransferFunction(b_poly(), a_poly()); }

ThetaVector ThetaVector::from_tf(const CtTransferFunction& g, int n, int m) {
    if (g.den_degree() > n || g.num_degree() > m) {
        throw std::invalid_argument("transfer function degrees exceed the requested model orders");
    }
    if (std::abs(g.den().constant_term() - 1.0) > 1e-12) {
        throw std::invalid_argument("denominator must be anchored at unit constant term");
    }
    ThetaVector t;
    t.a = Eigen::VectorXd::Zero(n);
    t.b = Eigen::VectorXd::Zero(m + 1);
    for (int i = 1; i <= n; ++i) t.a(i - 1) = g.den().coeff(i);
    for (int j = 0; j <= m; ++j) t.b(j) = g.num().coeff(j);
    return t;
}

CtPolynomial stabilized_filter_poly(const CtPolynomial& a, StabilityPolicy policy, bool* projected) {
    if (projected) *projected = false;
    const StabilityReport rep = stability_check(a, Domain::continuous);
    if (rep.stable || rep.trivial) return a;
    if (policy == StabilityPolicy::abort) {
        throw std::runtime_error("model filter denominator is unstable and the stability policy is abort");
    }
    if (projected) *projected = true;
    return reflect_unstable_roots(a, Domain::continuous);
}

ThetaVector lssvf_init(const SampledRecord& rec, const EstimatorConfig& cfg) {
    validate_record(rec);
    validate_config(cfg);
    const size_t len = rec.y.size();

    double lambda = cfg.svf_cutoff;
    if (!(lambda > 0.0)) {
        // Bandwidth from the output autocorrelation: the lag where it decays
        // by e gives a dominant time constant.
        double r0 = 0.0;
        for (double v : rec.y.values) r0 += v * v;
        r0 /= static_cast<double>(len);
        if (!(r0 > 0.0)) throw std::runtime_error("cannot pick an initializer bandwidth: output is identically zero");
        const size_t max_lag = std::max<size_t>(1, len / 4);
        size_t crossing = max_lag;
        for (size_t tau = 1; tau <= max_lag; ++tau) {
            double rt = 0.0;
            for (size_t k = 0; k + tau < len; ++k) rt += rec.y.values[k] * rec.y.values[k + tau];
            rt /= static_cast<double>(len);
            if (rt < r0 / 2.718281828459045) {
                crossing = tau;
                break;
            }
        }
        lambda = 1.0 / (static_cast<double>(crossing) * rec.y.h);
    }

    // SVF filter (p/lambda + 1)^n, unit constant term by construction.
    std::vector<double> lam(static_cast<size_t>(cfg.n) + 1, 0.0);
    double binom = 1.0;
    for (int k = 0; k <= cfg.n; ++k) {
        lam[static_cast<size_t>(k)] = binom / std::pow(lambda, k);
        binom = binom * static_cast<double>(cfg.n - k) / static_cast<double>(k + 1);
    }
    const Regressor reg = regressor_with_filter(rec, CtPolynomial(std::move(lam)), cfg);

    const Eigen::MatrixXd normal = reg.phi.transpose() * reg.phi;
    const double cond = condition_estimate(normal);
    if (!(cond < 1e12)) {
        std::ostringstream os;
        os << "initializer normal matrix is numerically singular (condition " << cond
           << "); check excitation and model orders";
        throw std::runtime_error(os.str());
    }
    const Eigen::VectorXd theta = normal.partialPivLu().solve(reg.phi.transpose() * reg.y_f);
    return ThetaVector::from_stacked(theta, cfg.n, cfg.m);
}

Regressor build_regressor(const SampledRecord& rec, const ThetaVector& theta,
                          const EstimatorConfig& cfg) {
    validate_record(rec);
    validate_config(cfg);
    const CtPolynomial a = stabilized_filter_poly(model_poly_checked(theta, cfg.n),
                                                  cfg.stability_policy);
    return regressor_with_filter(rec, a, cfg);
}

Eigen::MatrixXd build_instrument(const SampledRecord& rec, const ThetaVector& theta,
                                 const EstimatorConfig& cfg, InstrumentKind kind,
                                 bool* sensitivity_projected) {
    validate_record(rec);
    validate_config(cfg);
    if (sensitivity_projected) *sensitivity_projected = false;
    const int n = cfg.n, m = cfg.m;
    const CtPolynomial a =
        stabilized_filter_poly(model_poly_checked(theta, n), cfg.stability_policy);
    const CtPolynomial b = theta.b_poly();

    SampledSignal z;
    switch (kind) {
        case InstrumentKind::model_output:
            z = rec.u;
            break;
        case InstrumentKind::reference_ct_sensitivity: {
            if (!rec.config.has_ct_controller()) {
                throw std::invalid_argument(
                    "reference_ct_sensitivity instrument requires a record with a continuous controller");
            }
            const auto& c = std::get<CtTransferFunction>(rec.config.controller);
            // S_uo,j(p) = C/(1+G_j C) = F A_j / (A_j L + B_j F).
            CtPolynomial den = a * c.den() + b * c.num();
            const StabilityReport rep = stability_check(den, Domain::continuous);
            if (!rep.stable && !rep.trivial) {
                if (cfg.stability_policy == StabilityPolicy::abort) {
                    throw std::runtime_error(
                        "model closed loop A_j L + B_j F is unstable; the instrument sensitivity requires a stable model loop");
                }
                den = reflect_unstable_roots(den, Domain::continuous);
                if (sensitivity_projected) *sensitivity_projected = true;
            }
            z = filter_sampled(CtTransferFunction(c.num() * a, den), rec.r, cfg.hold);
            break;
        }
        case InstrumentKind::reference_dt_sensitivity: {
            if (rec.config.has_ct_controller()) {
                throw std::invalid_argument(
                    "reference_dt_sensitivity instrument requires a record with a discrete controller");
            }
            const auto& cd = std::get<DtTransferFunction>(rec.config.controller);
            const DtTransferFunction gdj = c2d_zoh(CtTransferFunction(b, a), rec.r.h);
            // S_uo,j(q) = C_d/(1+G_dj C_d) = F_d A_dj / (A_dj L_d + B_dj F_d).
            std::vector<double> den_q =
                poly_add(poly_mul(gdj.den(), cd.den()), poly_mul(gdj.num(), cd.num()));
            const CtPolynomial den_asc(reversed(den_q));
            const StabilityReport rep = stability_check(den_asc, Domain::discrete);
            if (!rep.stable && !rep.trivial) {
                if (cfg.stability_policy == StabilityPolicy::abort) {
                    throw std::runtime_error(
                        "discrete model closed loop is unstable; the instrument sensitivity requires a stable model loop");
                }
                den_q = reversed(reflect_unstable_roots(den_asc, Domain::discrete).coeffs());
                if (sensitivity_projected) *sensitivity_projected = true;
            }
            const DtTransferFunction suo(poly_mul(cd.num(), gdj.den()), den_q, rec.r.h);
            z.values = dt_lsim(realize_dt(suo), rec.r.values);
            z.h = rec.r.h;
            z.t0 = rec.r.t0;
            break;
        }
    }

    return instrument_columns(a, b, z, n, m);
}

Eigen::MatrixXd instrument_columns(const CtPolynomial& a, const CtPolynomial& b,
                                   const SampledSignal& z, int n, int m) {
    // Bank factorization of [-p^i b/a^2 (i=1..n), p^j/a (j=0..m)]: everything
    // is a coefficient combination of {p^k/a^2} and {p^k/a}.
    const DerivativeBank bank2 = derivative_bank(a * a, z, HoldType::zero_order, n + m);
    const DerivativeBank bank1 = derivative_bank(a, z, HoldType::zero_order, m);

    const long len = static_cast<long>(z.size());
    Eigen::MatrixXd phi_hat(len, n + m + 1);
    for (int i = 1; i <= n; ++i) {
        Eigen::VectorXd col = Eigen::VectorXd::Zero(len);
        for (int l = 0; l <= m; ++l) col -= b.coeff(l) * bank2.rows.row(i + l).transpose();
        phi_hat.col(i - 1) = col;
    }
    for (int j = 0; j <= m; ++j) phi_hat.col(n + j) = bank1.rows.row(j).transpose();
    return phi_hat;
}

Eigen::MatrixXd build_instrument(const SampledRecord& rec, const ThetaVector& theta,
                                 const EstimatorConfig& cfg, InstrumentKind kind) {
    return build_instrument(rec, theta, cfg, kind, nullptr);
}

IvStep iv_step(const Eigen::MatrixXd& phi_hat, const Regressor& reg, int n, int m) {
    if (phi_hat.rows() != reg.phi.rows() || phi_hat.cols() != reg.phi.cols()) {
        throw std::invalid_argument("instrument and regressor dimensions disagree");
    }
    const Eigen::MatrixXd normal = phi_hat.transpose() * reg.phi;
    const Eigen::VectorXd rhs = phi_hat.transpose() * reg.y_f;
    IvStep step;
    step.condition = condition_estimate(normal);
    if (!(step.condition < 1e12)) {
        std::ostringstream os;
        os << "modified normal matrix is numerically singular (condition " << step.condition
           << "); instrument and regressor are insufficiently correlated";
        throw std::runtime_error(os.str());
    }
    step.theta = ThetaVector::from_stacked(normal.partialPivLu().solve(rhs), n, m);
    return step;
}

EstimationResult estimate(const SampledRecord& rec, const EstimatorConfig& cfg, InstrumentKind kind) {
    validate_record(rec);
    validate_config(cfg);
    if (rec.r.size() < 2 * static_cast<size_t>(cfg.n + cfg.m + 1)) {
        throw std::invalid_argument("record is too short for the requested model orders");
    }
    if (cfg.oversampled) fast_factor(rec);
    if (kind == InstrumentKind::reference_ct_sensitivity && !rec.config.has_ct_controller()) {
        throw std::invalid_argument(
            "reference_ct_sensitivity instrument requires a record with a continuous controller");
    }
    if (kind == InstrumentKind::reference_dt_sensitivity && rec.config.has_ct_controller()) {
        throw std::invalid_argument(
            "reference_dt_sensitivity instrument requires a record with a discrete controller");
    }

    EstimationResult res;
    res.theta.a = Eigen::VectorXd::Zero(cfg.n);
    res.theta.b = Eigen::VectorXd::Zero(cfg.m + 1);
    try {
        ThetaVector theta = lssvf_init(rec, cfg);
        res.theta = theta;
        res.history.push_back(theta);
        const double init_norm = std::max(theta.stacked().norm(), 1e-9);

        for (int j = 0; j < cfg.max_iterations; ++j) {
            IterationInfo info;
            const CtPolynomial a_raw = model_poly_checked(theta, cfg.n);
            const CtPolynomial a_proj =
                stabilized_filter_poly(a_raw, cfg.stability_policy, &info.filter_projected);
            const Regressor reg = regressor_with_filter(rec, a_proj, cfg);
            const Eigen::MatrixXd phi_hat =
                build_instrument(rec, theta, cfg, kind, &info.sensitivity_projected);
            const IvStep step = iv_step(phi_hat, reg, cfg.n, cfg.m);

            info.condition = step.condition;
            info.regressor_condition = condition_estimate(reg.phi);
            info.instrument_condition = condition_estimate(phi_hat);
            const Eigen::VectorXd resid = reg.y_f - reg.phi * step.theta.stacked();
            info.residual_rms = std::sqrt(resid.squaredNorm() / static_cast<double>(resid.size()));
            info.step_rel =
                (step.theta.stacked() - theta.stacked()).norm() / std::max(theta.stacked().norm(), 1e-300);

            theta = step.theta;
            res.history.push_back(theta);
            res.info.push_back(info);
            res.theta = theta;

            if (theta.stacked().norm() > cfg.divergence_factor * init_norm) {
                res.failure_reason = "iteration diverged: parameter norm exceeded the divergence guard";
                break;
            }
            if (info.step_rel < cfg.rel_tol) {
                res.converged = true;
                break;
            }
        }
    } catch (const std::exception& e) {
        res.converged = false;
        res.failure_reason = e.what();
    }
    res.iterations = static_cast<int>(res.info.size());
    return res;
}

std::string estimation_result_to_json(const EstimationResult& res) {
    nlohmann::json j;
    auto theta_json = [](const ThetaVector& t) {
        nlohmann::json tj;
        tj["a"] = std::vector<double>(t.a.data(), t.a.data() + t.a.size());
        tj["b"] = std::vector<double>(t.b.data(), t.b.data() + t.b.size());
        return tj;
    };
    j["theta"] = theta_json(res.theta);
    j["converged"] = res.converged;
    j["iterations"] = res.iterations;
    if (!res.failure_reason.empty()) j["failure_reason"] = res.failure_reason;
    j["history"] = nlohmann::json::array();
    for (const auto& t : res.history) j["history"].push_back(theta_json(t));
    j["info"] = nlohmann::json::array();
    for (const auto& i : res.info) {
        j["info"].push_back({{"condition", i.condition},
                             {"regressor_condition", i.regressor_condition},
                             {"instrument_condition", i.instrument_condition},
                             {"residual_rms", i.residual_rms},
                             {"step_rel", i.step_rel},
                             {"filter_projected", i.filter_projected},
                             {"sensitivity_projected", i.sensitivity_projected}});
    }
    return j.dump(2);
}

}  // namespace ctsid
