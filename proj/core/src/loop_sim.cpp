#include "ctsid/loop_sim.hpp"

#include "ctsid/discretize.hpp"
#include "ctsid/linear_system.hpp"
#include "ctsid/rng.hpp"
#include "ctsid/stability.hpp"

#include <nlohmann/json.hpp>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ctsid {

namespace {

constexpr uint64_t kReferenceStream = 1;
constexpr uint64_t kDisturbanceStream = 2;

std::vector<double> gaussian_sequence(uint64_t key, size_t n, double sigma) {
    CounterRng rng(key);
    std::vector<double> x(n);
    for (size_t k = 0; k < n; ++k) x[k] = sigma * rng.gaussian(k);
    return x;
}

void validate_common(const ScenarioConfig& cfg) {
    if (!(cfg.h > 0.0) || !std::isfinite(cfg.h)) throw std::invalid_argument("sample period must be positive");
    if (cfg.n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
    if (cfg.sigma_r2 < 0.0 || cfg.sigma_v2 < 0.0) throw std::invalid_argument("variances must be non-negative");
    if (cfg.oversample_m < 1) throw std::invalid_argument("oversample_m must be >= 1");
    if (cfg.noise_shaping) {
        if (std::abs(cfg.noise_shaping->sample_period() - cfg.h) > 1e-9 * cfg.h) {
            throw std::invalid_argument("noise shaping filter period must match the scenario period");
        }
        if (!stability_check(*cfg.noise_shaping).stable) {
            throw std::invalid_argument("noise shaping filter must be stable");
        }
    }
}

std::vector<double> disturbance_sequence(const ScenarioConfig& cfg, size_t n) {
    std::vector<double> v = gaussian_sequence(derive_seed(cfg.seed, 0, kDisturbanceStream), n,
                                              std::sqrt(cfg.sigma_v2));
    if (cfg.noise_shaping && cfg.sigma_v2 > 0.0) {
        v = dt_lsim(realize_dt(*cfg.noise_shaping), v);
    }
    return v;
}

// Closed loop with a continuous controller, stacked state [xg; xc],
// inputs [r; v], outputs [y; u].
StateSpaceModel build_ct_loop(const CtTransferFunction& plant, const CtTransferFunction& ctrl) {
    const StateSpaceModel g = realize_ct(plant);
    const StateSpaceModel c = realize_ct(ctrl);
    const int ng = g.order(), nc = c.order(), n = ng + nc;
    const double dg = g.D(0, 0), dc = c.D(0, 0);
    const double gamma = 1.0 + dc * dg;
    if (std::abs(gamma) < 1e-12) {
        throw std::invalid_argument("algebraic feedthrough loop 1 + C(inf)G(inf) is not invertible");
    }

    Eigen::RowVectorXd cg = Eigen::RowVectorXd::Zero(n), cc = Eigen::RowVectorXd::Zero(n);
    cg.head(ng) = g.C.row(0);
    cc.tail(nc) = c.C.row(0);

    // u = (Cc xc - Dc Cg xg + Dc r - Dc v) / gamma; y = Cg xg + Dg u + v.
    const Eigen::RowVectorXd u_x = (cc - dc * cg) / gamma;
    const double u_r = dc / gamma, u_v = -dc / gamma;
    const Eigen::RowVectorXd y_x = cg + dg * u_x;
    const double y_r = dg * u_r, y_v = 1.0 + dg * u_v;

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    a.topLeftCorner(ng, ng) = g.A;
    a.bottomRightCorner(nc, nc) = c.A;
    if (ng > 0) a.topRows(ng) += g.B * u_x;
    if (nc > 0) a.bottomRows(nc) -= c.B * y_x;

    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, 2);
    if (ng > 0) {
        b.block(0, 0, ng, 1) = g.B * u_r;
        b.block(0, 1, ng, 1) = g.B * u_v;
    }
    if (nc > 0) {
        b.block(ng, 0, nc, 1) = c.B * (1.0 - y_r);
        b.block(ng, 1, nc, 1) = c.B * (-y_v);
    }

    Eigen::MatrixXd cmat(2, n), dmat(2, 2);
    cmat.row(0) = y_x;
    cmat.row(1) = u_x;
    dmat << y_r, y_v, u_r, u_v;
    return StateSpaceModel(std::move(a), std::move(b), std::move(cmat), std::move(dmat));
}

void check_closed_loop_stability(const ScenarioConfig& cfg) {
    if (cfg.has_ct_controller()) {
        const auto& c = std::get<CtTransferFunction>(cfg.controller);
        const CtPolynomial cl = cfg.plant.den() * c.den() + cfg.plant.num() * c.num();
        if (!stability_check(cl, Domain::continuous).stable) {
            throw std::runtime_error("closed loop is unstable: den_G*den_C + num_G*num_C has roots with non-negative real part");
        }
    } else {
        const auto& cd = std::get<DtTransferFunction>(cfg.controller);
        if (std::abs(cd.sample_period() - cfg.h) > 1e-9 * cfg.h) {
            throw std::invalid_argument("discrete controller period must match the scenario period");
        }
        const DtTransferFunction gd = c2d_zoh(cfg.plant, cfg.h);
        const std::vector<double> cl =
            poly_add(poly_mul(gd.den(), cd.den()), poly_mul(gd.num(), cd.num()));
        std::vector<double> ascending(cl.rbegin(), cl.rend());
        if (!stability_check(CtPolynomial(std::move(ascending)), Domain::discrete).stable) {
            throw std::runtime_error("closed loop is unstable: discrete loop polynomial has roots on or outside the unit circle");
        }
    }
}

SampledRecord simulate_ct_loop(const ScenarioConfig& cfg, const std::vector<double>& r,
                               const std::vector<double>& v) {
    const size_t n_slow = static_cast<size_t>(cfg.n_samples);
    const size_t m = static_cast<size_t>(cfg.oversample_m);
    // Both loop inputs are held at the slow rate, so a ZOH discretization of
    // the closed loop at h/m reproduces the continuous trajectory exactly at
    // every fast instant; no finer integration grid is needed.
    const StateSpaceModel loop = build_ct_loop(cfg.plant, std::get<CtTransferFunction>(cfg.controller));
    const StateSpaceModel dt = c2d_zoh_ss(loop, cfg.h / static_cast<double>(m));
    const int n = dt.order();

    std::vector<double> ad(static_cast<size_t>(n) * n), b_r(static_cast<size_t>(n)), b_v(static_cast<size_t>(n));
    std::vector<double> c_y(static_cast<size_t>(n)), c_u(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) ad[static_cast<size_t>(i) * n + j] = dt.A(i, j);
        b_r[static_cast<size_t>(i)] = dt.B(i, 0);
        b_v[static_cast<size_t>(i)] = dt.B(i, 1);
        c_y[static_cast<size_t>(i)] = dt.C(0, i);
        c_u[static_cast<size_t>(i)] = dt.C(1, i);
    }
    const double d_yr = dt.D(0, 0), d_yv = dt.D(0, 1), d_ur = dt.D(1, 0), d_uv = dt.D(1, 1);

    SampledRecord rec{SampledSignal{r, cfg.h, 0.0}, SampledSignal{{}, cfg.h, 0.0},
                      SampledSignal{{}, cfg.h, 0.0}, std::nullopt, cfg};
    rec.u.values.resize(n_slow);
    rec.y.values.resize(n_slow);
    const size_t n_fast = (n_slow - 1) * m + 1;
    if (m > 1) {
        rec.u_fast = SampledSignal{std::vector<double>(n_fast), cfg.h / static_cast<double>(m), 0.0};
    }

    std::vector<double> x(static_cast<size_t>(n), 0.0), xn(static_cast<size_t>(n));
    for (size_t s = 0; s < n_fast; ++s) {
        const size_t k = s / m;
        const double rk = r[k], vk = v[k];
        double u_now = d_ur * rk + d_uv * vk;
        for (int i = 0; i < n; ++i) u_now += c_u[static_cast<size_t>(i)] * x[static_cast<size_t>(i)];
        if (m > 1) rec.u_fast->values[s] = u_now;
        if (s % m == 0) {
            double y_now = d_yr * rk + d_yv * vk;
            for (int i = 0; i < n; ++i) y_now += c_y[static_cast<size_t>(i)] * x[static_cast<size_t>(i)];
            rec.u.values[k] = u_now;
            rec.y.values[k] = y_now;
        }
        for (int i = 0; i < n; ++i) {
            double acc = b_r[static_cast<size_t>(i)] * rk + b_v[static_cast<size_t>(i)] * vk;
            const double* ar = ad.data() + static_cast<size_t>(i) * n;
            for (int j = 0; j < n; ++j) acc += ar[j] * x[static_cast<size_t>(j)];
            xn[static_cast<size_t>(i)] = acc;
        }
        x.swap(xn);
    }
    return rec;
}

SampledRecord simulate_dt_loop(const ScenarioConfig& cfg, const std::vector<double>& r,
                               const std::vector<double>& v) {
    const size_t n_slow = static_cast<size_t>(cfg.n_samples);
    const auto& cd = std::get<DtTransferFunction>(cfg.controller);
    const StateSpaceModel g = realize_dt(c2d_zoh(cfg.plant, cfg.h));
    const StateSpaceModel c = realize_dt(cd);
    const double dg = g.D(0, 0), dc = c.D(0, 0);
    const double gamma = 1.0 + dc * dg;
    if (std::abs(gamma) < 1e-12) {
        throw std::invalid_argument("algebraic feedthrough loop 1 + C_d G_d is not invertible at the feedthrough");
    }
    const int ng = g.order(), nc = c.order();

    SampledRecord rec{SampledSignal{r, cfg.h, 0.0}, SampledSignal{{}, cfg.h, 0.0},
                      SampledSignal{{}, cfg.h, 0.0}, std::nullopt, cfg};
    rec.u.values.resize(n_slow);
    rec.y.values.resize(n_slow);

    Eigen::VectorXd xg = Eigen::VectorXd::Zero(ng), xc = Eigen::VectorXd::Zero(nc);
    for (size_t k = 0; k < n_slow; ++k) {
        const double w = ng > 0 ? (g.C.row(0) * xg)(0) : 0.0;   // plant state part of y
        const double z = nc > 0 ? (c.C.row(0) * xc)(0) : 0.0;   // controller state part of u
        const double u = (z + dc * (r[k] - w - v[k])) / gamma;
        const double y = w + dg * u + v[k];
        const double e = r[k] - y;
        if (ng > 0) xg = g.A * xg + g.B * u;
        if (nc > 0) xc = c.A * xc + c.B * e;
        rec.u.values[k] = u;
        rec.y.values[k] = y;
    }

    if (cfg.oversample_m > 1) {
        // The actuator holds u, so the fast track is its exact ZOH extension.
        const int m = cfg.oversample_m;
        const size_t n_fast = (n_slow - 1) * static_cast<size_t>(m) + 1;
        SampledSignal uf{std::vector<double>(n_fast), cfg.h / m, 0.0};
        for (size_t j = 0; j < n_fast; ++j) uf.values[j] = rec.u.values[j / static_cast<size_t>(m)];
        rec.u_fast = std::move(uf);
    }
    return rec;
}

}  // namespace

SampledRecord simulate(const ScenarioConfig& cfg) {
    validate_common(cfg);
    check_closed_loop_stability(cfg);
    const size_t n = static_cast<size_t>(cfg.n_samples);
    const std::vector<double> r =
        gaussian_sequence(derive_seed(cfg.seed, 0, kReferenceStream), n, std::sqrt(cfg.sigma_r2));
    const std::vector<double> v = disturbance_sequence(cfg, n);
    return cfg.has_ct_controller() ? simulate_ct_loop(cfg, r, v) : simulate_dt_loop(cfg, r, v);
}

SampledRecord simulate_noise_free(const ScenarioConfig& cfg) {
    ScenarioConfig quiet = cfg;
    quiet.sigma_v2 = 0.0;
    quiet.noise_shaping.reset();
    return simulate(quiet);
}

SampledSignal scenario_reference(const ScenarioConfig& cfg) {
    validate_common(cfg);
    const size_t n = static_cast<size_t>(cfg.n_samples);
    return SampledSignal{gaussian_sequence(derive_seed(cfg.seed, 0, kReferenceStream), n,
                                           std::sqrt(cfg.sigma_r2)),
                         cfg.h};
}

SampledSignal scenario_disturbance(const ScenarioConfig& cfg) {
    validate_common(cfg);
    const size_t n = static_cast<size_t>(cfg.n_samples);
    return SampledSignal{disturbance_sequence(cfg, n), cfg.h};
}

double measure_output_snr_db(const ScenarioConfig& cfg) {
    auto variance = [](const std::vector<double>& x) {
        double mean = 0.0;
        for (double v : x) mean += v;
        mean /= static_cast<double>(x.size());
        double acc = 0.0;
        for (double v : x) acc += (v - mean) * (v - mean);
        return acc / static_cast<double>(x.size());
    };
    const double output_var = variance(simulate(cfg).y.values);
    const double noise_var = variance(scenario_disturbance(cfg).values);
    if (noise_var <= 0.0) throw std::invalid_argument("SNR undefined: disturbance variance is zero");
    return 10.0 * std::log10(output_var / noise_var);
}

ExcitationReport excitation_order(const SampledSignal& r, int order, double tol) {
    if (order < 1) throw std::invalid_argument("excitation order must be >= 1");
    const size_t n = r.size();
    if (static_cast<size_t>(order) > n / 4) {
        throw std::invalid_argument("excitation order exceeds n/4: autocovariance estimates would be unreliable");
    }
    std::vector<double> cov(static_cast<size_t>(order), 0.0);
    for (int tau = 0; tau < order; ++tau) {
        double acc = 0.0;
        for (size_t k = 0; k + static_cast<size_t>(tau) < n; ++k) {
            acc += r.values[k] * r.values[k + static_cast<size_t>(tau)];
        }
        cov[static_cast<size_t>(tau)] = acc / static_cast<double>(n);
    }
    Eigen::MatrixXd toeplitz(order, order);
    for (int i = 0; i < order; ++i)
        for (int j = 0; j < order; ++j) toeplitz(i, j) = cov[static_cast<size_t>(std::abs(i - j))];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(toeplitz);
    ExcitationReport rep;
    const double trace = toeplitz.trace();
    rep.rank_gap = trace > 0.0 ? es.eigenvalues().minCoeff() / trace : 0.0;
    rep.satisfied = rep.rank_gap > tol;
    return rep;
}

namespace {

nlohmann::json tf_json(const AnyTransferFunction& tf) {
    return nlohmann::json::parse(transfer_function_to_json(tf));
}

}  // namespace

std::string scenario_to_json(const ScenarioConfig& cfg) {
    nlohmann::json j;
    j["plant"] = tf_json(cfg.plant);
    j["controller"] = cfg.has_ct_controller() ? tf_json(std::get<CtTransferFunction>(cfg.controller))
                                              : tf_json(std::get<DtTransferFunction>(cfg.controller));
    j["h"] = cfg.h;
    j["n_samples"] = cfg.n_samples;
    j["sigma_r2"] = cfg.sigma_r2;
    j["sigma_v2"] = cfg.sigma_v2;
    j["oversample_m"] = cfg.oversample_m;
    j["seed"] = cfg.seed;
    if (cfg.noise_shaping) j["noise_shaping"] = tf_json(*cfg.noise_shaping);
    return j.dump(2);
}

ScenarioConfig scenario_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    for (const char* key : {"plant", "controller", "h", "n_samples"}) {
        if (!j.contains(key)) throw std::invalid_argument(std::string("scenario JSON missing key: ") + key);
    }
    const AnyTransferFunction plant = transfer_function_from_json(j.at("plant").dump());
    if (!std::holds_alternative<CtTransferFunction>(plant)) {
        throw std::invalid_argument("scenario plant must be a continuous-time transfer function");
    }
    const AnyTransferFunction ctrl = transfer_function_from_json(j.at("controller").dump());
    ScenarioConfig cfg{std::get<CtTransferFunction>(plant),
                       std::holds_alternative<CtTransferFunction>(ctrl)
                           ? std::variant<CtTransferFunction, DtTransferFunction>(std::get<CtTransferFunction>(ctrl))
                           : std::variant<CtTransferFunction, DtTransferFunction>(std::get<DtTransferFunction>(ctrl))};
    cfg.h = j.at("h").get<double>();
    cfg.n_samples = j.at("n_samples").get<int>();
    cfg.sigma_r2 = j.value("sigma_r2", 1.0);
    cfg.sigma_v2 = j.value("sigma_v2", 0.0);
    cfg.oversample_m = j.value("oversample_m", 1);
    cfg.seed = j.value("seed", static_cast<uint64_t>(1));
    if (j.contains("noise_shaping")) {
        const AnyTransferFunction shaping = transfer_function_from_json(j.at("noise_shaping").dump());
        if (!std::holds_alternative<DtTransferFunction>(shaping)) {
            throw std::invalid_argument("noise shaping filter must be discrete");
        }
        cfg.noise_shaping = std::get<DtTransferFunction>(shaping);
    }
    return cfg;
}

void save_record(const std::filesystem::path& dir, const SampledRecord& rec) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "config.json");
        if (!out) throw std::runtime_error("cannot write " + (dir / "config.json").string());
        out << scenario_to_json(rec.config) << "\n";
    }
    {
        std::FILE* f = std::fopen((dir / "signals.csv").string().c_str(), "w");
        if (!f) throw std::runtime_error("cannot write " + (dir / "signals.csv").string());
        std::fputs("t,r,u,y\n", f);
        for (size_t k = 0; k < rec.r.size(); ++k) {
            std::fprintf(f, "%.17g,%.17g,%.17g,%.17g\n", rec.r.time_at(k), rec.r.values[k],
                         rec.u.values[k], rec.y.values[k]);
        }
        std::fclose(f);
    }
    if (rec.u_fast) save_signal_csv(dir / "u_fast.csv", *rec.u_fast);
}

SampledRecord load_record(const std::filesystem::path& dir) {
    std::ifstream cin(dir / "config.json");
    if (!cin) throw std::runtime_error("record directory is missing config.json: " + dir.string());
    std::stringstream buf;
    buf << cin.rdbuf();
    ScenarioConfig cfg = scenario_from_json(buf.str());

    std::ifstream in(dir / "signals.csv");
    if (!in) throw std::runtime_error("record directory is missing signals.csv: " + dir.string());
    std::string line;
    if (!std::getline(in, line) || line.rfind("t,r,u,y", 0) != 0) {
        throw std::runtime_error("signals.csv must start with header \"t,r,u,y\"");
    }
    SampledRecord rec{SampledSignal{{}, cfg.h, 0.0}, SampledSignal{{}, cfg.h, 0.0},
                      SampledSignal{{}, cfg.h, 0.0}, std::nullopt, cfg};
    size_t lineno = 1;
    double t_first = 0.0, t_last = 0.0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        double vals[4];
        int consumed = 0;
        if (std::sscanf(line.c_str(), "%lg,%lg,%lg,%lg%n", &vals[0], &vals[1], &vals[2], &vals[3],
                        &consumed) != 4) {
            throw std::runtime_error("malformed signals.csv line " + std::to_string(lineno));
        }
        if (rec.r.values.empty()) t_first = vals[0];
        t_last = vals[0];
        rec.r.values.push_back(vals[1]);
        rec.u.values.push_back(vals[2]);
        rec.y.values.push_back(vals[3]);
    }
    const size_t n = rec.r.size();
    if (n >= 2) {
        const double h_obs = (t_last - t_first) / static_cast<double>(n - 1);
        if (std::abs(h_obs - cfg.h) > 1e-9 * (1.0 + cfg.h)) {
            throw std::runtime_error("signals.csv sample period disagrees with config.json");
        }
    }
    rec.r.t0 = rec.u.t0 = rec.y.t0 = t_first;
    if (std::filesystem::exists(dir / "u_fast.csv")) {
        rec.u_fast = load_signal_csv(dir / "u_fast.csv");
    }
    return rec;
}

}  // namespace ctsid
