#include "ctsid/experiment.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <thread>

#include "ctsid/diagnostics.hpp"
#include "ctsid/rng.hpp"
#include "ctsid/svg_plot.hpp"

namespace ctsid {

namespace {

struct RunOutcome {
    Eigen::VectorXd theta;
    bool converged = false;
    int iterations = 0;
};

std::vector<std::string> param_names(int n, int m) {
    std::vector<std::string> names;
    for (int i = 1; i <= n; ++i) names.push_back("a" + std::to_string(i));
    for (int j = 0; j <= m; ++j) names.push_back("b" + std::to_string(j));
    return names;
}

SweepCell aggregate(const std::vector<RunOutcome>& runs, int dim) {
    SweepCell cell;
    cell.mean = Eigen::VectorXd::Zero(dim);
    cell.variance = Eigen::VectorXd::Constant(dim, std::numeric_limits<double>::quiet_NaN());
    double iter_sum = 0.0;
    for (const RunOutcome& r : runs) {
        if (!r.converged) {
            ++cell.failed_runs;
            continue;
        }
        cell.mean += r.theta;
        iter_sum += r.iterations;
        ++cell.converged_runs;
    }
    if (cell.converged_runs > 0) {
        cell.mean /= cell.converged_runs;
        cell.mean_iterations = iter_sum / cell.converged_runs;
    } else {
        cell.mean.setConstant(std::numeric_limits<double>::quiet_NaN());
    }
    if (cell.converged_runs > 1) {
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(dim);
        for (const RunOutcome& r : runs) {
            if (!r.converged) continue;
            acc += (r.theta - cell.mean).cwiseAbs2();
        }
        cell.variance = acc / (cell.converged_runs - 1);
    }
    cell.valid = 10 * cell.failed_runs <= static_cast<int>(runs.size());
    return cell;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("failed while writing " + path.string());
}

std::string csv_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

nlohmann::json vector_json(const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

void validate_sweep_spec(const SweepSpec& spec) {
    if (spec.methods.empty()) throw std::invalid_argument("sweep needs at least one method");
    if (spec.sample_sizes.empty()) throw std::invalid_argument("sweep needs at least one sample size");
    for (size_t i = 1; i < spec.sample_sizes.size(); ++i) {
        if (spec.sample_sizes[i] <= spec.sample_sizes[i - 1]) {
            throw std::invalid_argument("sample sizes must be strictly ascending");
        }
    }
    if (spec.runs_per_point < 1) throw std::invalid_argument("runs_per_point must be >= 1");
    for (const MethodSpec& m : spec.methods) {
        if (m.oversampled && spec.scenario.oversample_m < 2) {
            throw std::invalid_argument("oversampled methods require scenario oversample_m > 1");
        }
    }
}

}  // namespace

void parallel_for(int n_tasks, int jobs, const std::function<void(int)>& fn) {
    if (jobs < 1) jobs = 1;
    jobs = std::min(jobs, n_tasks);
    if (jobs <= 1) {
        for (int t = 0; t < n_tasks; ++t) fn(t);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(jobs));
    for (int w = 0; w < jobs; ++w) {
        pool.emplace_back([&]() {
            for (int t = next.fetch_add(1); t < n_tasks; t = next.fetch_add(1)) fn(t);
        });
    }
    for (std::thread& th : pool) th.join();
}

MethodSpec method_from_name(const std::string& name, bool ct_controller) {
    MethodSpec spec;
    spec.name = name;
    std::string base = name;
    if (base.size() > 3 && base.substr(base.size() - 3) == "-os") {
        spec.oversampled = true;
        base = base.substr(0, base.size() - 3);
    }
    if (base == "srivc") {
        spec.kind = InstrumentKind::model_output;
    } else if (base == "clsrivc") {
        spec.kind = ct_controller ? InstrumentKind::reference_ct_sensitivity
                                  : InstrumentKind::reference_dt_sensitivity;
    } else {
        throw std::invalid_argument("unknown method name: " + name +
                                    " (expected srivc, clsrivc, srivc-os, or clsrivc-os)");
    }
    return spec;
}

ScenarioConfig preset_scenario(const std::string& name) {
    const CtTransferFunction plant_main(CtPolynomial({0.5, -0.25}), CtPolynomial({1.0, 0.707, 0.5}));
    if (name == "paper-setting1") {
        const CtTransferFunction ctrl(CtPolynomial({0.7278, 1.896e-4}), CtPolynomial({0.0, 1.0}));
        ScenarioConfig cfg{plant_main, ctrl};
        cfg.h = 0.1;
        cfg.sigma_r2 = 1.0;
        cfg.sigma_v2 = 0.01;
        cfg.oversample_m = 100;
        return cfg;
    }
    if (name == "paper-setting2") {
        const double h = 0.1;
        const DtTransferFunction ctrl({0.416, -0.416 * 0.7452}, {1.0, -1.0}, h);
        ScenarioConfig cfg{plant_main, ctrl};
        cfg.h = h;
        cfg.sigma_r2 = 1.0;
        cfg.sigma_v2 = 0.01;
        return cfg;
    }
    if (name == "paper-bias") {
        const double h = 0.1;
        const CtTransferFunction plant(CtPolynomial({1.0, -0.3}), CtPolynomial({1.0, 1.0}));
        const DtTransferFunction ctrl({2.15, -2.15 * 0.9949}, {1.0, -1.0}, h);
        ScenarioConfig cfg{plant, ctrl};
        cfg.h = h;
        cfg.n_samples = 100000;
        cfg.sigma_r2 = 1.0;
        cfg.sigma_v2 = 0.01;
        return cfg;
    }
    throw std::invalid_argument("unknown preset: " + name +
                                " (expected paper-setting1, paper-setting2, or paper-bias)");
}

std::vector<int> log_spaced_sizes(int lo, int hi, int count) {
    const std::vector<double> raw = log_spaced_values(lo, hi, count);
    std::vector<int> sizes;
    for (double v : raw) {
        const int s = static_cast<int>(std::llround(v));
        if (sizes.empty() || s > sizes.back()) sizes.push_back(s);
    }
    return sizes;
}

std::vector<double> log_spaced_values(double lo, double hi, int count) {
    if (count < 1 || !(lo > 0.0) || !(hi > lo)) {
        throw std::invalid_argument("log spacing needs count >= 1 and 0 < lo < hi");
    }
    std::vector<double> out;
    if (count == 1) {
        out.push_back(lo);
        return out;
    }
    const double step = (std::log10(hi) - std::log10(lo)) / (count - 1);
    for (int i = 0; i < count; ++i) out.push_back(std::pow(10.0, std::log10(lo) + i * step));
    return out;
}

SweepSpec preset_sweep(const std::string& name) {
    SweepSpec spec;
    spec.scenario = preset_scenario(name);
    spec.sample_sizes = log_spaced_sizes(200, 200000, 40);
    spec.runs_per_point = 300;
    const bool ct = spec.scenario.has_ct_controller();
    if (ct) {
        for (const char* m : {"srivc", "clsrivc", "srivc-os", "clsrivc-os"}) {
            spec.methods.push_back(method_from_name(m, ct));
        }
    } else {
        for (const char* m : {"srivc", "clsrivc"}) spec.methods.push_back(method_from_name(m, ct));
    }
    return spec;
}

SweepReport run_consistency_sweep(const SweepSpec& spec) {
    validate_sweep_spec(spec);
    const int n_methods = static_cast<int>(spec.methods.size());
    const int n_sizes = static_cast<int>(spec.sample_sizes.size());
    const int runs = spec.runs_per_point;
    const int dim = spec.model_n + spec.model_m + 1;

    ScenarioConfig base = spec.scenario;
    bool any_os = false;
    for (const MethodSpec& m : spec.methods) any_os = any_os || m.oversampled;
    if (!any_os) base.oversample_m = 1;  // skip the fast track entirely

    SweepReport rep;
    for (const MethodSpec& m : spec.methods) rep.method_names.push_back(m.name);
    rep.sample_sizes = spec.sample_sizes;
    rep.runs_per_point = runs;
    rep.master_seed = spec.master_seed;
    rep.model_n = spec.model_n;
    rep.model_m = spec.model_m;
    rep.theta_true =
        ThetaVector::from_tf(spec.scenario.plant, spec.model_n, spec.model_m).stacked();

    std::vector<std::vector<std::vector<RunOutcome>>> outcomes(
        static_cast<size_t>(n_methods),
        std::vector<std::vector<RunOutcome>>(static_cast<size_t>(n_sizes),
                                             std::vector<RunOutcome>(static_cast<size_t>(runs))));

    parallel_for(n_sizes * runs, spec.jobs, [&](int task) {
        const int s = task / runs;
        const int run = task % runs;
        ScenarioConfig cfg = base;
        cfg.n_samples = spec.sample_sizes[static_cast<size_t>(s)];
        cfg.seed = derive_seed(spec.master_seed, static_cast<uint64_t>(s),
                               static_cast<uint64_t>(run));
        SampledRecord rec;
        try {
            rec = simulate(cfg);
        } catch (const std::exception&) {
            return;  // leave all outcomes for this task marked failed
        }
        for (int mi = 0; mi < n_methods; ++mi) {
            const MethodSpec& method = spec.methods[static_cast<size_t>(mi)];
            EstimatorConfig ecfg;
            ecfg.n = spec.model_n;
            ecfg.m = spec.model_m;
            ecfg.oversampled = method.oversampled;
            RunOutcome& slot = outcomes[static_cast<size_t>(mi)][static_cast<size_t>(s)]
                                       [static_cast<size_t>(run)];
            try {
                const EstimationResult res = estimate(rec, ecfg, method.kind);
                slot.theta = res.theta.stacked();
                slot.converged = res.converged;
                slot.iterations = res.iterations;
            } catch (const std::exception&) {
                slot.converged = false;
            }
        }
    });

    rep.cells.resize(static_cast<size_t>(n_methods));
    for (int mi = 0; mi < n_methods; ++mi) {
        for (int s = 0; s < n_sizes; ++s) {
            rep.cells[static_cast<size_t>(mi)].push_back(
                aggregate(outcomes[static_cast<size_t>(mi)][static_cast<size_t>(s)], dim));
        }
    }
    return rep;
}

Table1Report run_table1(int runs, uint64_t seed, int jobs) {
    SweepSpec spec;
    spec.scenario = preset_scenario("paper-setting1");
    spec.scenario.h = 0.02;
    spec.scenario.oversample_m = 1;
    spec.sample_sizes = {200000};
    spec.runs_per_point = runs;
    spec.master_seed = seed;
    spec.jobs = jobs;
    spec.methods = {method_from_name("srivc", true), method_from_name("clsrivc", true)};

    const SweepReport sweep = run_consistency_sweep(spec);
    Table1Report rep;
    rep.method_names = sweep.method_names;
    rep.theta_true = sweep.theta_true;
    rep.runs = runs;
    rep.seed = seed;
    rep.h = spec.scenario.h;
    rep.n_samples = spec.sample_sizes[0];
    for (size_t mi = 0; mi < sweep.cells.size(); ++mi) {
        rep.means.push_back(sweep.cells[mi][0].mean);
        rep.converged_runs.push_back(sweep.cells[mi][0].converged_runs);
        rep.failed_runs.push_back(sweep.cells[mi][0].failed_runs);
    }
    return rep;
}

BiasSpec preset_bias_spec() {
    BiasSpec spec;
    spec.scenario = preset_scenario("paper-bias");
    spec.method = method_from_name("srivc", false);
    spec.snr_values = log_spaced_values(1e-3, 1e3, 40);
    spec.runs_per_point = 300;
    spec.model_n = 1;
    spec.model_m = 1;
    return spec;
}

BiasCurveReport run_bias_vs_snr(const BiasSpec& spec) {
    if (spec.snr_values.empty()) throw std::invalid_argument("bias sweep needs SNR values");
    if (spec.runs_per_point < 1) throw std::invalid_argument("runs_per_point must be >= 1");
    if (spec.scenario.has_ct_controller()) {
        throw std::invalid_argument("bias sweep requires a discrete controller");
    }
    const int n_points = static_cast<int>(spec.snr_values.size());
    const int runs = spec.runs_per_point;
    const int dim = spec.model_n + spec.model_m + 1;

    std::vector<std::vector<RunOutcome>> outcomes(
        static_cast<size_t>(n_points), std::vector<RunOutcome>(static_cast<size_t>(runs)));

    parallel_for(n_points * runs, spec.jobs, [&](int task) {
        const int p = task / runs;
        const int run = task % runs;
        ScenarioConfig cfg = spec.scenario;
        cfg.oversample_m = 1;
        cfg.sigma_v2 = cfg.sigma_r2 / spec.snr_values[static_cast<size_t>(p)];
        cfg.seed = derive_seed(spec.master_seed, static_cast<uint64_t>(p),
                               static_cast<uint64_t>(run));
        RunOutcome& slot = outcomes[static_cast<size_t>(p)][static_cast<size_t>(run)];
        try {
            const SampledRecord rec = simulate(cfg);
            EstimatorConfig ecfg;
            ecfg.n = spec.model_n;
            ecfg.m = spec.model_m;
            const EstimationResult res = estimate(rec, ecfg, spec.method.kind);
            slot.theta = res.theta.stacked();
            slot.converged = res.converged;
            slot.iterations = res.iterations;
        } catch (const std::exception&) {
            slot.converged = false;
        }
    });

    BiasCurveReport rep;
    rep.theta_true =
        ThetaVector::from_tf(spec.scenario.plant, spec.model_n, spec.model_m).stacked();
    rep.runs_per_point = runs;
    rep.master_seed = spec.master_seed;
    rep.model_n = spec.model_n;
    rep.model_m = spec.model_m;
    const auto& cd = std::get<DtTransferFunction>(spec.scenario.controller);
    for (int p = 0; p < n_points; ++p) {
        const SweepCell cell = aggregate(outcomes[static_cast<size_t>(p)], dim);
        BiasPoint point;
        point.snr = spec.snr_values[static_cast<size_t>(p)];
        point.mean_theta = cell.mean;
        point.converged_runs = cell.converged_runs;
        point.failed_runs = cell.failed_runs;
        point.valid = cell.valid && cell.converged_runs > 0;
        point.metric = std::numeric_limits<double>::quiet_NaN();
        if (point.valid) {
            try {
                const ThetaVector mean_theta =
                    ThetaVector::from_stacked(cell.mean, spec.model_n, spec.model_m);
                point.metric = controller_inverse_bias_metric(mean_theta.to_tf(),
                                                              spec.scenario.plant, cd,
                                                              spec.scenario.h);
            } catch (const std::exception&) {
                point.valid = false;
            }
        }
        rep.points.push_back(std::move(point));
    }
    return rep;
}

std::string sweep_spec_to_json(const SweepSpec& spec) {
    nlohmann::json j;
    j["scenario"] = nlohmann::json::parse(scenario_to_json(spec.scenario));
    j["methods"] = nlohmann::json::array();
    for (const MethodSpec& m : spec.methods) j["methods"].push_back(m.name);
    j["sample_sizes"] = spec.sample_sizes;
    j["runs_per_point"] = spec.runs_per_point;
    j["master_seed"] = spec.master_seed;
    j["model_n"] = spec.model_n;
    j["model_m"] = spec.model_m;
    return j.dump(2);
}

SweepSpec sweep_spec_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    if (!j.contains("scenario")) throw std::invalid_argument("sweep spec JSON missing key: scenario");
    SweepSpec spec;
    spec.scenario = scenario_from_json(j.at("scenario").dump());
    const bool ct = spec.scenario.has_ct_controller();
    for (const auto& name : j.value("methods", std::vector<std::string>{"srivc", "clsrivc"})) {
        spec.methods.push_back(method_from_name(name, ct));
    }
    spec.sample_sizes = j.value("sample_sizes", log_spaced_sizes(200, 200000, 40));
    spec.runs_per_point = j.value("runs_per_point", 300);
    spec.master_seed = j.value("master_seed", static_cast<uint64_t>(1));
    spec.model_n = j.value("model_n", 2);
    spec.model_m = j.value("model_m", 1);
    return spec;
}

std::string bias_spec_to_json(const BiasSpec& spec) {
    nlohmann::json j;
    j["scenario"] = nlohmann::json::parse(scenario_to_json(spec.scenario));
    j["method"] = spec.method.name;
    j["snr_values"] = spec.snr_values;
    j["runs_per_point"] = spec.runs_per_point;
    j["master_seed"] = spec.master_seed;
    j["model_n"] = spec.model_n;
    j["model_m"] = spec.model_m;
    return j.dump(2);
}

BiasSpec bias_spec_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    if (!j.contains("scenario")) throw std::invalid_argument("bias spec JSON missing key: scenario");
    BiasSpec spec;
    spec.scenario = scenario_from_json(j.at("scenario").dump());
    spec.method = method_from_name(j.value("method", std::string("srivc")),
                                   spec.scenario.has_ct_controller());
    spec.snr_values = j.value("snr_values", log_spaced_values(1e-3, 1e3, 40));
    spec.runs_per_point = j.value("runs_per_point", 300);
    spec.master_seed = j.value("master_seed", static_cast<uint64_t>(1));
    spec.model_n = j.value("model_n", 1);
    spec.model_m = j.value("model_m", 1);
    return spec;
}

namespace {

std::string sweep_csv(const SweepReport& rep, bool variances, int n, int m) {
    const std::vector<std::string> params = param_names(n, m);
    std::string text = "N";
    for (const std::string& method : rep.method_names) {
        for (const std::string& p : params) {
            text += "," + method + "_" + p + (variances ? "_var" : "_mean");
        }
    }
    text += "\n";
    for (size_t s = 0; s < rep.sample_sizes.size(); ++s) {
        text += std::to_string(rep.sample_sizes[s]);
        for (size_t mi = 0; mi < rep.cells.size(); ++mi) {
            const SweepCell& cell = rep.cells[mi][s];
            const Eigen::VectorXd& v = variances ? cell.variance : cell.mean;
            for (long k = 0; k < v.size(); ++k) text += "," + csv_number(v(k));
        }
        text += "\n";
    }
    return text;
}

void sweep_svg(const SweepReport& rep, const std::filesystem::path& path, bool variances,
               int n, int m) {
    const std::vector<std::string> params = param_names(n, m);
    std::vector<PlotPanel> panels;
    for (size_t k = 0; k < params.size(); ++k) {
        PlotPanel panel;
        panel.title = (variances ? "variance of " : "mean of ") + params[k];
        panel.x_label = "sample size N";
        panel.y_label = params[k];
        panel.log_x = true;
        panel.log_y = variances;
        if (!variances && k < static_cast<size_t>(rep.theta_true.size())) {
            panel.reference_lines.push_back(rep.theta_true(static_cast<long>(k)));
        }
        for (size_t mi = 0; mi < rep.cells.size(); ++mi) {
            PlotSeries series;
            series.label = rep.method_names[mi];
            for (size_t s = 0; s < rep.sample_sizes.size(); ++s) {
                const SweepCell& cell = rep.cells[mi][s];
                const Eigen::VectorXd& v = variances ? cell.variance : cell.mean;
                series.x.push_back(static_cast<double>(rep.sample_sizes[s]));
                series.y.push_back(static_cast<long>(k) < v.size()
                                       ? v(static_cast<long>(k))
                                       : std::numeric_limits<double>::quiet_NaN());
            }
            panel.series.push_back(std::move(series));
        }
        panels.push_back(std::move(panel));
    }
    write_svg_plot(path, variances ? "parameter variance vs sample size"
                                   : "parameter mean vs sample size",
                   panels);
}

nlohmann::json cell_json(const SweepCell& cell) {
    return {{"mean", vector_json(cell.mean)},
            {"variance", vector_json(cell.variance)},
            {"converged_runs", cell.converged_runs},
            {"failed_runs", cell.failed_runs},
            {"mean_iterations", cell.mean_iterations},
            {"valid", cell.valid}};
}

}  // namespace

std::vector<std::string> emit_sweep_report(const SweepReport& rep,
                                           const std::filesystem::path& outdir, int mean_fig,
                                           int var_fig) {
    std::filesystem::create_directories(outdir);
    const int n = rep.model_n;
    const int m = rep.model_m;

    std::vector<std::string> files;
    const std::string mean_csv = "fig" + std::to_string(mean_fig) + ".csv";
    const std::string mean_svg = "fig" + std::to_string(mean_fig) + ".svg";
    const std::string var_csv = "fig" + std::to_string(var_fig) + ".csv";
    const std::string var_svg = "fig" + std::to_string(var_fig) + ".svg";
    write_text_file(outdir / mean_csv, sweep_csv(rep, false, n, m));
    sweep_svg(rep, outdir / mean_svg, false, n, m);
    write_text_file(outdir / var_csv, sweep_csv(rep, true, n, m));
    sweep_svg(rep, outdir / var_svg, true, n, m);
    files = {mean_csv, mean_svg, var_csv, var_svg};

    nlohmann::json j;
    j["method_names"] = rep.method_names;
    j["sample_sizes"] = rep.sample_sizes;
    j["runs_per_point"] = rep.runs_per_point;
    j["master_seed"] = rep.master_seed;
    j["model_n"] = rep.model_n;
    j["model_m"] = rep.model_m;
    j["theta_true"] = vector_json(rep.theta_true);
    j["cells"] = nlohmann::json::array();
    for (size_t mi = 0; mi < rep.cells.size(); ++mi) {
        nlohmann::json row = nlohmann::json::array();
        for (const SweepCell& cell : rep.cells[mi]) row.push_back(cell_json(cell));
        j["cells"].push_back(row);
    }
    write_text_file(outdir / "sweep_summary.json", j.dump(2) + "\n");
    files.push_back("sweep_summary.json");
    return files;
}

std::vector<std::string> emit_table1(const Table1Report& rep,
                                     const std::filesystem::path& outdir) {
    std::filesystem::create_directories(outdir);
    std::string text = "method,a1,a2,b0,b1\n";
    auto row = [&](const std::string& name, const Eigen::VectorXd& v) {
        text += name;
        for (long k = 0; k < v.size(); ++k) text += "," + csv_number(v(k));
        text += "\n";
    };
    row("true", rep.theta_true);
    for (size_t mi = 0; mi < rep.method_names.size(); ++mi) {
        row(rep.method_names[mi], rep.means[mi]);
    }
    write_text_file(outdir / "table1.csv", text);

    nlohmann::json j;
    j["method_names"] = rep.method_names;
    j["theta_true"] = vector_json(rep.theta_true);
    j["means"] = nlohmann::json::array();
    for (const Eigen::VectorXd& m : rep.means) j["means"].push_back(vector_json(m));
    j["converged_runs"] = rep.converged_runs;
    j["failed_runs"] = rep.failed_runs;
    j["runs"] = rep.runs;
    j["seed"] = rep.seed;
    j["h"] = rep.h;
    j["n_samples"] = rep.n_samples;
    write_text_file(outdir / "table1_summary.json", j.dump(2) + "\n");
    return {"table1.csv", "table1_summary.json"};
}

std::vector<std::string> emit_bias_report(const BiasCurveReport& rep,
                                          const std::filesystem::path& outdir, int fig) {
    std::filesystem::create_directories(outdir);
    const std::string csv_name = "fig" + std::to_string(fig) + ".csv";
    const std::string svg_name = "fig" + std::to_string(fig) + ".svg";

    std::string text = "snr,bias_metric,converged_runs,failed_runs";
    const std::vector<std::string> params = param_names(rep.model_n, rep.model_m);
    for (const std::string& p : params) text += ",mean_" + p;
    text += "\n";
    for (const BiasPoint& point : rep.points) {
        text += csv_number(point.snr) + "," + csv_number(point.metric) + "," +
                std::to_string(point.converged_runs) + "," + std::to_string(point.failed_runs);
        for (long k = 0; k < point.mean_theta.size(); ++k) {
            text += "," + csv_number(point.mean_theta(k));
        }
        text += "\n";
    }
    write_text_file(outdir / csv_name, text);

    PlotPanel panel;
    panel.title = "normalized bias of the sampled model";
    panel.x_label = "SNR (sigma_r^2 / sigma_v^2)";
    panel.y_label = "bias metric";
    panel.log_x = true;
    panel.reference_lines = {0.0, 1.0};
    PlotSeries series;
    series.label = "bias metric";
    for (const BiasPoint& point : rep.points) {
        series.x.push_back(point.snr);
        series.y.push_back(point.metric);
    }
    panel.series.push_back(std::move(series));
    write_svg_plot(outdir / svg_name, "sampled-model bias vs SNR", {panel});

    nlohmann::json j;
    j["theta_true"] = vector_json(rep.theta_true);
    j["runs_per_point"] = rep.runs_per_point;
    j["master_seed"] = rep.master_seed;
    j["points"] = nlohmann::json::array();
    for (const BiasPoint& point : rep.points) {
        j["points"].push_back({{"snr", point.snr},
                               {"metric", point.metric},
                               {"mean_theta", vector_json(point.mean_theta)},
                               {"converged_runs", point.converged_runs},
                               {"failed_runs", point.failed_runs},
                               {"valid", point.valid}});
    }
    write_text_file(outdir / "bias_summary.json", j.dump(2) + "\n");
    return {csv_name, svg_name, "bias_summary.json"};
}

}  // namespace ctsid
