// ctsid: closed-loop continuous-time system identification toolkit.
//
// Subcommands: simulate, estimate, diagnose, sweep, table1, bias-snr,
// config-keys.  Exit codes: 0 success, 1 configuration error, 2 numerical
// failure; every error line starts with a machine-parsable "ERROR <code>:"
// prefix.  Option precedence is CLI flag > config file > built-in default.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ctsid/diagnostics.hpp"
#include "ctsid/estimator.hpp"
#include "ctsid/experiment.hpp"
#include "ctsid/loop_sim.hpp"
#include "ctsid/transfer_function.hpp"

namespace {

using namespace ctsid;
namespace fs = std::filesystem;

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

int default_jobs() {
    const unsigned n = std::thread::hardware_concurrency();
    return n > 0 ? static_cast<int>(n) : 1;
}

void spit(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("failed while writing " + path.string());
}

// Manifests carry the fully resolved configuration and the artifact list so
// a rerun can be checked for bit-identy; deliberately no timestamps.
void write_manifest(const fs::path& outdir, const std::string& subcommand,
                    const nlohmann::json& config, const std::vector<std::string>& artifacts) {
    nlohmann::json j;
    j["format_version"] = 1;
    j["tool"] = "ctsid";
    j["subcommand"] = subcommand;
    j["config"] = config;
    j["artifacts"] = artifacts;
    spit(outdir / "manifest.json", j.dump(2) + "\n");
}

AnyTransferFunction load_tf_file(const std::string& path) {
    try {
        return transfer_function_from_json(slurp(path));
    } catch (const std::invalid_argument&) {
        throw;
    } catch (const std::exception& e) {
        throw std::invalid_argument("bad transfer function file " + path + ": " + e.what());
    }
}

CtTransferFunction load_ct_tf_file(const std::string& path) {
    AnyTransferFunction tf = load_tf_file(path);
    if (!std::holds_alternative<CtTransferFunction>(tf)) {
        throw std::invalid_argument(path + " holds a discrete transfer function where a continuous one is required");
    }
    return std::get<CtTransferFunction>(tf);
}

SampledRecord load_record_checked(const std::string& dir) {
    try {
        return load_record(dir);
    } catch (const std::invalid_argument&) {
        throw;
    } catch (const std::exception& e) {
        throw std::invalid_argument("cannot load record " + dir + ": " + e.what());
    }
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    std::string preset, config_path, plant_path, controller_path, shaping_path, out;
    double h = 0.1, sigma_r2 = 1.0, sigma_v2 = 0.0;
    int n_samples = 1000, oversample = 1;
    uint64_t seed = 1;
    CLI::App* cmd = nullptr;
};

int run_simulate(const SimulateArgs& a, int verbose) {
    ScenarioConfig cfg = [&]() {
        if (!a.config_path.empty()) return scenario_from_json(slurp(a.config_path));
        if (!a.preset.empty()) return preset_scenario(a.preset);
        if (!a.plant_path.empty()) {
            if (a.controller_path.empty()) {
                throw std::invalid_argument("--plant requires --controller");
            }
            ScenarioConfig c{load_ct_tf_file(a.plant_path), CtTransferFunction()};
            c.controller = load_tf_file(a.controller_path);
            return c;
        }
        throw std::invalid_argument("simulate needs a scenario: --preset, --config, or --plant/--controller");
    }();

    if (a.cmd->count("--plant")) cfg.plant = load_ct_tf_file(a.plant_path);
    if (a.cmd->count("--controller")) cfg.controller = load_tf_file(a.controller_path);
    if (a.cmd->count("--noise-shaping")) {
        AnyTransferFunction tf = load_tf_file(a.shaping_path);
        if (!std::holds_alternative<DtTransferFunction>(tf)) {
            throw std::invalid_argument("noise shaping filter must be a discrete transfer function");
        }
        cfg.noise_shaping = std::get<DtTransferFunction>(tf);
    }
    if (a.cmd->count("--period")) cfg.h = a.h;
    if (a.cmd->count("--n-samples")) cfg.n_samples = a.n_samples;
    if (a.cmd->count("--sigma-r2")) cfg.sigma_r2 = a.sigma_r2;
    if (a.cmd->count("--sigma-v2")) cfg.sigma_v2 = a.sigma_v2;
    if (a.cmd->count("--oversample")) cfg.oversample_m = a.oversample;
    if (a.cmd->count("--seed")) cfg.seed = a.seed;

    const SampledRecord rec = simulate(cfg);
    fs::create_directories(a.out);
    save_record(a.out, rec);
    std::vector<std::string> artifacts = {"config.json", "signals.csv"};
    if (rec.u_fast) artifacts.push_back("u_fast.csv");
    write_manifest(a.out, "simulate", nlohmann::json::parse(scenario_to_json(cfg)), artifacts);
    if (verbose) {
        std::cerr << "simulated " << cfg.n_samples << " samples at h = " << cfg.h
                  << " s; output SNR = " << measure_output_snr_db(cfg) << " dB\n";
    }
    return 0;
}

// ---------------------------------------------------------------- estimate

struct EstimateArgs {
    std::string record, method = "srivc", out, trace;
    int n = 2, m = 1, max_iter = 200;
    double rel_tol = 1e-7, svf_cutoff = 0.0;
    StabilityPolicy policy = StabilityPolicy::reflect;
    HoldType hold = HoldType::zero_order;
};

std::string trace_csv(const EstimationResult& res) {
    std::string text =
        "iteration,condition,regressor_condition,instrument_condition,residual_rms,step_rel,"
        "filter_projected,sensitivity_projected\n";
    char buf[256];
    for (size_t i = 0; i < res.info.size(); ++i) {
        const IterationInfo& it = res.info[i];
        std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%d\n", i + 1,
                      it.condition, it.regressor_condition, it.instrument_condition,
                      it.residual_rms, it.step_rel, it.filter_projected ? 1 : 0,
                      it.sensitivity_projected ? 1 : 0);
        text += buf;
    }
    return text;
}

int run_estimate(const EstimateArgs& a, int verbose) {
    const SampledRecord rec = load_record_checked(a.record);
    const MethodSpec method = method_from_name(a.method, rec.config.has_ct_controller());
    EstimatorConfig cfg;
    cfg.n = a.n;
    cfg.m = a.m;
    cfg.oversampled = method.oversampled;
    cfg.max_iterations = a.max_iter;
    cfg.rel_tol = a.rel_tol;
    cfg.svf_cutoff = a.svf_cutoff;
    cfg.stability_policy = a.policy;
    cfg.hold = a.hold;

    const EstimationResult res = estimate(rec, cfg, method.kind);
    const std::string json = estimation_result_to_json(res);
    if (!a.trace.empty()) spit(a.trace, trace_csv(res));
    if (!a.out.empty()) {
        fs::create_directories(a.out);
        spit(fs::path(a.out) / "estimate.json", json + "\n");
        nlohmann::json cfg_json{{"record", a.record},       {"method", a.method},
                                {"n", a.n},                 {"m", a.m},
                                {"max_iter", a.max_iter},   {"rel_tol", a.rel_tol},
                                {"svf_cutoff", a.svf_cutoff}};
        write_manifest(a.out, "estimate", cfg_json, {"estimate.json"});
    } else {
        std::cout << json << "\n";
    }
    if (verbose) {
        std::cerr << "estimate: " << res.iterations << " iterations, converged = "
                  << (res.converged ? "true" : "false") << "\n";
    }
    if (!res.failure_reason.empty()) {
        std::cerr << "ERROR numeric: " << res.failure_reason << "\n";
        return 2;
    }
    return 0;
}

// ---------------------------------------------------------------- diagnose

struct DiagnoseArgs {
    std::string record, method = "clsrivc", model_path, out;
    int n = -1, m = -1, excitation = 0;
    CLI::App* cmd = nullptr;
};

int run_diagnose(const DiagnoseArgs& a, int /*verbose*/) {
    const SampledRecord rec = load_record_checked(a.record);
    const CtTransferFunction model =
        a.model_path.empty() ? rec.config.plant : load_ct_tf_file(a.model_path);
    const int n = a.cmd->count("--n") ? a.n : model.den_degree();
    const int m = a.cmd->count("--m") ? a.m : model.num_degree();
    const MethodSpec method = method_from_name(a.method, rec.config.has_ct_controller());

    EstimatorConfig cfg;
    cfg.n = n;
    cfg.m = m;
    const ThetaVector theta = ThetaVector::from_tf(model, n, m);
    const NormalMatrixDecomposition dec =
        normal_matrix_decomposition(rec, theta, cfg, method.kind);
    const int exc_order = a.excitation > 0 ? a.excitation : n + m + 1;
    const ExcitationReport exc = excitation_order(rec.r, exc_order);

    nlohmann::json j;
    j["record"] = {{"n_samples", static_cast<int>(rec.y.size())},
                   {"h", rec.y.h},
                   {"oversample_m", rec.config.oversample_m}};
    j["method"] = method.name;
    j["model"] = {{"n", n}, {"m", m}};
    j["snr_db"] = measure_output_snr_db(rec.config);
    j["excitation"] = {{"order", exc_order}, {"rank_gap", exc.rank_gap}, {"satisfied", exc.satisfied}};
    j["decomposition"] = {{"sigma_min_main", dec.sigma_min_main},
                          {"norm_perturbation", dec.norm_perturbation},
                          {"dominant", dec.dominant}};
    const std::string text = j.dump(2);
    if (!a.out.empty()) {
        fs::create_directories(a.out);
        spit(fs::path(a.out) / "diagnosis.json", text + "\n");
        nlohmann::json cfg_json{{"record", a.record}, {"method", a.method}, {"n", n}, {"m", m}};
        write_manifest(a.out, "diagnose", cfg_json, {"diagnosis.json"});
    } else {
        std::cout << text << "\n";
    }
    return 0;
}

// ------------------------------------------------------------------- sweep

struct SweepArgs {
    std::string preset, config_path, out = ".";
    std::vector<std::string> methods;
    std::vector<int> sizes;
    int runs = 0, model_n = 0, model_m = 0, jobs = default_jobs(), fig_mean = 0, fig_var = 0;
    uint64_t seed = 1;
    CLI::App* cmd = nullptr;
};

int run_sweep(const SweepArgs& a, int verbose) {
    SweepSpec spec = [&]() {
        if (!a.config_path.empty()) return sweep_spec_from_json(slurp(a.config_path));
        if (!a.preset.empty()) return preset_sweep(a.preset);
        throw std::invalid_argument("sweep needs --preset or --config");
    }();
    const bool ct = spec.scenario.has_ct_controller();
    if (a.cmd->count("--methods")) {
        spec.methods.clear();
        for (const std::string& name : a.methods) spec.methods.push_back(method_from_name(name, ct));
    }
    if (a.cmd->count("--sizes")) spec.sample_sizes = a.sizes;
    if (a.cmd->count("--runs")) spec.runs_per_point = a.runs;
    if (a.cmd->count("--seed")) spec.master_seed = a.seed;
    if (a.cmd->count("--model-n")) spec.model_n = a.model_n;
    if (a.cmd->count("--model-m")) spec.model_m = a.model_m;
    spec.jobs = a.jobs;

    // Figure numbering convention: the continuous-controller study plots as
    // figures 2/3, the discrete-controller study as 4/5.
    const bool setting2 = !ct;
    const int fig_mean = a.cmd->count("--fig-mean") ? a.fig_mean : (setting2 ? 4 : 2);
    const int fig_var = a.cmd->count("--fig-var") ? a.fig_var : (setting2 ? 5 : 3);

    const SweepReport rep = run_consistency_sweep(spec);
    std::vector<std::string> artifacts = emit_sweep_report(rep, a.out, fig_mean, fig_var);
    write_manifest(a.out, "sweep", nlohmann::json::parse(sweep_spec_to_json(spec)), artifacts);
    if (verbose) {
        for (size_t mi = 0; mi < rep.method_names.size(); ++mi) {
            for (size_t s = 0; s < rep.sample_sizes.size(); ++s) {
                const SweepCell& cell = rep.cells[mi][s];
                std::cerr << rep.method_names[mi] << " N=" << rep.sample_sizes[s]
                          << " converged " << cell.converged_runs << "/" << rep.runs_per_point
                          << (cell.valid ? "" : " [invalid]") << "\n";
            }
        }
    }
    return 0;
}

// ------------------------------------------------------------------ table1

struct Table1Args {
    std::string out = ".";
    int runs = 300, jobs = default_jobs();
    uint64_t seed = 1;
};

int run_table1_cmd(const Table1Args& a, int verbose) {
    const Table1Report rep = run_table1(a.runs, a.seed, a.jobs);
    std::vector<std::string> artifacts = emit_table1(rep, a.out);
    nlohmann::json cfg_json{{"runs", a.runs}, {"seed", a.seed}};
    write_manifest(a.out, "table1", cfg_json, artifacts);
    if (verbose) {
        for (size_t mi = 0; mi < rep.method_names.size(); ++mi) {
            std::cerr << rep.method_names[mi] << " converged " << rep.converged_runs[mi] << "/"
                      << a.runs << "\n";
        }
    }
    return 0;
}

// ---------------------------------------------------------------- bias-snr

struct BiasArgs {
    std::string config_path, method, out = ".";
    int runs = 0, snr_count = 0, model_n = 0, model_m = 0, jobs = default_jobs(), fig = 6;
    double snr_min = 1e-3, snr_max = 1e3;
    std::vector<double> snrs;
    uint64_t seed = 1;
    CLI::App* cmd = nullptr;
};

int run_bias_snr(const BiasArgs& a, int verbose) {
    BiasSpec spec =
        a.config_path.empty() ? preset_bias_spec() : bias_spec_from_json(slurp(a.config_path));
    if (a.cmd->count("--method")) {
        spec.method = method_from_name(a.method, spec.scenario.has_ct_controller());
    }
    if (a.cmd->count("--snrs")) {
        spec.snr_values = a.snrs;
    } else if (a.cmd->count("--snr-count") || a.cmd->count("--snr-min") ||
               a.cmd->count("--snr-max")) {
        const int count = a.cmd->count("--snr-count") ? a.snr_count : 40;
        spec.snr_values = log_spaced_values(a.snr_min, a.snr_max, count);
    }
    if (a.cmd->count("--runs")) spec.runs_per_point = a.runs;
    if (a.cmd->count("--seed")) spec.master_seed = a.seed;
    if (a.cmd->count("--model-n")) spec.model_n = a.model_n;
    if (a.cmd->count("--model-m")) spec.model_m = a.model_m;
    spec.jobs = a.jobs;

    const BiasCurveReport rep = run_bias_vs_snr(spec);
    std::vector<std::string> artifacts = emit_bias_report(rep, a.out, a.fig);
    write_manifest(a.out, "bias-snr", nlohmann::json::parse(bias_spec_to_json(spec)), artifacts);
    if (verbose) {
        for (const BiasPoint& p : rep.points) {
            std::cerr << "snr " << p.snr << " metric " << p.metric << " converged "
                      << p.converged_runs << "/" << rep.runs_per_point << "\n";
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"closed-loop continuous-time system identification toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "0.1.0");
    int verbose = 0;
    app.add_flag("-v,--verbose", verbose, "Print progress details to stderr");

    SimulateArgs sim;
    CLI::App* c_sim = app.add_subcommand("simulate", "Generate a closed-loop record directory");
    sim.cmd = c_sim;
    c_sim->add_option("--preset", sim.preset,
                      "Built-in scenario: paper-setting1, paper-setting2, or paper-bias");
    auto* sim_cfg = c_sim->add_option("--config", sim.config_path,
                                      "Scenario JSON file (schema of the emitted config.json)");
    c_sim->get_option("--preset")->excludes(sim_cfg);
    c_sim->add_option("--plant", sim.plant_path, "Continuous plant transfer-function JSON file");
    c_sim->add_option("--controller", sim.controller_path,
                      "Controller transfer-function JSON file (continuous or discrete)");
    c_sim->add_option("--noise-shaping", sim.shaping_path,
                      "Discrete shaping filter JSON applied to the white disturbance");
    c_sim->add_option("--period", sim.h, "Sample period h in seconds (default 0.1 or scenario value)");
    c_sim->add_option("-N,--n-samples", sim.n_samples, "Number of samples (default 1000 or scenario value)");
    c_sim->add_option("--sigma-r2", sim.sigma_r2, "Reference variance (default 1 or scenario value)");
    c_sim->add_option("--sigma-v2", sim.sigma_v2, "Disturbance variance (default 0 or scenario value)");
    c_sim->add_option("--oversample", sim.oversample,
                      "Also record the plant input on the h/m grid (default 1 or scenario value)");
    c_sim->add_option("--seed", sim.seed, "Master seed (default 1 or scenario value)");
    c_sim->add_option("-o,--out", sim.out, "Output record directory")->required();

    EstimateArgs est;
    CLI::App* c_est = app.add_subcommand("estimate", "Fit a continuous-time model to a record");
    c_est->add_option("--record", est.record, "Record directory written by simulate")->required();
    c_est->add_option("--method", est.method,
                      "srivc, clsrivc, srivc-os, or clsrivc-os (default srivc)");
    c_est->add_option("--n", est.n, "Model denominator order (default 2)");
    c_est->add_option("--m", est.m, "Model numerator order (default 1)");
    c_est->add_option("--max-iter", est.max_iter, "Iteration cap (default 200)");
    c_est->add_option("--rel-tol", est.rel_tol,
                      "Relative parameter step defining convergence (default 1e-7)");
    c_est->add_option("--svf-cutoff", est.svf_cutoff,
                      "Initializer filter bandwidth in rad/s; 0 picks one from the data");
    c_est->add_option("--stability-policy", est.policy,
                      "Unstable filter handling: reflect or abort (default reflect)")
        ->transform(CLI::CheckedTransformer(
            std::map<std::string, StabilityPolicy>{{"reflect", StabilityPolicy::reflect},
                                                   {"abort", StabilityPolicy::abort}},
            CLI::ignore_case));
    c_est->add_option("--hold", est.hold,
                      "Intersample reconstruction for the filters: zoh or foh (default zoh)")
        ->transform(CLI::CheckedTransformer(
            std::map<std::string, HoldType>{{"zoh", HoldType::zero_order},
                                            {"foh", HoldType::first_order}},
            CLI::ignore_case));
    c_est->add_option("--trace", est.trace, "Write per-iteration condition numbers to this CSV file");
    c_est->add_option("-o,--out", est.out,
                      "Directory for estimate.json (default: print JSON to stdout)");

    DiagnoseArgs diag;
    CLI::App* c_diag = app.add_subcommand(
        "diagnose", "Consistency diagnostics: SNR, excitation, normal-matrix dominance");
    diag.cmd = c_diag;
    c_diag->add_option("--record", diag.record, "Record directory written by simulate")->required();
    c_diag->add_option("--method", diag.method,
                       "Instrument whose dominance condition is probed (default clsrivc)");
    c_diag->add_option("--model", diag.model_path,
                       "Model transfer-function JSON (default: the record's plant)");
    c_diag->add_option("--n", diag.n, "Model denominator order (default: model degree)");
    c_diag->add_option("--m", diag.m, "Model numerator order (default: model degree)");
    c_diag->add_option("--excitation-order", diag.excitation,
                       "Persistent-excitation order to probe (default n+m+1)");
    c_diag->add_option("-o,--out", diag.out,
                       "Directory for diagnosis.json (default: print JSON to stdout)");

    SweepArgs swp;
    CLI::App* c_swp = app.add_subcommand("sweep", "Monte Carlo consistency sweep over sample size");
    swp.cmd = c_swp;
    c_swp->add_option("--preset", swp.preset, "paper-setting1 or paper-setting2");
    auto* swp_cfg = c_swp->add_option("--config", swp.config_path, "Sweep spec JSON file");
    c_swp->get_option("--preset")->excludes(swp_cfg);
    c_swp->add_option("--methods", swp.methods, "Comma-separated method list")->delimiter(',');
    c_swp->add_option("--sizes", swp.sizes, "Comma-separated sample sizes (ascending)")
        ->delimiter(',');
    c_swp->add_option("--runs", swp.runs, "Monte Carlo runs per point (default 300)");
    c_swp->add_option("--seed", swp.seed, "Master seed (default 1)");
    c_swp->add_option("--model-n", swp.model_n, "Model denominator order (default 2)");
    c_swp->add_option("--model-m", swp.model_m, "Model numerator order (default 1)");
    c_swp->add_option("-j,--jobs", swp.jobs, "Worker threads (default: all cores)");
    c_swp->add_option("--fig-mean", swp.fig_mean,
                      "Figure number for the mean plot (default 2, or 4 for a discrete controller)");
    c_swp->add_option("--fig-var", swp.fig_var,
                      "Figure number for the variance plot (default 3, or 5 for a discrete controller)");
    c_swp->add_option("-o,--out", swp.out, "Output directory (default .)");

    Table1Args tbl;
    CLI::App* c_tbl = app.add_subcommand(
        "table1", "Sample means of both methods at h = 0.02, N = 200000 (continuous controller)");
    c_tbl->add_option("--runs", tbl.runs, "Monte Carlo runs (default 300)");
    c_tbl->add_option("--seed", tbl.seed, "Master seed (default 1)");
    c_tbl->add_option("-j,--jobs", tbl.jobs, "Worker threads (default: all cores)");
    c_tbl->add_option("-o,--out", tbl.out, "Output directory (default .)");

    BiasArgs bias;
    CLI::App* c_bias = app.add_subcommand(
        "bias-snr", "Normalized bias of the sampled model across SNR (biproper discrete loop)");
    bias.cmd = c_bias;
    c_bias->add_option("--config", bias.config_path, "Bias spec JSON file (default: built-in preset)");
    c_bias->add_option("--method", bias.method, "Estimation method (default srivc)");
    c_bias->add_option("--runs", bias.runs, "Monte Carlo runs per SNR point (default 300)");
    c_bias->add_option("--seed", bias.seed, "Master seed (default 1)");
    c_bias->add_option("--snrs", bias.snrs, "Comma-separated explicit SNR grid")->delimiter(',');
    c_bias->add_option("--snr-min", bias.snr_min, "Lower end of the log SNR grid (default 1e-3)");
    c_bias->add_option("--snr-max", bias.snr_max, "Upper end of the log SNR grid (default 1e3)");
    c_bias->add_option("--snr-count", bias.snr_count, "Points in the log SNR grid (default 40)");
    c_bias->add_option("--model-n", bias.model_n, "Model denominator order (default 1)");
    c_bias->add_option("--model-m", bias.model_m, "Model numerator order (default 1)");
    c_bias->add_option("-j,--jobs", bias.jobs, "Worker threads (default: all cores)");
    c_bias->add_option("--fig", bias.fig, "Figure number for the bias curve (default 6)");
    c_bias->add_option("-o,--out", bias.out, "Output directory (default .)");

    CLI::App* c_keys = app.add_subcommand(
        "config-keys", "Enumerate every option of every subcommand (tab-separated)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
        std::cerr << "ERROR config: " << e.what() << "\n";
        return 1;
    }

    try {
        if (c_keys->parsed()) {
            for (const CLI::Option* opt : app.get_options()) {
                std::cout << "global\t" << opt->get_name(false, true) << "\n";
            }
            for (const CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; })) {
                for (const CLI::Option* opt : sub->get_options()) {
                    std::cout << sub->get_name() << "\t" << opt->get_name(false, true) << "\n";
                }
            }
            return 0;
        }
        if (c_sim->parsed()) return run_simulate(sim, verbose);
        if (c_est->parsed()) return run_estimate(est, verbose);
        if (c_diag->parsed()) return run_diagnose(diag, verbose);
        if (c_swp->parsed()) return run_sweep(swp, verbose);
        if (c_tbl->parsed()) return run_table1_cmd(tbl, verbose);
        if (c_bias->parsed()) return run_bias_snr(bias, verbose);
        std::cerr << "ERROR config: no subcommand selected\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "ERROR config: " << e.what() << "\n";
        return 1;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "ERROR config: " << e.what() << "\n";
        return 1;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "ERROR config: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "ERROR numeric: " << e.what() << "\n";
        return 2;
    }
}
