#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "ctsid/estimator.hpp"
#include "ctsid/loop_sim.hpp"

namespace ctsid {

struct MethodSpec {
    std::string name;
    InstrumentKind kind = InstrumentKind::model_output;
    bool oversampled = false;
};

// Maps "srivc", "clsrivc", "srivc-os", "clsrivc-os" to a method; the
// sensitivity instrument follows the controller domain.
MethodSpec method_from_name(const std::string& name, bool ct_controller);

// Named scenario presets: "paper-setting1" (continuous controller),
// "paper-setting2" (discrete controller), "paper-bias" (biproper loop).
ScenarioConfig preset_scenario(const std::string& name);

std::vector<int> log_spaced_sizes(int lo, int hi, int count);
std::vector<double> log_spaced_values(double lo, double hi, int count);

struct SweepSpec {
    ScenarioConfig scenario;
    std::vector<MethodSpec> methods;
    std::vector<int> sample_sizes;
    int runs_per_point = 300;
    uint64_t master_seed = 1;
    int model_n = 2;
    int model_m = 1;
    int jobs = 1;
};

// Full-grid sweep defaults for a preset scenario (40 log-spaced sizes, 300
// runs); desk-scale overrides are applied by callers.
SweepSpec preset_sweep(const std::string& name);

struct SweepCell {
    Eigen::VectorXd mean;      // over converged runs only
    Eigen::VectorXd variance;  // unbiased sample variance over converged runs
    int converged_runs = 0;
    int failed_runs = 0;
    double mean_iterations = 0.0;
    bool valid = true;  // false when more than 10% of runs failed
};

struct SweepReport {
    std::vector<std::string> method_names;
    std::vector<int> sample_sizes;
    int runs_per_point = 0;
    uint64_t master_seed = 0;
    int model_n = 0;
    int model_m = 0;
    Eigen::VectorXd theta_true;
    std::vector<std::vector<SweepCell>> cells;  // [method][size]
};

SweepReport run_consistency_sweep(const SweepSpec& spec);

struct Table1Report {
    std::vector<std::string> method_names;
    std::vector<Eigen::VectorXd> means;
    std::vector<int> converged_runs;
    std::vector<int> failed_runs;
    Eigen::VectorXd theta_true;
    int runs = 0;
    uint64_t seed = 0;
    double h = 0.0;
    int n_samples = 0;
};

// Setting-1 sample means at h = 0.02, N = 200000 for the model_output and
// reference-sensitivity methods.
Table1Report run_table1(int runs, uint64_t seed, int jobs = 1);

struct BiasSpec {
    ScenarioConfig scenario;
    MethodSpec method;
    std::vector<double> snr_values;  // sigma_r2 / sigma_v2
    int runs_per_point = 300;
    uint64_t master_seed = 1;
    int model_n = 1;
    int model_m = 1;
    int jobs = 1;
};

BiasSpec preset_bias_spec();

struct BiasPoint {
    double snr = 0.0;
    Eigen::VectorXd mean_theta;
    double metric = 0.0;  // 0 = sampled true plant, 1 = negative controller inverse
    int converged_runs = 0;
    int failed_runs = 0;
    bool valid = true;
};

struct BiasCurveReport {
    std::vector<BiasPoint> points;
    Eigen::VectorXd theta_true;
    int runs_per_point = 0;
    uint64_t master_seed = 0;
    int model_n = 0;
    int model_m = 0;
};

BiasCurveReport run_bias_vs_snr(const BiasSpec& spec);

// Spec (de)serialization for config files.
std::string sweep_spec_to_json(const SweepSpec& spec);
SweepSpec sweep_spec_from_json(const std::string& text);
std::string bias_spec_to_json(const BiasSpec& spec);
BiasSpec bias_spec_from_json(const std::string& text);

// Artifact emission: fig<mean_fig>/<var_fig)/<fig>.csv + .svg plus a JSON
// summary per report.  Returns the artifact file names written.
std::vector<std::string> emit_sweep_report(const SweepReport& rep,
                                           const std::filesystem::path& outdir, int mean_fig,
                                           int var_fig);
std::vector<std::string> emit_table1(const Table1Report& rep,
                                     const std::filesystem::path& outdir);
std::vector<std::string> emit_bias_report(const BiasCurveReport& rep,
                                          const std::filesystem::path& outdir, int fig);

// Deterministic worker pool: runs fn(0..n_tasks) with up to `jobs` threads.
void parallel_for(int n_tasks, int jobs, const std::function<void(int)>& fn);

}  // namespace ctsid
