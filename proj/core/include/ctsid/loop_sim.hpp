#pragma once

#include "ctsid/signal.hpp"
#include "ctsid/transfer_function.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>

namespace ctsid {

/**
 * Closed-loop data generation: plant G(p) in negative feedback with a
 * controller C, reference r added at the loop input and disturbance v at the
 * plant output:  u = C (r - y),  y = G u + v.
 *
 * r(t_k) and v(t_k) are zero-mean white Gaussian sequences held constant
 * over each sample interval.  The controller variant decides the loop type:
 *
 *  - CtTransferFunction: the controller acts in continuous time, so u(t) is
 *    smooth between samples.  Because both exogenous inputs are held, a
 *    zero-order-hold discretization of the closed loop at period h/m is
 *    exact at every grid instant; recorded samples carry no integration
 *    error at any oversampling factor.
 *  - DtTransferFunction: the controller is a sampled-data device driving a
 *    ZOH actuator; the whole loop collapses to an exact discrete recursion
 *    and u(t) is genuinely piecewise constant.
 */
struct ScenarioConfig {
    CtTransferFunction plant;
    std::variant<CtTransferFunction, DtTransferFunction> controller;
    double h = 0.1;
    int n_samples = 1000;
    double sigma_r2 = 1.0;  // reference variance
    double sigma_v2 = 0.0;  // output disturbance variance
    int oversample_m = 1;   // record u on the h/m grid too when m > 1
    uint64_t seed = 1;
    // Optional discrete shaping filter applied to the white disturbance
    // sequence (colored noise studies); must be stable, same period h.
    std::optional<DtTransferFunction> noise_shaping;

    bool has_ct_controller() const { return std::holds_alternative<CtTransferFunction>(controller); }
};

struct SampledRecord {
    SampledSignal r, u, y;
    std::optional<SampledSignal> u_fast;  // present when config.oversample_m > 1
    ScenarioConfig config;
};

// Validates the scenario (closed-loop stability, solvable feedthrough loop,
// consistent sample periods) and produces a record.  Identical configs give
// bit-identical records.
SampledRecord simulate(const ScenarioConfig& cfg);

// Separated responses of the same scenario: the record with v forced to zero
// (reference contribution only) and with r forced to zero.  Used for SNR
// accounting and interpolation-error diagnostics.
SampledRecord simulate_noise_free(const ScenarioConfig& cfg);

// The exogenous sequences a scenario draws before the loop runs: the held
// reference and the (possibly shaped) output disturbance.  Exposing them lets
// callers probe noise/instrument correlations without re-deriving the seeds.
SampledSignal scenario_reference(const ScenarioConfig& cfg);
SampledSignal scenario_disturbance(const ScenarioConfig& cfg);

// Output signal-to-noise ratio in dB: variance of the measured output over
// the variance of the disturbance sequence added to it.
double measure_output_snr_db(const ScenarioConfig& cfg);

struct ExcitationReport {
    double rank_gap = 0.0;  // min eigenvalue of the order-k autocovariance Toeplitz / trace
    bool satisfied = false;
};

// Persistent-excitation probe of a recorded sequence up to the given order.
ExcitationReport excitation_order(const SampledSignal& r, int order, double tol = 1e-4);

// Scenario (de)serialization and record persistence: a record directory
// holds config.json, signals.csv (t,r,u,y) and u_fast.csv when oversampled.
std::string scenario_to_json(const ScenarioConfig& cfg);
ScenarioConfig scenario_from_json(const std::string& text);
void save_record(const std::filesystem::path& dir, const SampledRecord& rec);
SampledRecord load_record(const std::filesystem::path& dir);

}  // namespace ctsid
