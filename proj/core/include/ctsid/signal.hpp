#pragma once

#include <filesystem>
#include <vector>

namespace ctsid {

/** Uniformly sampled real signal: values[k] taken at t0 + k*h. */
struct SampledSignal {
    std::vector<double> values;
    double h = 0.0;
    double t0 = 0.0;

    size_t size() const { return values.size(); }
    double time_at(size_t k) const { return t0 + h * static_cast<double>(k); }
};

// Keeps every m-th sample starting at index 0.
SampledSignal decimate(const SampledSignal& fast, int m);

// CSV persistence with header "t,value"; values are written with enough
// digits to round-trip exactly.  Loading rejects non-uniform time grids
// (relative jitter above 1e-9).
void save_signal_csv(const std::filesystem::path& path, const SampledSignal& sig);
SampledSignal load_signal_csv(const std::filesystem::path& path);

}  // namespace ctsid
