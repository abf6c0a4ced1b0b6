#include "ctsid/signal.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

namespace ctsid {

SampledSignal decimate(const SampledSignal& fast, int m) {
    if (m < 1) throw std::invalid_argument("decimation factor must be >= 1");
    SampledSignal out;
    out.h = fast.h * m;
    out.t0 = fast.t0;
    out.values.reserve(fast.values.size() / static_cast<size_t>(m) + 1);
    for (size_t k = 0; k < fast.values.size(); k += static_cast<size_t>(m)) {
        out.values.push_back(fast.values[k]);
    }
    return out;
}

void save_signal_csv(const std::filesystem::path& path, const SampledSignal& sig) {
    std::FILE* f = std::fopen(path.string().c_str(), "w");
    if (!f) throw std::runtime_error("cannot open for writing: " + path.string());
    std::fputs("t,value\n", f);
    for (size_t k = 0; k < sig.values.size(); ++k) {
        std::fprintf(f, "%.17g,%.17g\n", sig.time_at(k), sig.values[k]);
    }
    std::fclose(f);
}

SampledSignal load_signal_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
    std::string line;
    if (!std::getline(in, line) || line.rfind("t,value", 0) != 0) {
        throw std::runtime_error("signal CSV must start with header \"t,value\": " + path.string());
    }
    std::vector<double> times, values;
    size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const size_t comma = line.find(',');
        if (comma == std::string::npos) {
            throw std::runtime_error("malformed CSV line " + std::to_string(lineno) + " in " + path.string());
        }
        try {
            times.push_back(std::stod(line.substr(0, comma)));
            values.push_back(std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            throw std::runtime_error("malformed CSV line " + std::to_string(lineno) + " in " + path.string());
        }
    }
    SampledSignal sig;
    sig.values = std::move(values);
    if (times.empty()) {
        sig.h = 0.0;
        return sig;
    }
    sig.t0 = times.front();
    if (times.size() == 1) {
        sig.h = 0.0;
        return sig;
    }
    sig.h = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
    if (!(sig.h > 0.0)) throw std::runtime_error("signal CSV timestamps must increase: " + path.string());
    const double span = std::abs(times.back() - times.front()) + std::abs(times.front());
    for (size_t k = 0; k < times.size(); ++k) {
        const double expected = sig.t0 + sig.h * static_cast<double>(k);
        if (std::abs(times[k] - expected) > 1e-9 * (1.0 + span)) {
            throw std::runtime_error("signal CSV grid is not uniform at line " + std::to_string(k + 2) +
                                     ": " + path.string());
        }
    }
    return sig;
}

}  // namespace ctsid
