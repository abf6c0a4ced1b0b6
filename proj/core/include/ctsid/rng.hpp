#pragma once

#include <cmath>
#include <cstdint>

namespace ctsid {

/**
 * Counter-based deterministic random source.  Every draw is a pure function
 * of (key, counter), so streams can be replayed or consumed out of order and
 * parallel workers never contend for shared state.
 */
class CounterRng {
public:
    explicit CounterRng(uint64_t key) : key_(key) {}

    static uint64_t mix(uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    uint64_t bits(uint64_t counter) const { return mix(key_ + counter * 0x9e3779b97f4a7c15ULL); }

    // Strictly inside (0,1).
    double uniform(uint64_t counter) const {
        return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller on the counter pair (2i, 2i+1).
    double gaussian(uint64_t index) const {
        const double u1 = uniform(2 * index);
        const double u2 = uniform(2 * index + 1);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

private:
    uint64_t key_;
};

// Key derivation for independent streams: one master seed fans out into
// per-run, per-purpose keys without overlap.
inline uint64_t derive_seed(uint64_t master, uint64_t a, uint64_t b = 0) {
    uint64_t h = CounterRng::mix(master ^ 0x6a09e667f3bcc908ULL);
    h = CounterRng::mix(h + 0x9e3779b97f4a7c15ULL * a);
    h = CounterRng::mix(h + 0x9e3779b97f4a7c15ULL * b);
    return h;
}

}  // namespace ctsid
