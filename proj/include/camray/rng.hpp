#pragma once

#include <cstdint>

namespace camray {

/// SplitMix64: a counter-based 64-bit generator. The state advances by the golden-ratio
/// increment 0x9E3779B97F4A7C15 and each output is the counter passed through the
/// finalizer (shifts 30/27/31, multipliers 0xBF58476D1CE4E5B9 and 0x94D049BB133111EB).
/// Streams are reproducible within this implementation only.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi); returns lo when the interval is empty.
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller (one draw per call, second value discarded).
    double normal();

    std::uint64_t state() const { return state_; }

private:
    std::uint64_t state_;
};

}  // namespace camray
