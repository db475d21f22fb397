#pragma once

#include <cstdint>

namespace pwd {

// Counter-based SplitMix64: the value for (key, counter) is the SplitMix64
// finaliser applied to key + (counter + 1) * golden_gamma. Any draw can be
// recomputed from its key and position without replaying a stream, which is
// how per-batch and per-shot randomness is derived from one master seed.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t key) : key_(key) {}

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t at(std::uint64_t counter) const { return mix(key_ + (counter + 1) * 0x9E3779B97F4A7C15ULL); }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform_at(std::uint64_t counter) const { return static_cast<double>(at(counter) >> 11) * 0x1.0p-53; }

    std::uint64_t next() { return at(counter_++); }
    double uniform() { return uniform_at(counter_++); }
    // Standard normal via Box-Muller on two consecutive draws.
    double normal();

    // Key for an independent sub-stream, e.g. one per shot batch.
    CounterRng child(std::uint64_t index) const { return CounterRng(mix(key_ ^ mix(index + 0x632BE59BD9B4E019ULL))); }

    std::uint64_t key() const { return key_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace pwd
