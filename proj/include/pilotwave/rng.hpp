#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace pilotwave {

// Counter-based RNG: value(i) is a pure function of (seed, stream, i), so any
// subsystem can be forked by label without consuming state from the others,
// and parallel consumers stay reproducible regardless of scheduling.
// The mix is the SplitMix64 finalizer over a Weyl sequence; output is
// identical on every platform.
class CounterRng {
public:
    CounterRng() = default;
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : base_(mix(seed ^ rotl(stream, 31)) + stream * kGamma) {}

    // Deterministic fork: label selects an independent stream.
    CounterRng fork(std::string_view label) const {
        return CounterRng(base_, fnv1a64(label));
    }

    std::uint64_t bits(std::uint64_t counter) const {
        return mix(base_ + counter * kGamma);
    }

    // Uniform in [0,1) with 53 random bits.
    double uniform(std::uint64_t counter) const {
        return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
    }

    static std::uint64_t fnv1a64(std::string_view s) {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        return h;
    }

private:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ULL;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t base_ = 0;
};

// Stateful view for call sites that just want a sequence.
class RngSequence {
public:
    explicit RngSequence(CounterRng rng, std::uint64_t start = 0)
        : rng_(rng), next_(start) {}

    double uniform() { return rng_.uniform(next_++); }
    std::uint64_t bits() { return rng_.bits(next_++); }

private:
    CounterRng rng_;
    std::uint64_t next_;
};

} // namespace pilotwave
