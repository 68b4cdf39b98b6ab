#pragma once

#include <cstdint>
#include <cstring>
#include <random>

namespace trekid {

// splitmix64 step; used for seed derivation only.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = a;
    s = splitmix64_next(s) ^ b;
    return splitmix64_next(s);
}

inline std::uint64_t double_bits(double x) {
    std::uint64_t bits;
    std::memcpy(&bits, &x, sizeof bits);
    return bits;
}

// Seed of the RNG substream for one generated graph: a counter-based hash of
// (master seed, cell parameters, global sequence index). Workers never share
// streams, so results are independent of the parallelism degree.
inline std::uint64_t substream_seed(std::uint64_t master, int n, double p, double q,
                                    std::uint64_t sequence_index) {
    std::uint64_t s = mix_seed(master, static_cast<std::uint64_t>(n));
    s = mix_seed(s, double_bits(p));
    s = mix_seed(s, double_bits(q));
    return mix_seed(s, sequence_index);
}

// Deterministic random source. mt19937_64 is fully specified by the standard
// and the uniform helpers below avoid implementation-defined std::
// distributions, so a seed pins the exact draw sequence on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    bool bernoulli(double p) { return uniform() < p; }

    // Unbiased uniform draw from [0, bound) by rejection.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound;  // 2^64 mod bound
        for (;;) {
            std::uint64_t x = next_u64();
            if (x >= threshold) return x % bound;
        }
    }

    int uniform_int(int lo, int hi) {
        return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    // Magnitude uniform in [lo, hi], sign fair.
    double signed_uniform(double lo, double hi) {
        double magnitude = uniform(lo, hi);
        return bernoulli(0.5) ? -magnitude : magnitude;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace trekid
