#pragma once

#include <cstdint>

namespace retinet {

// xoshiro256** seeded through splitmix64. Every stochastic choice in the
// project (weight init, dropout masks, shuffles, test field generation) goes
// through this generator so runs reproduce bit-for-bit across platforms.
class Rng {
public:
    explicit Rng(uint64_t seed) {
        uint64_t s = seed;
        for (auto& word : state_) word = splitmix64(s);
    }

    uint64_t next_u64() {
        const uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform in [0, 1), 24 bits of mantissa.
    float uniform() {
        return static_cast<float>(next_u64() >> 40) * 0x1.0p-24f;
    }

    float uniform(float lo, float hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n), n >= 1. Lemire multiply-shift; deterministic.
    uint64_t uniform_int(uint64_t n) {
        return static_cast<uint64_t>(
            (static_cast<__uint128_t>(next_u64()) * n) >> 64);
    }

    bool bernoulli(float p) { return uniform() < p; }

    // Derives an independent stream, e.g. one per epoch.
    static uint64_t mix(uint64_t seed, uint64_t salt) {
        uint64_t s = seed ^ (0x9E3779B97F4A7C15ull * (salt + 1));
        return splitmix64(s);
    }

private:
    static uint64_t splitmix64(uint64_t& s) {
        s += 0x9E3779B97F4A7C15ull;
        uint64_t z = s;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    static uint64_t rotl(uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    uint64_t state_[4];
};

} // namespace retinet
