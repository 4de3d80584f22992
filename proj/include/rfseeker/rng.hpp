// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 rfseeker contributors
//
// Deterministic PRNG used everywhere in place of std::mt19937 so that the
// produced streams are identical across compilers and standard libraries.
// xoshiro256++ core seeded through splitmix64, gaussians via the polar method.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace rfseeker {

// Fixed stream ids. Every consumer of randomness owns one id so that streams
// derived from one master seed never alias and stay reproducible when code
// paths are added or reordered.
enum class RngStream : uint64_t {
    waveform = 1,      // baseband source waveform
    obs_noise = 2,     // additive receiver noise in the env
    env_reset = 3,     // start/goal cell draws
    weight_init = 4,   // network parameter init
    action_sample = 5, // categorical sampling during collection
    replay_sample = 6, // replay buffer batch draws
    shuffle = 7,       // minibatch permutation
    epsilon = 8,       // epsilon-greedy coin flips
    eval = 9,          // evaluation episode draws
    meta_task = 10,    // meta-learning task sampling
    dataset = 11,      // grid dataset export noise
    grad_probe = 12,   // finite-difference probe coordinates
};

class Rng {
  public:
    Rng() : Rng(0x853c49e6748fea9bULL) {}

    explicit Rng(uint64_t seed) {
        uint64_t x = seed;
        for (auto &word : state_)
            word = splitmix64(x);
        if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0)
            state_[0] = 0x9e3779b97f4a7c15ULL;
    }

    // independent stream derived from (seed, stream id, instance index)
    static Rng stream(uint64_t seed, RngStream id, uint64_t instance = 0) {
        uint64_t x = seed;
        uint64_t a = splitmix64(x);
        x ^= (static_cast<uint64_t>(id) + 1) * 0x9e3779b97f4a7c15ULL;
        uint64_t b = splitmix64(x);
        x ^= (instance + 1) * 0xbf58476d1ce4e5b9ULL;
        uint64_t c = splitmix64(x);
        return Rng(a ^ (b * 0x94d049bb133111ebULL) ^ c);
    }

    uint64_t next_u64() {
        uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // uniform on [0, 1) with 53 random bits
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform on [lo, hi)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // unbiased integer in [0, n), Lemire rejection
    uint64_t uniform_int(uint64_t n) {
        if (n == 0)
            return 0;
        uint64_t x = next_u64();
        __uint128_t m = static_cast<__uint128_t>(x) * n;
        auto lo = static_cast<uint64_t>(m);
        if (lo < n) {
            uint64_t threshold = (0 - n) % n;
            while (lo < threshold) {
                x = next_u64();
                m = static_cast<__uint128_t>(x) * n;
                lo = static_cast<uint64_t>(m);
            }
        }
        return static_cast<uint64_t>(m >> 64);
    }

    // standard normal, Marsaglia polar method with one cached draw
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

  private:
    static uint64_t rotl(uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

    static uint64_t splitmix64(uint64_t &x) {
        x += 0x9e3779b97f4a7c15ULL;
        uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::array<uint64_t, 4> state_{};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace rfseeker
