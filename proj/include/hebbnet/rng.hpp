#pragma once

#include <cstdint>
#include <cmath>
#include <initializer_list>

// Deterministic, portable random number generation. Everything downstream
// (weight init, ES noise, track generation) must reproduce bit-identically
// from a seed, so we avoid std:: distributions (implementation-defined) and
// use xoshiro256++ with explicit sampling routines.

namespace hebbnet {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Chains a seed with a sequence of stream identifiers. Used to carve
// independent, reconstructible streams out of one master seed, e.g.
// derive_seed(master, {kNoiseStream, generation, index}).
inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = splitmix64(seed ^ 0x8f1bbcdcbfa53e0bULL);
    for (std::uint64_t p : path) {
        s = splitmix64(s ^ splitmix64(p ^ 0xd1342543de82ef95ULL));
    }
    return s;
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        // Seed expansion via splitmix64, the reference recommendation.
        std::uint64_t x = seed;
        for (auto& w : state_) {
            x = splitmix64(x);
            w = x;
        }
        if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) {
            state_[0] = 0x1ULL;
        }
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    // Inclusive bounds. Rejection-free modulo is fine here: ranges are tiny
    // compared to 2^64 so the bias is far below anything observable.
    int uniform_int(int lo, int hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(next_u64() % span);
    }

    // Standard normal via Marsaglia's polar method. No trig, fully
    // deterministic per stream. Caches the spare deviate.
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
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        has_spare_ = true;
        return u * m;
    }

    double normal(double mean, double stddev) {
        return mean + stddev * normal();
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4];
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Stream tags for derive_seed paths. Fixed constants so checkpoints stay
// replayable across versions.
namespace stream {
constexpr std::uint64_t es_noise = 0x45531;
constexpr std::uint64_t train_episode = 0x45532;
constexpr std::uint64_t eval_bank = 0x45533;
constexpr std::uint64_t weight_init = 0x45534;
constexpr std::uint64_t env = 0x45535;
constexpr std::uint64_t morphology = 0x45536;
constexpr std::uint64_t track = 0x45537;
constexpr std::uint64_t perturbation = 0x45538;
constexpr std::uint64_t genome_init = 0x45539;
constexpr std::uint64_t sphere_target = 0x4553a;
constexpr std::uint64_t episode_polarity = 0x4553b;
}  // namespace stream

}  // namespace hebbnet
