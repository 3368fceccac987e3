#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace edgetwin {

// Deterministic PRNG with hand-rolled distributions. Byte-identical output is
// part of the simulator's contract (rerun with the same seed => same CSVs), so
// nothing here may delegate to std::<distribution>, whose algorithms differ
// between standard libraries.

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) { reseed(seed); }

    void reseed(std::uint64_t seed) {
        // xoshiro256++ state must not be all-zero; splitmix64 never yields
        // four zero words from any seed.
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64(sm);
        has_spare_ = false;
        spare_ = 0.0;
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

    // Uniform in [0, 1): top 53 bits scaled by 2^-53.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) {
        if (!(lo <= hi)) throw std::invalid_argument("Rng::uniform: lo > hi");
        return lo + (hi - lo) * uniform01();
    }

    // Integer in [0, n) via 128-bit multiply (no modulo bias worth caring
    // about at these ranges, and fully deterministic).
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("Rng::below: n == 0");
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    // Box-Muller with cached spare.
    double normal(double mean, double stdev) {
        if (!(stdev >= 0.0)) throw std::invalid_argument("Rng::normal: stdev < 0");
        if (has_spare_) {
            has_spare_ = false;
            return mean + stdev * spare_;
        }
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();  // log(0) guard
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return mean + stdev * r * std::cos(theta);
    }

    // Exponential with the given mean: -mean * log(1 - U), U in [0,1).
    double exponential(double mean) {
        if (!(mean > 0.0)) throw std::invalid_argument("Rng::exponential: mean <= 0");
        return -mean * std::log(1.0 - uniform01());
    }

    // Derive an independent substream seed (label keeps streams apart).
    std::uint64_t substream_seed(std::uint64_t label) {
        std::uint64_t sm = next_u64() ^ (label * 0x9e3779b97f4a7c15ULL);
        return splitmix64(sm);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4]{};
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace edgetwin
