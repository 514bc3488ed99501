#pragma once

#include <cmath>
#include <cstdint>

namespace qfb {

/// xoshiro256++ seeded through splitmix64. Small, fast, and easy to make
/// bitwise-reproducible across platforms; the algorithm name is recorded in
/// all output metadata so runs can be replayed elsewhere.
class Rng {
public:
    static constexpr const char* kAlgorithm = "xoshiro256++";
    static constexpr const char* kSeeding = "splitmix64";

    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& word : s_) word = splitmix64(x);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform in [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in the open interval (0, 1); redraws the (measure-zero) exact 0.
    double uniform_open() {
        double u = uniform();
        while (u == 0.0) u = uniform();
        return u;
    }

    /// Standard normal via Box-Muller (used for random state generation in scans/tests).
    double normal() {
        double u1 = uniform_open();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    static std::uint64_t splitmix64(std::uint64_t& x) {
        x += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t s_[4];
};

}  // namespace qfb
