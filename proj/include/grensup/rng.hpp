#pragma once

#include <cstdint>

namespace grensup {

// splitmix64 finalizer; used both as a seed expander and as the stream hash.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Stream seed for a (master, a, b) triple, e.g. (master_seed, n, replicate).
// Parallel and serial execution draw from the same per-stream sequence.
inline std::uint64_t derive_stream(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
    std::uint64_t h = mix64(master);
    h = mix64(h ^ a);
    h = mix64(h ^ b);
    return h;
}

// Quantile of the standard normal distribution (Wichura's AS 241, PPND16).
// Accurate to ~1e-15 relative over p in (0,1); throws std::domain_error otherwise.
double inverse_normal_cdf(double p);

// xoshiro256++ with splitmix64 seeding.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : s_) {
            sm += 0x9e3779b97f4a7c15ULL;
            std::uint64_t z = sm;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            w = z ^ (z >> 31);
        }
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

    // Uniform on [0,1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on (0,1); safe as input to inverse-CDF transforms.
    double uniform_open() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard normal via inverse CDF (no rejection, fixed draw count per variate).
    double normal() { return inverse_normal_cdf(uniform_open()); }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
};

}  // namespace grensup
