#pragma once

#include <cmath>
#include <cstdint>

namespace adversketch {

// 64-bit finalizer (splitmix64 style).
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Combine two words into one well-mixed word: wyhash-style mum, then a
// finalizer pass. The plain xor-fold leaves low-bit structure on consecutive
// keys (x*y mod 2^k walks residues almost evenly), which biases small-modulus
// bucket hashes.
inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
    __uint128_t m = static_cast<__uint128_t>(a ^ 0x2545f4914f6cdd1dull) *
                    (b ^ 0x9e3779b97f4a7c15ull);
    return mix64(static_cast<std::uint64_t>(m) ^ static_cast<std::uint64_t>(m >> 64));
}

// Per-run seeds are derived from a master seed by counter mixing.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t counter) {
    return mix64(master, mix64(counter + 1));
}

// Counter-based generator with portable floating-point distributions.
// std::* distributions are implementation-defined, which would break the
// bit-for-bit reproducibility of reports across platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        std::uint64_t x = state_;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
        return x ^ (x >> 31);
    }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n), n > 0. Lemire reduction; the bias of
    // ~n/2^64 is far below anything our statistics can resolve.
    std::uint64_t below(std::uint64_t n) {
        __uint128_t m = static_cast<__uint128_t>(next_u64()) * n;
        return static_cast<std::uint64_t>(m >> 64);
    }

    int rademacher() { return (next_u64() >> 63) ? 1 : -1; }

    bool bernoulli(double p) { return uniform() < p; }

    // Standard normal via Marsaglia polar (no trig, portable).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        have_spare_ = true;
        return u * f;
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace adversketch
