#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace eigenamp {

// Deterministic random source. Wraps std::mt19937_64 but maps raw draws to
// doubles by hand so that streams are bit-reproducible across standard
// library implementations (std::uniform_real_distribution and
// std::normal_distribution make no such guarantee).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1) with 53 random mantissa bits.
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Standard normal via Box-Muller (pairs are drawn eagerly; the second
    // value is cached so consecutive calls stay cheap).
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        // Reject u1 == 0 so the logarithm stays finite.
        double u1 = 0.0;
        do {
            u1 = uniform01();
        } while (u1 == 0.0);
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * 3.14159265358979323846 * u2;
        cached_ = r * std::sin(theta);
        have_cached_ = true;
        return r * std::cos(theta);
    }

private:
    std::mt19937_64 gen_;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

// SplitMix64 finalizer; good avalanche, used for deriving independent child
// seeds from a master seed plus a stream tag.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Child seed for stream `tag` under `master`. Injective in `tag` for a fixed
// master, so distinct (point, trial, purpose) tuples never collide.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag) {
    return splitmix64(master ^ splitmix64(tag));
}

}  // namespace eigenamp
