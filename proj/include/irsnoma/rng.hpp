#pragma once

// Random number generation for the Monte Carlo engine. Each trial gets its
// own xoshiro256++ stream seeded from (seed, trial index) through SplitMix64,
// so results are independent of how trials are distributed across workers.
// Gamma variates use Marsaglia-Tsang squeeze rejection, valid for shapes
// from 0.5 up to at least 1e6.

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace irsnoma {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline std::uint64_t fmix64(std::uint64_t k) {
    k ^= k >> 33;
    k *= 0xFF51AFD7ED558CCDull;
    k ^= k >> 33;
    k *= 0xC4CEB9FE1A85EC53ull;
    k ^= k >> 33;
    return k;
}

inline std::uint64_t rotl64(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

} // namespace detail

class Rng {
public:
    explicit Rng(std::uint64_t seed) { seed_state(seed); }

    /// Stream for one Monte Carlo trial; distinct (seed, trial) pairs give
    /// statistically independent streams.
    static Rng for_trial(std::uint64_t seed, std::uint64_t trial) {
        Rng rng(0);
        rng.seed_state(detail::fmix64(seed) ^ (detail::fmix64(trial + 1) * 0x9E3779B97F4A7C15ull));
        return rng;
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = detail::rotl64(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = detail::rotl64(s_[3], 45);
        return result;
    }

    /// Uniform on [0, 1).
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform on (0, 1), safe under log().
    double uniform_open01() {
        return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52;
    }

    /// Standard normal (Marsaglia polar, one spare cached).
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
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    /// Gamma(shape, scale), Marsaglia-Tsang; shape < 1 via the boost
    /// Gamma(shape) = Gamma(shape + 1) * U^(1/shape).
    double gamma(double shape, double scale) {
        if (!(shape > 0.0) || !(scale > 0.0)) {
            throw std::domain_error("Rng::gamma: shape and scale must be positive");
        }
        double boost = 1.0;
        if (shape < 1.0) {
            boost = std::pow(uniform_open01(), 1.0 / shape);
            shape += 1.0;
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform_open01();
            const double x2 = x * x;
            if (u < 1.0 - 0.0331 * x2 * x2) return boost * d * v * scale;
            if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return boost * d * v * scale;
        }
    }

    /// Nakagami(m, 1) magnitude: sqrt of Gamma(m, 1/m); E[X^2] = 1.
    double nakagami(double m) {
        return std::sqrt(gamma(m, 1.0 / m));
    }

private:
    void seed_state(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : s_) {
            word = detail::splitmix64(sm);
        }
        // xoshiro must not start from the all-zero state
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) {
            s_[0] = 0x9E3779B97F4A7C15ull;
        }
    }

    std::uint64_t s_[4] = {};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace irsnoma
