#pragma once

// Seeded RNG streams and the distribution samplers the model needs. All
// samplers are hand-rolled on top of mt19937_64 so that a (seed, stream)
// pair reproduces bit-identical draws regardless of standard library.

#include <cmath>
#include <cstdint>
#include <random>

#include "hpgrf/common.hpp"

namespace hpgrf {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Deterministic derivation of independent streams from a user seed.
inline uint64_t substream_seed(uint64_t seed, uint64_t idx) {
    return splitmix64(splitmix64(seed) ^ (0x9E3779B97F4A7C15ull * (idx + 1)));
}

class Rng {
  public:
    explicit Rng(uint64_t seed = 1) : gen_(splitmix64(seed)) {}

    uint64_t bits() { return gen_(); }

    // Uniform on [0,1).
    double u01() { return (gen_() >> 11) * 0x1.0p-53; }
    // Uniform on (0,1); safe for logs.
    double u01p() { return ((gen_() >> 11) + 0.5) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * u01(); }

    double normal() {
        // Box-Muller without the cached spare, to keep stream state minimal.
        const double u1 = u01p(), u2 = u01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

    double exponential() { return -std::log(u01p()); }

    // Gamma(shape, rate) via Marsaglia-Tsang; shapes below 1 use the boost
    // G(a) = G(a+1) U^{1/a}, which stays correct down to tiny shapes (the
    // draw may underflow to 0 for shapes ~1e-3 and smaller).
    double gamma(double shape, double rate) {
        if (!(shape > 0.0) || !(rate > 0.0)) throw NumericError("gamma: invalid parameters");
        if (shape < 1.0) {
            const double u = u01p();
            return gamma(shape + 1.0, rate) * std::pow(u, 1.0 / shape);
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
            const double u = u01p();
            if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v / rate;
        }
    }

    // Poisson by inversion for small means; larger means split in half
    // recursively (sum of independent Poissons), which keeps the inversion
    // product away from underflow.
    long poisson(double mean) {
        if (mean < 0.0 || !std::isfinite(mean)) throw NumericError("poisson: invalid mean");
        if (mean == 0.0) return 0;
        if (mean > 60.0) {
            const double half = 0.5 * mean;
            return poisson(half) + poisson(mean - half);
        }
        const double L = std::exp(-mean);
        long k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= u01();
        } while (p > L);
        return k - 1;
    }

    // Index in [0,n) with probability proportional to w[i] (nonnegative).
    std::size_t categorical(std::span<const double> w) {
        double total = 0.0;
        for (double x : w) total += x;
        if (!(total > 0.0)) throw NumericError("categorical: zero total weight");
        double u = u01() * total;
        for (std::size_t i = 0; i + 1 < w.size(); ++i) {
            u -= w[i];
            if (u < 0.0) return i;
        }
        return w.size() - 1;
    }

  private:
    std::mt19937_64 gen_;
};

}  // namespace hpgrf
