#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace rydsim {

// splitmix64: used to derive independent substream seeds from (seed, stream id).
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d4a2b8f7b81e95ull;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t s = seed;
    std::uint64_t a = splitmix64(s);
    s = seed ^ (0x6a09e667f3bcc909ull + stream * 0x9e3779b97f4a7c15ull);
    std::uint64_t b = splitmix64(s);
    return a ^ (b + 0x2545f4914f6cdd1dull + (stream << 1));
}

// Deterministic random stream. Each logical task (one Monte Carlo trial, one
// Doppler sample batch, ...) gets its own stream id so results do not depend
// on scheduling or thread count.
class RandomStream {
  public:
    RandomStream(std::uint64_t seed, std::uint64_t stream)
        : eng_(derive_seed(seed, stream)) {}

    std::uint64_t bits() { return eng_(); }

    // uniform in [0,1) with 53 random bits
    double uniform() { return (eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // standard normal, Box-Muller with cached spare
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 0.0, u2 = 0.0;
        do { u1 = uniform(); } while (u1 <= 0.0);
        u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    double normal(double mean, double sigma) { return mean + sigma * normal(); }

    double exponential(double rate) {
        if (!(rate > 0.0)) throw std::invalid_argument("exponential: rate must be > 0");
        double u = 0.0;
        do { u = uniform(); } while (u <= 0.0);
        return -std::log(u) / rate;
    }

    // Poisson by inversion; large means split in halves so the CDF walk
    // stays short and well conditioned.
    std::uint64_t poisson(double mean) {
        if (mean < 0.0) throw std::invalid_argument("poisson: mean must be >= 0");
        if (mean == 0.0) return 0;
        if (mean > 256.0) {
            double half = mean * 0.5;
            return poisson(half) + poisson(mean - half);
        }
        double p = std::exp(-mean);
        double cum = p;
        double u = uniform();
        std::uint64_t k = 0;
        while (u > cum && k < 20000) {
            ++k;
            p *= mean / static_cast<double>(k);
            cum += p;
        }
        return k;
    }

  private:
    std::mt19937_64 eng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace rydsim
