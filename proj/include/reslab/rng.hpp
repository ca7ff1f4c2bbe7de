#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace reslab {

/// SplitMix64 finalizer. Used both as a stand-alone mixer and to expand
/// user seeds into engine state.
inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Combine several integers into one 64-bit seed by folding each word
/// through SplitMix64. Sweeps derive per-(cell, trial) seeds this way, so
/// results are identical no matter how trials are split across workers.
inline std::uint64_t mix_seed(std::initializer_list<std::uint64_t> words)
{
    std::uint64_t h = 0x9E3779B97F4A7C15ULL;
    for (std::uint64_t w : words) h = splitmix64(h ^ w);
    return h;
}

/// Deterministic random stream: mt19937_64 (bit-exact across platforms per
/// the standard) with explicit uniform/gaussian mappings on top, since the
/// std distributions are implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    /// Uniform double in [0, 1) with 53 random mantissa bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal via the Marsaglia polar method (no trig, so the
    /// stream only depends on sqrt/log rounding).
    double gaussian()
    {
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

    double gaussian(double mean, double stddev) { return mean + stddev * gaussian(); }

    std::uint64_t next_u64() { return engine_(); }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace reslab
