#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace lifetail {

/// Deterministic random source used throughout the toolkit.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard, so results are bit-reproducible across platforms for a given
/// seed. Doubles are derived from the raw 64-bit words directly (the standard
/// distribution adaptors are implementation-defined and would break
/// reproducibility). All sampling in the project is inverse-cdf or
/// Box-Muller on top of these uniforms.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1): 53 random mantissa bits.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform on (0, 1]: safe as a log() argument.
    double uniform_pos() { return 1.0 - uniform01(); }

    /// Standard exponential via inversion.
    double exponential() { return -std::log(uniform_pos()); }

    /// Standard normal, Box-Muller with a cached spare.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(2.0 * exponential());
        const double theta = 2.0 * kPi * uniform01();
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    /// Poisson count by unit-exponential summation; exact, O(mean).
    std::uint64_t poisson(double mean) {
        double acc = 0.0;
        std::uint64_t k = 0;
        while (true) {
            acc += exponential();
            if (acc >= mean) return k;
            ++k;
        }
    }

    std::uint64_t next_u64() { return engine_(); }

    /// SplitMix64 finalizer over (seed, stream). Used wherever replications
    /// need independent substreams: each replication r runs on
    /// Rng(derive_stream(seed, r)).
    static std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

  private:
    static constexpr double kPi = 3.141592653589793238462643383279502884;
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace lifetail
