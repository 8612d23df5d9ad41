#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <utility>

namespace cogfeed {

// 64-bit finalizer used both as the SplitMix64 output function and as a
// general integer hash for deriving substream seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value) {
    return mix64(seed ^ (0x9E3779B97F4A7C15ULL + value + (seed << 6) + (seed >> 2)));
}

// Deterministic stream seed for (master seed, stream index [, tag]).
// Streams derived from distinct indices are independent for simulation
// purposes, which makes trial evaluation order-free and parallelizable.
constexpr std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t index,
                                           std::uint64_t tag = 0) {
    return hash_combine(hash_combine(mix64(master), index), tag);
}

// SplitMix64 generator. Small, fast, and fully deterministic across
// platforms; one instance per Monte Carlo trial.
class SplitMix64 {
  public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix64(state_);
    }

    // Uniform on [0, 1), 53-bit resolution.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on (0, 1]; safe as a log() argument.
    double next_double_pos() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    double exponential() { return -std::log(next_double_pos()); }

    // Box-Muller; avoids the implementation-defined std::normal_distribution
    // so that byte-reproducibility does not depend on the standard library.
    std::pair<double, double> normal_pair() {
        const double r = std::sqrt(-2.0 * std::log(next_double_pos()));
        const double t = 6.283185307179586476925286766559 * next_double();
        return {r * std::cos(t), r * std::sin(t)};
    }

    // Circularly symmetric complex Gaussian with total variance `variance`.
    std::complex<double> complex_normal(double variance) {
        const auto [re, im] = normal_pair();
        const double s = std::sqrt(variance * 0.5);
        return {s * re, s * im};
    }

    // Chi-square with `shape` complex degrees of freedom (unit mean per dof).
    double gamma_integer(int shape) {
        double sum = 0.0;
        for (int i = 0; i < shape; ++i) sum += exponential();
        return sum;
    }

  private:
    std::uint64_t state_;
};

}  // namespace cogfeed
