#pragma once

#include <cmath>
#include <cstdint>

namespace loco {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Counter-based generator: the n-th draw is a pure function of
/// (seed, stream, n), so streams never depend on each other's consumption.
/// All distributions are implemented here rather than via <random>, whose
/// distributions are not reproducible across standard libraries.
class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t stream)
        : key_(splitmix64(splitmix64(seed) ^ (stream * 0xd1b54a32d192ed03ULL))) {}

    /// Independent child stream.
    Rng split(std::uint64_t stream) const { return Rng(key_, stream + 1); }

    std::uint64_t next_u64() { return splitmix64(key_ ^ splitmix64(counter_++)); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)); }

    /// Standard normal via Box-Muller (one value per call, no caching).
    double normal() {
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    double normal(double mean, double sigma) { return mean + sigma * normal(); }

    std::uint64_t draws() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// Fixed stream ids so every consumer draws from its own sequence.
namespace streams {
inline constexpr std::uint64_t kKeyframes = 1;
inline constexpr std::uint64_t kGates = 2;
inline constexpr std::uint64_t kPilot = 3;
inline constexpr std::uint64_t kDataset = 4;
} // namespace streams

} // namespace loco
