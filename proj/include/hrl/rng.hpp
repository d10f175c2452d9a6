#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace hrl {

// SplitMix64 scrambler, used to turn small sequential seeds into
// well-spread engine states.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d49bb133111ebULL;
    return x ^ (x >> 31);
}

// Seeded random stream. All distribution mapping is done by hand on top of
// raw mt19937_64 output so that draw sequences are identical across
// standard-library implementations.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    std::uint64_t raw() { return engine_(); }

    // Uniform in [0, 1).
    double u01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform in (0, 1), never exactly 0 or 1.
    double u01_open() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

    // Standard normal via Box-Muller; consumes exactly two raw draws.
    double gauss() {
        const double u1 = u01_open();
        const double u2 = u01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

    double normal(double mu, double sigma) { return mu + sigma * gauss(); }

    // Uniform integer in [0, n).
    std::size_t index(std::size_t n) {
        return static_cast<std::size_t>(u01() * static_cast<double>(n)) % n;
    }

    bool chance(double p) { return u01() < p; }

private:
    std::mt19937_64 engine_;
};

}  // namespace hrl
