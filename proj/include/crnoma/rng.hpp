#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace crnoma {

// Deterministic random stream. All draws go through explicit inverse-CDF /
// bit-twiddling code instead of std:: distributions so that a given seed
// produces the same sequence on every platform and standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

    void reseed(std::uint64_t seed) {
        seed_ = seed;
        engine_.seed(seed);
    }

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    // Unit-mean exponential (Rayleigh power fading).
    double exponential() {
        return -std::log1p(-uniform01());
    }

    double gaussian() {
        // Box-Muller; one value per call keeps the stream simple to reason about.
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    // Triangular on [-1, 1] with the given mode, by inverse CDF.
    double triangular(double mode) {
        const double a = -1.0, b = 1.0;
        double u = uniform01();
        double fc = (mode - a) / (b - a);
        if (u < fc)
            return a + std::sqrt(u * (b - a) * (mode - a));
        return b - std::sqrt((1.0 - u) * (b - a) * (b - mode));
    }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        return engine_() % n;
    }

    static std::uint64_t mix(std::uint64_t x) {
        // splitmix64 finalizer
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

// Stream splitter used by the harness: one root seed, stable per-task substreams.
inline std::uint64_t substream_seed(std::uint64_t root, std::uint64_t a, std::uint64_t b = 0) {
    return Rng::mix(Rng::mix(root ^ (a * 0x9e3779b97f4a7c15ULL)) ^ b);
}

} // namespace crnoma
