#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace flow714 {

// splitmix64 finalizer, used to whiten seeds and derive substream seeds.
constexpr uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Deterministic random source. Wraps std::mt19937_64 (whose sequence is
// pinned by the standard) but maps to doubles with explicit arithmetic so
// streams are reproducible bit-for-bit; std::normal_distribution and
// friends are implementation-defined and never used here.
class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(splitmix64(seed)) {}

    // Independent substream for (seed, a, b), e.g. (run seed, step, item).
    static Rng stream(uint64_t seed, uint64_t a, uint64_t b = 0) {
        return Rng(splitmix64(seed ^ splitmix64(a ^ splitmix64(b ^ 0x5bf0'3635'dea8'71a3ULL))));
    }

    uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in (0, 1]; safe as a log() argument.
    double uniform_open() { return 1.0 - uniform(); }

    // Uniform integer in [0, n).
    uint64_t below(uint64_t n) { return next_u64() % n; }

    // Standard normal via Box-Muller; the paired value is cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform_open();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        constexpr double kTwoPi = 6.283185307179586476925286766559;
        spare_ = r * std::sin(kTwoPi * u2);
        have_spare_ = true;
        return r * std::cos(kTwoPi * u2);
    }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace flow714
