#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace sigsub {

// Deterministic seed mixing for independent per-unit streams.
// mt19937_64 is fully specified by the standard, and the samplers below
// avoid std::*_distribution (whose output is implementation-defined), so
// identical (seed, indices) give identical draws on every platform.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
    return splitmix64(splitmix64(master ^ splitmix64(a)) ^ splitmix64(b + 0x632be59bd9b4e019ull));
}

enum class Innovation { normal, rademacher, uniform };

// Mean-0, variance-1 innovation sampler with a portable normal generator.
class InnovationSampler {
public:
    InnovationSampler(Innovation kind, std::uint64_t seed) : kind_(kind), eng_(seed) {}

    double operator()() {
        switch (kind_) {
            case Innovation::normal: return normal();
            case Innovation::rademacher: return (eng_() >> 63) ? 1.0 : -1.0;
            case Innovation::uniform: return (2.0 * uniform01() - 1.0) * kSqrt3;
        }
        return 0.0;
    }

private:
    static constexpr double kSqrt3 = 1.7320508075688772;

    double uniform01() {
        // 53-bit mantissa draw in [0,1)
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        // Box-Muller on (0,1] x [0,1)
        double u1 = 1.0 - uniform01();
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    Innovation kind_;
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace sigsub
