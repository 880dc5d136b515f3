#pragma once

// Shared generator of random well-conditioned finite-rank instances for the
// perturbation tests and the acceptance suite.

#include <optional>
#include <random>

#include "sigsub/perturb.hpp"
#include "sigsub/series.hpp"

namespace sigsub::testutil {

struct Instance {
    PerturbationPair pair;
    double delta = 0.0;
    double beta = 0.0;  // scalar B(delta)/mu_min
    int d = 0;
};

struct InstanceOptions {
    int max_dim = 12;
    int max_rank = 3;
    double beta_lo = 0.01;
    double beta_hi = 0.09;
    double min_conditioning = 1e-6;  // mu_min / mu_max of the signal
};

inline double uniform(std::mt19937_64& eng, double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// Oscillating signal of exact rank d (a zero-frequency term supplies odd ranks).
inline SeriesSpec random_finite_rank_spec(std::mt19937_64& eng, int d) {
    Oscillating fam;
    double omega = 0.0;
    if (d % 2 == 1) fam.terms.push_back({uniform(eng, 0.5, 2.0), 0.0, 0.0});
    const int pairs = d / 2;
    for (int i = 0; i < pairs; ++i) {
        omega += uniform(eng, 0.04, 0.4 / pairs);
        fam.terms.push_back({uniform(eng, 0.5, 2.0), omega, uniform(eng, 0.0, 6.28)});
    }
    return SeriesSpec(fam);
}

// Draws until the signal is well conditioned and the oracle gap holds.
inline std::optional<Instance> draw_instance(std::mt19937_64& eng, const InstanceOptions& opt) {
    const int d = 1 + static_cast<int>(eng() % static_cast<std::uint64_t>(opt.max_rank));
    const int lo = d + 2;
    const int L = lo + static_cast<int>(eng() % static_cast<std::uint64_t>(opt.max_dim - lo + 1));
    const int K = lo + static_cast<int>(eng() % static_cast<std::uint64_t>(opt.max_dim - lo + 1));
    const int n = L + K - 1;

    const SeriesSpec spec = random_finite_rank_spec(eng, d);
    const Series sig = generate(spec, n);
    const Series noi = generate(SeriesSpec(WhiteNoise{}), n, eng());

    PerturbationPair pair;
    try {
        pair = PerturbationPair::make(embed(sig, L), embed(noi, L), RankPolicy::exact(d));
    } catch (const DegenerateRankError&) {
        return std::nullopt;
    }
    if (pair.dec.mu_min < opt.min_conditioning * pair.dec.mu_max) return std::nullopt;

    const double beta_target = uniform(eng, opt.beta_lo, opt.beta_hi);
    const double t = beta_target * pair.dec.mu_min;
    const double delta =
        (-pair.norm_A1 + std::sqrt(pair.norm_A1 * pair.norm_A1 + 4.0 * pair.norm_A2 * t)) /
        (2.0 * pair.norm_A2);

    try {
        projector_direct(pair, delta, d);
    } catch (const GapError&) {
        return std::nullopt;
    }
    Instance inst{std::move(pair), delta, beta_target, d};
    return inst;
}

inline Instance next_instance(std::mt19937_64& eng, const InstanceOptions& opt = {}) {
    for (int tries = 0; tries < 200; ++tries) {
        auto inst = draw_instance(eng, opt);
        if (inst) return std::move(*inst);
    }
    throw std::runtime_error("instance generator stalled");
}

}  // namespace sigsub::testutil
