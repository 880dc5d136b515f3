#include "doctest.h"

#include <cmath>
#include <cstdio>

#include "sigsub/examples.hpp"
#include "sigsub/montecarlo.hpp"
#include "sigsub/perturb.hpp"
#include "sigsub/sweep.hpp"

using namespace sigsub;

TEST_CASE("window rules") {
    CHECK(WindowRule::fixed_L(5).dims(20) == std::pair<int, int>{5, 16});
    CHECK(WindowRule::fixed_K(5).dims(20) == std::pair<int, int>{16, 5});
    CHECK(WindowRule::with_alpha(0.5).dims(21) == std::pair<int, int>{11, 11});
    CHECK_THROWS_AS(WindowRule::fixed_L(25).dims(20), std::invalid_argument);
    CHECK_THROWS_AS(WindowRule::with_alpha(1.4), std::invalid_argument);
}

TEST_CASE("exp/const package against the dense oracle") {
    const double a = 1.5, delta = 0.7;
    const auto pkg = example_exp_const(a, delta, WindowRule::with_alpha(0.5), {21, 31, 41});
    for (const auto& pt : pkg.points) {
        const int n = pt.n;
        const auto sig = generate(SeriesSpec(ExponentialSum{{{1.0, a}}}), n);
        const auto noi = generate(SeriesSpec(Constant{}), n);
        const auto pair = PerturbationPair::make(embed(sig, pt.L), embed(noi, pt.L));
        const Matrix dpm = projector_direct(pair, delta, 1).matrix - pair.dec.P0perp;
        CHECK(pt.dP == doctest::Approx(spectral_norm(dpm)).epsilon(1e-9));
        CHECK(pt.v01_norm == doctest::Approx(spectral_norm(V0_1(pair))).epsilon(1e-9));
        // rank-one closed forms assemble the first-order coefficient
        const Matrix v = exp_const_Z1(a, pt.L, pt.K) - 2.0 * exp_const_Z2(a, pt.L, pt.K);
        CHECK(spectral_norm(v - V0_1(pair)) < 1e-11 * spectral_norm(v));
        // normalized residual against the dense evaluation
        const double res = std::pow(a, n) * spectral_norm(dpm - delta * exp_const_Z1(a, pt.L, pt.K));
        CHECK(pt.residual_normalized == doctest::Approx(res).epsilon(1e-6));
    }
}

TEST_CASE("exp/const alpha-regime residual limit") {
    const double a = 1.5, delta = 0.7;
    const auto pkg = example_exp_const(a, delta, WindowRule::with_alpha(0.5), {21, 31, 41, 61});
    CHECK(pkg.residual_limit == doctest::Approx(2.0 * delta * 2.5 * 2.5 / a));
    CHECK(pkg.points.back().residual_normalized ==
          doctest::Approx(pkg.residual_limit).epsilon(1e-3));
}

TEST_CASE("exp/const fixed-K package against the dense oracle") {
    const double a = 1.4, delta = 0.5;
    const int K0 = 6;
    const auto pkg = example_exp_const(a, delta, WindowRule::fixed_K(K0), {25, 35});
    for (const auto& pt : pkg.points) {
        const auto sig = generate(SeriesSpec(ExponentialSum{{{1.0, a}}}), pt.n);
        const auto noi = generate(SeriesSpec(Constant{}), pt.n);
        const auto pair = PerturbationPair::make(embed(sig, pt.L), embed(noi, pt.L));
        CHECK(pt.K == K0);
        CHECK(pt.dP == doctest::Approx(spectral_norm(projector_direct(pair, delta, 1).matrix -
                                                     pair.dec.P0perp))
                           .epsilon(1e-8));
    }
}

TEST_CASE("exp/const fixed-L limit is reached quickly") {
    const double a = 1.5, delta = 0.7;
    const auto pkg = example_exp_const(a, delta, WindowRule::fixed_L(5), {41, 61, 81});
    CHECK(pkg.ratio_limit == doctest::Approx(delta * exp_const_H(a, 5)));
    CHECK(pkg.points.back().normalized == doctest::Approx(pkg.ratio_limit).epsilon(1e-6));
}

TEST_CASE("exp/const fixed-K normalized sequence approaches its limit") {
    const double a = 1.5, delta = 0.7;
    const auto pkg = example_exp_const(a, delta, WindowRule::fixed_K(5), {101, 201, 401, 801});
    const auto& pts = pkg.points;
    for (std::size_t i = 1; i < pts.size(); ++i)
        CHECK(std::abs(pts[i].normalized - pkg.ratio_limit) <
              std::abs(pts[i - 1].normalized - pkg.ratio_limit));
    CHECK(std::abs(pts.back().normalized - pkg.ratio_limit) < 0.01 * pkg.ratio_limit);
    // residual sequence too
    CHECK(std::abs(pts.back().residual_normalized - pkg.residual_limit) <
          0.02 * pkg.residual_limit);
}

TEST_CASE("const/saw closed norms across parities") {
    for (double delta : {0.1, -0.1, 0.25, -0.25, 0.4, -0.4}) {
        for (auto [L, K] : {std::pair{10, 101}, {11, 100}, {11, 101}, {10, 100}}) {
            const auto pkg = example_const_saw(delta, L, K);
            CHECK(pkg.norm_matrix == doctest::Approx(pkg.norm_closed).epsilon(1e-12));
        }
    }
    CHECK(example_const_saw(0.25, 10, 100).parity_case == 0);
    CHECK(example_const_saw(0.25, 10, 100).norm_closed == 0.0);
    CHECK_THROWS_AS(example_const_saw(0.5, 10, 101), std::invalid_argument);

    // spot value: odd K = 101, even L, delta = 0.25
    const auto pkg = example_const_saw(0.25, 10, 101);
    CHECK(pkg.norm_closed == doctest::Approx(0.25 / (0.9375 * 101.0)));
}

TEST_CASE("figure1 error curve matches its analytic head") {
    const auto r = figure1_reproduce(1.03, 1.0, 299);
    CHECK(r.L == 150);
    CHECK(r.df0 == doctest::Approx(r.df0_pred).epsilon(0.10));
    CHECK(r.dfL1_times_L == doctest::Approx(r.dfL1_pred).epsilon(0.10));
    CHECK(r.max_err > 0.1 * (1.03 * 1.03 - 1.0) / (1.03 * 1.03));
    CHECK_THROWS_AS(figure1_reproduce(1.03, 1.0, 300), std::invalid_argument);

    const std::string path = "fig1_tmp.csv";
    fig1_to_csv(r, path);
    const auto t = read_csv(path);
    CHECK(t.rows.size() == 299);
    std::remove(path.c_str());
}

TEST_CASE("sweep: oscillating signal with oscillating noise decays like 1/min(L,K)") {
    SweepConfig cfg;
    cfg.signal = SeriesSpec(Oscillating{{{1.0, 0.1, 0.3}}});
    cfg.noise = SeriesSpec(Oscillating{{{1.0, 0.35, 1.2}}});
    cfg.deltas = {0.15};
    cfg.n_grid = {41, 81, 161, 321, 641};
    cfg.rule = WindowRule::with_alpha(0.5);
    const auto res = run_sweep(cfg, 2);
    CHECK(res.violations == 0);
    CHECK(res.dp_loglog[0].slope == doctest::Approx(-1.0).epsilon(0.15));
    // oracle stayed within every valid bound and main terms improved on it
    for (const auto& rec : res.records) {
        if (!rec.bounds.valid) continue;
        CHECK(rec.dP <= rec.bounds.rhs_projector * (1 + 1e-12));
        if (std::isfinite(rec.res_T)) CHECK(rec.res_T <= rec.bounds.rhs_T * (1 + 1e-12));
    }
}

TEST_CASE("sweep: exponential signal decays at the a^{-N} rate") {
    SweepConfig cfg;
    cfg.signal = SeriesSpec(ExponentialSum{{{1.0, 1.2}}});
    cfg.noise = SeriesSpec(Constant{});
    cfg.deltas = {1.0};
    cfg.n_grid = {21, 41, 61, 81};
    cfg.rule = WindowRule::with_alpha(0.5);
    const auto res = run_sweep(cfg);
    // log dP vs N slope ~ -ln a after the sqrt(N) correction is negligible
    CHECK(res.dp_semilog[0].slope == doctest::Approx(-std::log(1.2)).epsilon(0.05));
    CHECK(res.violations == 0);
}

TEST_CASE("sweep config json round trip") {
    const char* text = R"({
      "signal": {"type": "oscillating", "terms": [{"gamma": 1.0, "omega": 0.1, "phi": 0.0}]},
      "noise": {"type": "white_noise", "innovation": "normal"},
      "deltas": [0.1, 0.2],
      "n_grid": [41, 81],
      "window": {"rule": "alpha", "value": 0.5},
      "seed": 11
    })";
    const auto cfg = SweepConfig::from_json(text);
    CHECK(cfg.deltas.size() == 2);
    CHECK(cfg.seed == 11);
    const auto res = run_sweep(cfg);
    CHECK(res.records.size() == 4);
    const auto csv = res.to_csv();
    CHECK(csv.rows.size() == 4);
    CHECK(csv.header.size() == csv.rows[0].size());
    CHECK_THROWS_AS(SweepConfig::from_json("{"), std::invalid_argument);
}

TEST_CASE("lanczos top singular value agrees with the dense route") {
    const auto e = generate(SeriesSpec(WhiteNoise{}), 801, 3);
    const double dense = spectral_norm(embed(e.values, 400));
    const double fast = hankel_spectral_norm(e.values, 400);
    CHECK(fast == doctest::Approx(dense).epsilon(1e-8));
}

TEST_CASE("clt variance prediction matches a direct simulation of the limit") {
    const int L0 = 4;
    const double delta = 0.5, four = 3.0;
    const Matrix pred = clt_variance_prediction(L0, delta, four);

    std::mt19937_64 eng(12);
    InnovationSampler normal(Innovation::normal, 1717);
    const int reps = 200000;
    Matrix acc = Matrix::Zero(L0, L0);
    const Matrix pperp = Matrix::Ones(L0, L0) / L0;
    const Matrix p0 = Matrix::Identity(L0, L0) - pperp;
    for (int rep = 0; rep < reps; ++rep) {
        // symmetric Toeplitz gaussian with var(psi_0) = four - 1
        Vector psi(L0);
        psi[0] = normal() * std::sqrt(four - 1.0);
        for (int m = 1; m < L0; ++m) psi[m] = normal();
        Matrix Psi(L0, L0);
        for (int i = 0; i < L0; ++i)
            for (int j = 0; j < L0; ++j) Psi(i, j) = psi[std::abs(i - j)];
        const Matrix lim = (delta * delta / L0) * (pperp * Psi * p0 + p0 * Psi * pperp);
        acc += lim.cwiseProduct(lim);
    }
    acc /= reps;
    for (int i = 0; i < L0; ++i)
        for (int j = 0; j < L0; ++j) {
            if (pred(i, j) > 1e-10)
                CHECK(acc(i, j) == doctest::Approx(pred(i, j)).epsilon(0.05));
            else
                CHECK(acc(i, j) < 1e-10);
        }
}

TEST_CASE("clt check with rademacher innovations") {
    // fourth moment 1 makes the zero-lag diagonal of the limit deterministic
    McConfig cfg;
    cfg.stat = McStatistic::clt_const_whitenoise;
    cfg.noise = SeriesSpec(WhiteNoise{Innovation::rademacher});
    cfg.signal = SeriesSpec(Constant{});
    cfg.trials = 400;
    cfg.n_grid = {4000};
    cfg.L0 = 4;
    cfg.delta = 0.5;
    cfg.seed = 13;
    const auto s = run_monte_carlo(cfg);
    CHECK(s.accepted == 400);
    CHECK(s.max_var_rel_err < 0.35);  // 400 trials, so a loose agreement band
    CHECK(s.min_tied_correlation > 0.9);
}

TEST_CASE("monte carlo covariance statistic is reproducible and small") {
    McConfig cfg;
    cfg.stat = McStatistic::covariance_convergence;
    cfg.noise = SeriesSpec(WhiteNoise{});
    cfg.trials = 3;
    cfg.n_grid = {2000, 20000};
    cfg.L0 = 5;
    cfg.seed = 9;
    const auto s1 = run_monte_carlo(cfg, 2);
    const auto s2 = run_monte_carlo(cfg, 1);
    REQUIRE(s1.table.rows.size() == s2.table.rows.size());
    for (std::size_t i = 0; i < s1.table.rows.size(); ++i)
        CHECK(s1.table.rows[i] == s2.table.rows[i]);  // thread count cannot change output
    CHECK(s1.worst_dev_last_n < 0.12);
}

TEST_CASE("monte carlo norm growth handles correlated noise") {
    McConfig cfg;
    cfg.stat = McStatistic::hankel_norm_growth;
    cfg.noise = SeriesSpec(Ar1{0.5});
    cfg.trials = 3;
    cfg.n_grid = {64, 128, 256, 512};
    cfg.seed = 21;
    const auto s = run_monte_carlo(cfg, 2);
    CHECK(s.max_ratio > 0.0);
    CHECK(s.max_ratio <= 3.0 * std::sqrt(3.0));  // limit scale is gamma0 * S with S = sqrt(3)
    REQUIRE(s.table.header.back() == "ratio_over_S");
    for (const auto& row : s.table.rows)
        CHECK(row[6] == doctest::Approx(row[5] / std::sqrt(3.0)));
    CHECK_THROWS_AS(run_monte_carlo([&] {
                        McConfig bad = cfg;
                        bad.noise = SeriesSpec(Constant{});
                        return bad;
                    }()),
                    std::invalid_argument);
}

TEST_CASE("monte carlo cross-term statistic stays near the iterated-logarithm constant") {
    McConfig cfg;
    cfg.stat = McStatistic::cross_term_lil;
    cfg.noise = SeriesSpec(WhiteNoise{});
    cfg.signal = SeriesSpec(Oscillating{{{1.0, 0.1, 0.0}, {0.5, 0.3, 0.2}}});
    cfg.trials = 10;
    cfg.n_grid = {1000, 10000, 100000};
    cfg.seed = 5;
    const auto s = run_monte_carlo(cfg, 2);
    CHECK(s.lil_constant == doctest::Approx(std::sqrt(1.25)));
    CHECK(s.lil_empirical_max < 1.6 * s.lil_constant);
    CHECK(s.lil_empirical_max > 0.2 * s.lil_constant);
}
