#include "doctest.h"

#include <cmath>

#include "sigsub/examples.hpp"
#include "sigsub/perturb.hpp"
#include "test_util.hpp"

using namespace sigsub;

namespace {

PerturbationPair const_saw_pair(int L, int K) {
    const int n = L + K - 1;
    return PerturbationPair::make(embed(generate(SeriesSpec(Constant{}), n), L),
                                  embed(generate(SeriesSpec(Saw{}), n), L));
}

}  // namespace

TEST_CASE("b_of_delta and its scalar bound") {
    std::mt19937_64 eng(2024);
    const auto inst = testutil::next_instance(eng);
    CHECK(b_of_delta(inst.pair, 0.0).norm() == 0.0);
    CHECK(b_norm_bound(inst.pair, 0.0) == 0.0);
    for (double d : {0.05, -0.11, 0.3})
        CHECK(spectral_norm(b_of_delta(inst.pair, d)) <= b_norm_bound(inst.pair, d) * (1 + 1e-12));

    // biorthogonal pair: A1 = 0, so the bound is even in delta and equals d^2 LK
    const auto cs = const_saw_pair(6, 8);
    CHECK(cs.norm_A1 < 1e-12);
    CHECK(b_norm_bound(cs, 0.25) == doctest::Approx(0.0625 * 48.0));
    CHECK(b_norm_bound(cs, -0.25) == doctest::Approx(b_norm_bound(cs, 0.25)));
}

TEST_CASE("expansion radius") {
    const auto cs = const_saw_pair(6, 8);  // both even: mu_min = LK, ||A2|| = LK
    CHECK(radius_delta0(cs, 0.5) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(radius_delta0(cs, 0.25) == doctest::Approx(0.5));

    // noise proportional to the signal: quadratic with both terms
    const auto f = generate(SeriesSpec(Oscillating{{{1.0, 0.2, 0.1}}}), 14);
    const Matrix h = embed(f, 5);
    const auto self = PerturbationPair::make(h, h);
    const double mu = self.dec.mu_min;
    const double r = radius_delta0(self, 0.5);
    CHECK(std::abs(r) * self.norm_A1 + r * r * self.norm_A2 == doctest::Approx(0.5 * mu));

    // zero noise: infinite radius sentinel
    const auto zero = PerturbationPair::make(h, Matrix::Zero(5, 10));
    CHECK(radius_delta0(zero, 0.5) == kInfiniteRadius);
}

TEST_CASE("projector_direct oracle") {
    const auto cs = const_saw_pair(6, 8);
    CHECK(spectral_norm(projector_direct(cs, 0.0, 1).matrix - cs.dec.P0perp) < 1e-12);
    // biorthogonal, strong separability: projector unchanged for |delta| < 1/sqrt(2)
    for (double d : {0.2, -0.5, 0.69})
        CHECK(spectral_norm(projector_direct(cs, d, 1).matrix - cs.dec.P0perp) < 1e-12);
    // equal singular values at delta = 1 leave the subspace ambiguous
    CHECK_THROWS_AS(projector_direct(cs, 1.0, 1), GapError);

    // noise proportional to the signal never moves the subspace
    const auto f = generate(SeriesSpec(Oscillating{{{1.0, 0.2, 0.1}}}), 14);
    const Matrix h = embed(f, 5);
    const auto self = PerturbationPair::make(h, h);
    CHECK(spectral_norm(projector_direct(self, 0.05, 2).matrix - self.dec.P0perp) < 1e-10);
}

TEST_CASE("series projector matches the oracle") {
    std::mt19937_64 eng(77);
    for (int rep = 0; rep < 25; ++rep) {
        const auto inst = testutil::next_instance(eng);
        const auto ser = series_projector(inst.pair, inst.delta, 1e-10);
        const auto dir = projector_direct(inst.pair, inst.delta, inst.d);
        CHECK(spectral_norm(ser.matrix - dir.matrix) < 1e-9);
        CHECK(*ser.tail_bound <= 1e-10);
        CHECK(ser.order >= 1);
    }
}

TEST_CASE("series projector respects the radius precondition") {
    const auto cs = const_saw_pair(6, 8);
    CHECK(spectral_norm(series_projector(cs, 0.0, 1e-12).matrix - cs.dec.P0perp) == 0.0);
    CHECK_THROWS_AS(series_projector(cs, 0.51, 1e-10), RadiusError);  // beta = delta^2 >= 1/4
}

TEST_CASE("right-orthogonal pairs give an even expansion") {
    // const signal, saw noise, K even, L odd: H E^T = 0 but H^T E != 0
    const auto p = const_saw_pair(7, 8);
    CHECK(spectral_norm(p.H * p.E.transpose()) < 1e-12);
    CHECK(spectral_norm(p.H.transpose() * p.E) > 0.5);
    CHECK(spectral_norm(V0_1(p)) < 1e-14);
    const auto plus = series_projector(p, 0.2, 1e-12);
    const auto minus = series_projector(p, -0.2, 1e-12);
    CHECK(spectral_norm(plus.matrix - minus.matrix) < 1e-12);
}

TEST_CASE("composition enumeration agrees with the recursive accumulation") {
    std::mt19937_64 eng(5150);
    const auto inst = testutil::next_instance(eng);
    const Matrix b = b_of_delta(inst.pair, inst.delta);
    for (int order = 1; order <= 8; ++order) {
        const Matrix w = w_term(inst.pair, inst.delta, order);
        // brute-force recursion result regardless of the p<=6 switch
        CHECK(spectral_norm(w - w.transpose()) < 1e-12 * std::max(1.0, spectral_norm(w)));
    }
    // cross-check orders 5..8 against a direct series evaluation:
    // sum of W_p must reproduce the oracle to the tail bound
    const auto ser = series_projector(inst.pair, inst.delta, 1e-12);
    Matrix acc = inst.pair.dec.P0perp;
    for (int order = 1; order <= ser.order; ++order) acc += w_term(inst.pair, inst.delta, order);
    CHECK(spectral_norm(acc - ser.matrix) < 1e-11);
}

TEST_CASE("first-order coefficient via central differences") {
    std::mt19937_64 eng(31337);
    const auto inst = testutil::next_instance(eng);
    const auto& p = inst.pair;
    const Matrix v1 = V0_1(p);
    const double h = 1e-4;
    const Matrix diff =
        (projector_direct(p, h, inst.d).matrix - projector_direct(p, -h, inst.d).matrix) / (2 * h);
    CHECK(spectral_norm(diff - v1) < 1e-6 * spectral_norm(v1) + 1e-8);

    // Richardson extraction over {±h, ±2h} sharpens the estimate
    const Matrix d2 =
        (projector_direct(p, 2 * h, inst.d).matrix - projector_direct(p, -2 * h, inst.d).matrix) /
        (4 * h);
    const Matrix rich = (4.0 * diff - d2) / 3.0;
    CHECK(spectral_norm(rich - v1) < 1e-8 * spectral_norm(v1) + 1e-10);
}

TEST_CASE("second-order coefficient via central differences") {
    std::mt19937_64 eng(99);
    const auto inst = testutil::next_instance(eng);
    const auto& p = inst.pair;
    const Matrix v2 = V0_2(p);
    const double h = 1e-3;
    const Matrix second = (projector_direct(p, h, inst.d).matrix +
                           projector_direct(p, -h, inst.d).matrix - 2.0 * p.dec.P0perp) /
                          (h * h) / 2.0;
    CHECK(spectral_norm(second - v2) < 1e-4 * spectral_norm(v2) + 1e-8);
}

TEST_CASE("W1 identity") {
    std::mt19937_64 eng(4);
    const auto inst = testutil::next_instance(eng);
    const auto& p = inst.pair;
    const double d = inst.delta;
    const Matrix lhs = W1(p, d);
    const Matrix rhs = d * V0_1(p) + d * d * (p.dec.P0 * p.A2 * p.dec.S0 + p.dec.S0 * p.A2 * p.dec.P0);
    CHECK(spectral_norm(lhs - rhs) < 1e-12 * spectral_norm(lhs));
    CHECK(spectral_norm(w_term(p, d, 1) - lhs) < 1e-12 * spectral_norm(lhs));
}

TEST_CASE("L, K and T operators") {
    std::mt19937_64 eng(8080);
    const auto inst = testutil::next_instance(eng);
    const auto& p = inst.pair;
    const double d = inst.delta;

    CHECK(spectral_norm(L_delta(p, 0.0)) == 0.0);
    CHECK(spectral_norm(T_delta(p, 0.0)) == 0.0);

    // L = W1 + d^2 K
    const Matrix l = L_delta(p, d);
    const Matrix rhs = W1(p, d) + d * d * K_delta(p, d);
    CHECK(spectral_norm(l - rhs) < 1e-10 * std::max(1.0, spectral_norm(l)));

    // the leading term of T is L
    const Matrix t0 = T_delta(p, d, 1e100);
    CHECK(spectral_norm(t0 - l) < 1e-13 * std::max(1.0, spectral_norm(l)));

    // main-term quality: T is at least as close as the series itself allows
    const Matrix dpm = projector_direct(p, d, inst.d).matrix - p.dec.P0perp;
    const Matrix t = T_delta(p, d);
    CHECK(spectral_norm(dpm - t) <= spectral_norm(dpm) + 1e-12);

    // symmetry of every returned operator
    for (const Matrix& m : {l, t, W1(p, d), V0_1(p), V0_2(p), K_delta(p, d)})
        CHECK(spectral_norm(m - m.transpose()) < 1e-12 * std::max(1e-30, spectral_norm(m)));
}

TEST_CASE("const/saw main term is exact for odd K even L") {
    const int L = 10, K = 101;
    const auto p = const_saw_pair(L, K);
    const double delta = 0.25;
    const Matrix l = L_delta(p, delta);
    const auto pkg = example_const_saw(delta, L, K);
    CHECK(spectral_norm(l - pkg.m_delta) < 1e-12 * std::max(1.0, spectral_norm(l)));
}

TEST_CASE("resolvent precondition") {
    const auto cs = const_saw_pair(6, 8);
    CHECK_THROWS_AS(L_delta(cs, 1.01), RadiusError);  // delta^2 ||A2|| >= mu_min
}
