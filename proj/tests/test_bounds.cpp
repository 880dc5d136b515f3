#include "doctest.h"

#include <cmath>

#include "sigsub/bounds.hpp"
#include "test_util.hpp"

using namespace sigsub;

namespace {

PerturbationPair const_saw_pair(int L, int K) {
    const int n = L + K - 1;
    return PerturbationPair::make(embed(generate(SeriesSpec(Constant{}), n), L),
                                  embed(generate(SeriesSpec(Saw{}), n), L));
}

}  // namespace

TEST_CASE("combinatorial tail bound") {
    // closed form of the full series: sum_p binom(2p,p) x^p = 1/sqrt(1-4x)
    const double beta = 0.1;
    const double full = 1.0 / std::sqrt(1.0 - 4.0 * beta);
    CHECK(tail_bound(beta, 1) == doctest::Approx(0.444657585).epsilon(1e-6));
    // domination of the tail for k >= 1 (the k = 0 formula value is C/(1-4b),
    // but binom(0,0) = 1 > C, so only k >= 1 tails are covered -- which is all
    // the proximity bounds use)
    CHECK(full - 1.0 <= tail_bound(beta, 1));
    for (int k = 1; k <= 4; ++k) {
        double tail = full;
        double term = 1.0, x = 1.0;
        for (int p = 0; p < k; ++p) {
            tail -= term * x;
            x *= beta;
            term = term * (2 * p + 2) * (2 * p + 1) / ((p + 1.0) * (p + 1.0));
        }
        CHECK(tail <= tail_bound(beta, k));
    }

    CHECK(tail_bound(1e-9, 0) == doctest::Approx(tail_constant()).epsilon(1e-6));
    for (int k = 0; k < 6; ++k) CHECK(tail_bound(0.2, k + 1) < tail_bound(0.2, k));
    CHECK_THROWS_AS(tail_bound(0.3, 1), std::invalid_argument);
    CHECK_THROWS_AS(tail_bound(0.0, 1), std::invalid_argument);
}

TEST_CASE("theta quantities for const/saw") {
    const auto p = const_saw_pair(6, 9);
    const auto r = compute_bounds(p, 0.2);
    CHECK(r.theta1 == doctest::Approx(1.0));
    CHECK(r.theta2 == doctest::Approx(1.0));
    CHECK(r.mu_min == doctest::Approx(54.0));
    CHECK(r.nu_max == doctest::Approx(54.0));
}

TEST_CASE("principal angle cosines at the extremes") {
    Matrix a(4, 2), b(4, 2);
    a << 1, 0, 0, 1, 0, 0, 0, 0;
    b << 2, 0, 0, -3, 0, 0, 0, 0;  // same span
    CHECK(min_angle_cos(a, b) == doctest::Approx(1.0));
    Matrix c(4, 2);
    c << 0, 0, 0, 0, 1, 0, 0, 1;  // orthogonal span
    CHECK(min_angle_cos(a, c) == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("sandwich inequality chain") {
    Matrix q(5, 3);
    q << 1, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0;
    const auto same = sandwich_check(q, q);
    CHECK(same.lhs == doctest::Approx(1.0));
    CHECK(same.mid == doctest::Approx(1.0));
    CHECK(same.rhs == doctest::Approx(1.0));

    Matrix o(5, 2);
    o << 0, 0, 0, 0, 0, 0, 1, 0, 0, 1;
    Matrix q2(5, 2);
    q2 << 1, 0, 0, 1, 0, 0, 0, 0, 0, 0;
    const auto orth = sandwich_check(q2, o);
    CHECK(orth.mid < 1e-12);
    CHECK(orth.lhs < 1e-12);

    std::mt19937_64 eng(606);
    for (int rep = 0; rep < 10; ++rep) {
        Matrix m1(6, 4), m2(6, 4);
        for (int i = 0; i < m1.size(); ++i) {
            m1.data()[i] = testutil::uniform(eng, -1, 1);
            m2.data()[i] = testutil::uniform(eng, -1, 1);
        }
        const auto r = sandwich_check(m1, m2);
        CHECK(r.lhs <= r.mid * (1 + 1e-10) + 1e-10);
        CHECK(r.mid <= r.rhs * (1 + 1e-10) + 1e-10);
    }
}

TEST_CASE("bounds dominate measured quantities") {
    std::mt19937_64 eng(1234);
    for (int rep = 0; rep < 15; ++rep) {
        const auto inst = testutil::next_instance(eng);
        const auto& p = inst.pair;
        const auto r = compute_bounds(p, inst.delta);
        REQUIRE(r.valid);

        // hierarchy of the norm chain
        CHECK(r.norm_S0BP0 <= r.norm_S0B * (1 + 1e-12));
        CHECK(r.norm_S0B <= r.beta_op * (1 + 1e-12));
        CHECK(r.beta_op <= r.beta_scalar * (1 + 1e-12));
        CHECK(r.rhs_projector <= r.rhs_orth * (1 + 1e-12));

        const Matrix dpm = projector_direct(p, inst.delta, inst.d).matrix - p.dec.P0perp;
        const double dP = spectral_norm(dpm);
        CHECK(dP <= r.rhs_projector);
        CHECK(dP <= r.rhs_coarse);
        CHECK(dP <= r.rhs_orth);
        CHECK(spectral_norm(dpm - W1(p, inst.delta)) <= r.rhs_w1);
        CHECK(spectral_norm(dpm - L_delta(p, inst.delta)) <= r.rhs_L);
        CHECK(spectral_norm(dpm - T_delta(p, inst.delta)) <= r.rhs_T);
    }
}

TEST_CASE("invalid regime is flagged, not hidden") {
    const auto p = const_saw_pair(6, 8);
    const auto r = compute_bounds(p, 0.6);  // beta = 0.36 > 1/4
    CHECK(!r.valid);
    CHECK(r.beta_op == doctest::Approx(0.36));
    CHECK(std::isnan(r.rhs_projector));
    CHECK(BoundsReport::csv_header().size() == r.csv_row().size());
}

TEST_CASE("zero perturbation conditions, const/saw parities") {
    // both even: biorthogonal, everything vanishes
    const auto even = check_zero_perturbation(const_saw_pair(6, 8));
    CHECK(even.pass2);
    CHECK(even.pass4);
    CHECK(even.pass5);
    CHECK(even.biorthogonal);
    CHECK(even.conditions_equivalent);

    // K odd: right orthogonality fails with ||H E^T||/mu_min = 1/K
    const int L = 6, K = 9;
    const auto odd = check_zero_perturbation(const_saw_pair(L, K));
    CHECK(!odd.pass2);
    CHECK(!odd.pass5);
    CHECK(odd.conditions_equivalent);
    const double mu = static_cast<double>(L) * K;
    CHECK(odd.right_orth / mu == doctest::Approx(1.0 / K));
}

TEST_CASE("noise inside the signal subspace satisfies the conditions") {
    const auto f = generate(SeriesSpec(Oscillating{{{1.0, 0.2, 0.3}}}), 16);
    const Matrix h = embed(f, 6);
    const auto p = PerturbationPair::make(h, Matrix(2.0 * h));
    const auto r = check_zero_perturbation(p, 1e-9);
    CHECK(r.pass2);
    CHECK(r.pass4);
    CHECK(r.pass5);
    CHECK(r.conditions_equivalent);
    // projector equality follows inside the radius
    const double d0 = radius_delta0(p, 0.5);
    CHECK(spectral_norm(projector_direct(p, 0.9 * d0, 2).matrix - p.dec.P0perp) < 1e-9);
}

TEST_CASE("equivalence of the conditions on random instances") {
    std::mt19937_64 eng(222);
    for (int rep = 0; rep < 10; ++rep) {
        const auto inst = testutil::next_instance(eng);
        const auto r = check_zero_perturbation(inst.pair, 1e-9);
        CHECK(r.conditions_equivalent);  // noisy instances fail all three together
    }
}
