#pragma once

#include <limits>
#include <optional>

#include "sigsub/spectral.hpp"

namespace sigsub {

// Thrown when a perturbation-series precondition fails (||B(delta)|| too
// large relative to mu_min, or a resolvent is singular).
struct RadiusError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
// Thrown when the d-th and (d+1)-th singular values of H + delta E are not
// separated, so the perturbed subspace is ambiguous.
struct GapError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Signal/noise matrix pair with the derived perturbation operators
// A1 = H E^T + E H^T and A2 = E E^T.
struct PerturbationPair {
    Matrix H, E;
    SpectralDecomposition dec;
    Matrix A1, A2;
    double norm_A1 = 0.0;
    double norm_A2 = 0.0;  // nu_max

    int L() const { return static_cast<int>(H.rows()); }
    int K() const { return static_cast<int>(H.cols()); }

    static PerturbationPair make(Matrix h, Matrix e, const RankPolicy& policy = {});
};

enum class DeltaOperatorKind { direct, series, W1, V01, V02, Ldelta, Kdelta, Tdelta };

struct DeltaOperator {
    double delta = 0.0;
    Matrix matrix;
    DeltaOperatorKind kind = DeltaOperatorKind::direct;
    int order = 0;                     // truncation order for kind == series
    std::optional<double> tail_bound;  // rigorous truncation bound when available
};

// B(delta) = delta A1 + delta^2 A2 and its scalar norm bound
// |delta| ||A1|| + delta^2 ||A2||.
Matrix b_of_delta(const PerturbationPair& p, double delta);
double b_norm_bound(const PerturbationPair& p, double delta);

constexpr double kInfiniteRadius = std::numeric_limits<double>::infinity();

// Positive root of |delta| ||A1|| + delta^2 ||A2|| = fraction * mu_min.
// fraction 1/2 matches the expansion condition, 1/4 the bound certificates.
// Returns kInfiniteRadius when E contributes nothing (||A1|| = ||A2|| = 0).
double radius_delta0(const PerturbationPair& p, double fraction);

// Oracle: projector onto the span of the d leading left singular vectors of
// H + delta E. Requires relative gap (sigma_d - sigma_{d+1}) / sigma_d > gap_tol.
DeltaOperator projector_direct(const PerturbationPair& p, double delta, int d,
                               double gap_tol = 1e-8);

// Truncated perturbation series P0perp + sum_p W_p(delta) with the
// combinatorial-tail truncation certificate (requires scalar beta < 1/4).
DeltaOperator series_projector(const PerturbationPair& p, double delta, double tol);

// Terms W_p(delta). Compositions are enumerated explicitly for p <= 6; higher
// orders come from the recursive partial-sum accumulation.
Matrix w_term(const PerturbationPair& p, double delta, int order);

// Main-term operators.
Matrix V0_1(const PerturbationPair& p);
Matrix V0_2(const PerturbationPair& p);
Matrix W1(const PerturbationPair& p, double delta);
Matrix L_delta(const PerturbationPair& p, double delta);
Matrix K_delta(const PerturbationPair& p, double delta);
Matrix T_delta(const PerturbationPair& p, double delta, double tol = 1e-12);

}  // namespace sigsub
