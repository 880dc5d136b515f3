#pragma once

#include <vector>

#include "sigsub/perturb.hpp"

namespace sigsub {

// Upper bound C (4 beta)^k / (1 - 4 beta) for the central-binomial tail
// sum_{p>=k} binom(2p,p) beta^p, valid for 0 < beta < 1/4.
double tail_bound(double beta, int k);
double tail_constant();  // C = e^{1/6}/sqrt(pi)

// Everything the proximity bounds need, evaluated at one delta. Right-hand
// sides use actual operator norms where the inequality names one; the
// coarse scalar chains are reported alongside. `valid` is false outside
// beta < 1/4 (values are still reported).
struct BoundsReport {
    double delta = 0.0;
    double mu_min = 0.0, mu_max = 0.0, nu_max = 0.0;
    double theta1 = 0.0, theta2 = 0.0, theta = 0.0;
    double norm_B = 0.0;        // ||B(delta)||
    double beta_op = 0.0;       // ||B(delta)|| / mu_min
    double beta_scalar = 0.0;   // B(delta) / mu_min (scalar bound)
    double cos_theta_r = 0.0;   // row spaces of H and E
    double cos_theta_l = 0.0;   // column spaces of H and E
    double norm_S0B = 0.0;      // ||S0 B(delta)||
    double norm_S0BP0 = 0.0;    // ||S0 B(delta) P0||
    double rhs_projector = 0.0;
    double rhs_coarse = 0.0;
    double rhs_coarse_scalar = 0.0;  // via 2|d| T1 T2 + d^2 T1^2 T2
    double rhs_orth = 0.0;
    double rhs_orth_scalar = 0.0;  // via |d| T1 T2 (2 cos r + |d| T1 cos l)
    double rhs_w1 = 0.0;
    double rhs_L = 0.0;
    double rhs_T = 0.0;
    bool valid = false;
    // orthogonality residuals
    double res_HEt = 0.0;      // ||H E^T||
    double res_HtE = 0.0;      // ||H^T E||
    double res_S0HEtP0 = 0.0;  // ||S0 H E^T P0||
    double res_S0EEtP0 = 0.0;  // ||S0 E E^T P0||

    static std::vector<std::string> csv_header();
    std::vector<double> csv_row() const;
};

BoundsReport compute_bounds(const PerturbationPair& p, double delta);

// Two-sided estimate of the minimal principal angle between the column
// spaces of m1 and m2: lhs <= mid <= rhs with
//   lhs = sigma1_min sigma2_min cos(theta_min),
//   mid = ||m1^T m2||,
//   rhs = ||m1|| ||m2|| cos(theta_min).
struct SandwichResult {
    double lhs = 0.0, mid = 0.0, rhs = 0.0;
};
SandwichResult sandwich_check(const Matrix& m1, const Matrix& m2);

// cos of the minimal principal angle between the column spaces.
double min_angle_cos(const Matrix& m1, const Matrix& m2);

// Residuals of the zero-perturbation equivalences plus right/left
// orthogonality. Conditions are compared at `tol` after normalizing each
// residual to a dimensionless scale.
struct ZeroPerturbationReport {
    // condition (2): S0 H E^T P0 = S0 E E^T P0 = 0
    double res2_a = 0.0, res2_b = 0.0;
    // condition (4): symmetrized sums
    double res4_a = 0.0, res4_b = 0.0;
    // condition (5): H E^T P0 = 0 and H^T E E^T P0 = 0
    double res5_a = 0.0, res5_b = 0.0;
    double right_orth = 0.0;  // ||H E^T||
    double left_orth = 0.0;   // ||H^T E||
    // normalized versions (dimensionless)
    double n2_a = 0.0, n2_b = 0.0, n4_a = 0.0, n4_b = 0.0, n5_a = 0.0, n5_b = 0.0;
    double n_right = 0.0, n_left = 0.0;
    bool pass2 = false, pass4 = false, pass5 = false;
    bool biorthogonal = false;       // right and left orthogonality at tol
    bool conditions_equivalent = false;  // (2), (4), (5) agree in pass/fail
    double tol = 0.0;
};
ZeroPerturbationReport check_zero_perturbation(const PerturbationPair& p, double tol = 1e-12);

}  // namespace sigsub
