#pragma once

#include <complex>
#include <vector>

#include "sigsub/perturb.hpp"

namespace sigsub {

// Coefficients of the order L-1 linear recurrence satisfied by the signal,
// recovered from the projector onto the null space. R holds
// (a_{L-1}, ..., a_1); the recurrence is x_n = sum_k a_k x_{n-k}.
struct LrfResult {
    Vector R;
    double cos_to_null = 0.0;  // vartheta = ||P0perp e_L||
    double residual = 0.0;     // max recurrence residual on the verification series
};

// selector matrices of the recurrence algebra
Matrix selector_GL(int L);     // (L-1) x L, keeps coordinates 0..L-2
Matrix selector_GLup(int L);   // (L-1) x L, keeps coordinates 1..L-1
Matrix esprit_F1(int L);       // G_L^T G_L
Matrix esprit_F2(int L);       // G_L^T G^{(L)}

// R from a decomposition of the noiseless trajectory matrix; `verify`
// optionally holds the generating series for the residual check.
LrfResult lrf_coefficients(const SpectralDecomposition& dec,
                           const std::vector<double>& verify = {});

// R(delta) built from the perturbed projector (oracle route).
LrfResult lrf_perturbed(const PerturbationPair& p, double delta, int d);

// Bound on ||R(delta) - R|| in terms of the projector distance dP;
// requires dP < sqrt(1 - vartheta^2).
double lrf_error_bound(double dP, double vartheta);

// Apply x_n = sum_k R_k x_{n-k} (R as returned above) and report the largest
// residual over the admissible n range.
double lrf_residual(const Vector& R, const std::vector<double>& series);

struct EspritResult {
    Matrix D;  // d x d
    std::vector<std::complex<double>> eigenvalues;
    std::vector<double> frequencies;   // arg(lambda) / 2 pi
    std::vector<double> growth_rates;  // |lambda|
    double upsilon = 0.0;              // ||U^T F1 U|| / ||U||^2
};

// LS-ESPRIT from a basis U (L x d) of the signal subspace.
EspritResult esprit(const Matrix& basis);

// Perturbed variants: `esprit_perturbed` rebuilds the basis from the leading
// left singular vectors of H + delta E; `esprit_projected` conjugates the
// noiseless basis with the perturbed projector (same eigenvalues).
EspritResult esprit_perturbed(const PerturbationPair& p, double delta, int d);
EspritResult esprit_projected(const PerturbationPair& p, double delta, int d);

// Bound on ||D_hat(delta) - D|| in terms of the projector distance dP;
// requires dP < upsilon / 2.
double esprit_error_bound(double dP, double upsilon);

struct SsaResult {
    std::vector<double> reconstructed;
    double error_max = 0.0;  // ||reconstructed - signal||_max
    Matrix delta_matrix;     // P0perp(delta) H(delta) - H
};

// Rank-d SSA reconstruction of the signal from H + delta E.
SsaResult ssa_reconstruct(const PerturbationPair& p, double delta, int d);

}  // namespace sigsub
