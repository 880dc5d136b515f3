#pragma once

#include <cstdint>

#include "sigsub/csv.hpp"
#include "sigsub/series.hpp"
#include "sigsub/trajectory.hpp"

namespace sigsub {

enum class McStatistic {
    hankel_norm_growth,      // ||E_{L,K}|| / sqrt(N ln N) over the grid, L ~ N/2
    covariance_convergence,  // ||E E^T / K - I|| at fixed L0
    cross_term_lil,          // |sum x_j eps_j| / sqrt(n ln ln n) against the LIL constant
    clt_const_whitenoise     // sqrt(N) (P0perp(delta) - P0perp), const signal at fixed L0
};

struct McConfig {
    McStatistic stat = McStatistic::covariance_convergence;
    SeriesSpec noise;   // stochastic
    SeriesSpec signal;  // oscillating for cross_term_lil; constant for the CLT check
    int trials = 1;
    std::vector<int> n_grid;
    int L0 = 5;
    double delta = 0.5;
    std::uint64_t seed = 1;

    static McConfig from_json(const std::string& text);
    static McConfig from_json_file(const std::string& path);
};

struct McSummary {
    McStatistic stat;
    CsvTable table;  // per-unit rows, deterministic order

    // hankel_norm_growth
    double max_ratio = 0.0;
    std::vector<double> envelope;  // per-N max over trials
    bool envelope_nonincreasing_top = false;

    // covariance_convergence
    double worst_dev_last_n = 0.0;  // max over trials at the largest N

    // cross_term_lil
    double lil_constant = 0.0;
    double lil_empirical_max = 0.0;

    // clt_const_whitenoise
    int accepted = 0;
    int rejected = 0;
    double max_var_rel_err = 0.0;         // entries with positive predicted variance
    double zero_pred_var_ratio = 0.0;     // worst empirical var at zero-prediction entries,
                                          // relative to the largest predicted variance
    double min_tied_correlation = 0.0;    // covariance-matrix entries tied by |i-j|
    Matrix empirical_variance;            // of sqrt(N) dP entries
    Matrix predicted_variance;
};

McSummary run_monte_carlo(const McConfig& cfg, int threads = 1);

// Per-entry variance of (delta^2/L0)(P0perp Psi P0 + P0 Psi P0perp) for the
// constant signal, where Psi is the symmetric Toeplitz Gaussian limit with
// Var psi_00 = fourth_moment - 1 and Var psi_0j = 1.
Matrix clt_variance_prediction(int L0, double delta, double fourth_moment);

// Largest singular value of the L x (n-L+1) Hankel matrix of `values` by
// Lanczos iteration on the Gram operator (suits sizes where a dense
// eigensolve is too slow; accuracy well beyond the Monte Carlo needs).
double hankel_spectral_norm(const std::vector<double>& values, int window, int max_iters = 220);

}  // namespace sigsub
