#pragma once

#include <string>
#include <vector>

#include "sigsub/trajectory.hpp"

namespace sigsub {

// Window-length schedule for N-sweeps: L fixed, K fixed, or L = round(alpha N).
struct WindowRule {
    enum class Kind { fixed_L, fixed_K, alpha };
    Kind kind = Kind::alpha;
    double value = 0.5;

    // returns (L, K) with K = N - L + 1
    std::pair<int, int> dims(int n) const;

    static WindowRule fixed_L(int L0);
    static WindowRule fixed_K(int K0);
    static WindowRule with_alpha(double a);
};

// ---- exponential signal x_n = a^n with constant noise e_n = 1 ----
//
// Both trajectory matrices are rank one (H = W_L W_K^T, E = E_L E_K^T), so
// the perturbed projector lives in span{W_L, E_L} and ||P0perp(delta) -
// P0perp|| reduces to a 2x2 eigenproblem. That reduction stays accurate far
// beyond where the dense SVD oracle loses the difference in rounding.

struct ExpConstPoint {
    int n = 0, L = 0, K = 0;
    double beta_L = 0.0, beta_K = 0.0;  // W_j^T E_j
    double norm_WL2 = 0.0, norm_WK2 = 0.0;
    double dP = 0.0;                  // ||P0perp(delta) - P0perp||, exact rank-2 route
    double v01_norm = 0.0;            // ||V0^{(1)}|| closed form
    double normalized = 0.0;          // a^N/sqrt(N) dP, or a^N dP in the fixed-L regime
    double residual_normalized = 0.0; // a^N ||dPmat - delta Z0^{(1)}||, exact rank-2 route
};

struct ExpConstPackage {
    double a = 0.0, delta = 0.0;
    WindowRule rule;
    double ratio_limit = 0.0;     // limit of the normalized sequence
    double residual_limit = 0.0;  // limit of a^N ||dPmat - delta Z0^{(1)}|| (NaN in fixed-L regime)
    double h_of_a_L = 0.0;        // H(a, L0) when the rule fixes L, else NaN
    std::vector<ExpConstPoint> points;
};

ExpConstPackage example_exp_const(double a, double delta, const WindowRule& rule,
                                  const std::vector<int>& n_grid);

// Dense forms for cross-checks at moderate sizes.
Matrix exp_const_Z1(double a, int L, int K);
Matrix exp_const_Z2(double a, int L, int K);
double exp_const_H(double a, int L);

// ---- constant signal with saw noise e_n = (-1)^n ----

struct ConstSawPackage {
    int L = 0, K = 0;
    double delta = 0.0;
    int parity_case = 0;  // 0 both even, 1 odd K even L, 2 odd L even K, 3 both odd
    Vector e_Lw;          // E_L - beta_L W_L / L
    Matrix w_E;           // W_L E_Lw^T + E_Lw W_L^T
    Matrix m_delta;       // main term M(delta)
    double norm_closed = 0.0;
    double norm_matrix = 0.0;
};

// requires |delta| < 1/2 and min(L, K) > 1
ConstSawPackage example_const_saw(double delta, int L, int K);

// ---- SSA reconstruction error curves for x_n = a^n, e_n = 1 ----

struct Fig1Result {
    int n = 0, L = 0;
    double a = 0.0, delta = 0.0;
    std::vector<double> error;      // reconstructed minus signal
    std::vector<double> main_term;  // analytic main terms (NaN where none applies)
    double df0 = 0.0, df0_pred = 0.0;
    double dfL1_times_L = 0.0, dfL1_pred = 0.0;  // prediction 2 delta (a+1)/(a-1)
    double max_err = 0.0;     // over all l
    double max_err_09 = 0.0;  // over l < 0.9 N
};

// requires odd N; uses L = K = (N+1)/2
Fig1Result figure1_reproduce(double a, double delta, int n);
void fig1_to_csv(const Fig1Result& r, const std::string& path);

}  // namespace sigsub
