#include "sigsub/bounds.hpp"

#include <cmath>
#include <limits>

namespace sigsub {

namespace {

constexpr double kTailC = 0.66698637801892266;

// Orthonormal basis of the column space of m, truncated at numerical rank.
Matrix column_basis(const Matrix& m) {
    Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU);
    const auto& s = svd.singularValues();
    const double cutoff = 1e-12 * s[0];
    int r = 0;
    while (r < s.size() && s[r] > cutoff) ++r;
    return svd.matrixU().leftCols(std::max(r, 1));
}

double smallest_positive_singular(const Matrix& m) {
    Eigen::BDCSVD<Matrix> svd(m);
    const auto& s = svd.singularValues();
    const double cutoff = 1e-12 * s[0];
    double smallest = s[0];
    for (int i = 0; i < s.size(); ++i)
        if (s[i] > cutoff) smallest = s[i];
    return smallest;
}

}  // namespace

double tail_constant() { return kTailC; }

double tail_bound(double beta, int k) {
    if (!(beta > 0.0 && beta < 0.25)) throw std::invalid_argument("tail_bound needs 0 < beta < 1/4");
    if (k < 0) throw std::invalid_argument("tail_bound needs k >= 0");
    return kTailC * std::pow(4.0 * beta, k) / (1.0 - 4.0 * beta);
}

double min_angle_cos(const Matrix& m1, const Matrix& m2) {
    const Matrix q1 = column_basis(m1);
    const Matrix q2 = column_basis(m2);
    const double c = spectral_norm(q1.transpose() * q2);
    return std::min(c, 1.0);
}

SandwichResult sandwich_check(const Matrix& m1, const Matrix& m2) {
    if (m1.norm() == 0.0 || m2.norm() == 0.0)
        throw std::invalid_argument("sandwich_check needs nonzero matrices");
    SandwichResult r;
    const double c = min_angle_cos(m1, m2);
    r.lhs = smallest_positive_singular(m1) * smallest_positive_singular(m2) * c;
    r.mid = spectral_norm(m1.transpose() * m2);
    r.rhs = spectral_norm(m1) * spectral_norm(m2) * c;
    return r;
}

BoundsReport compute_bounds(const PerturbationPair& p, double delta) {
    BoundsReport r;
    r.delta = delta;
    r.mu_min = p.dec.mu_min;
    r.mu_max = p.dec.mu_max;
    r.nu_max = p.norm_A2;
    r.theta1 = std::sqrt(r.nu_max / r.mu_max);
    r.theta2 = r.mu_max / r.mu_min;
    r.theta = r.theta1 * r.theta2;

    const Matrix b = b_of_delta(p, delta);
    r.norm_B = spectral_norm(b);
    r.beta_op = r.norm_B / r.mu_min;
    r.beta_scalar = b_norm_bound(p, delta) / r.mu_min;

    r.cos_theta_r = min_angle_cos(p.H.transpose(), p.E.transpose());
    r.cos_theta_l = min_angle_cos(p.H, p.E);

    const Matrix s0b = p.dec.S0 * b;
    r.norm_S0B = spectral_norm(s0b);
    r.norm_S0BP0 = spectral_norm(s0b * p.dec.P0);

    r.valid = r.beta_op < 0.25;
    const double denom = 1.0 - 4.0 * r.beta_op;
    const double safe_denom = r.valid ? denom : std::numeric_limits<double>::quiet_NaN();
    const double ad = std::abs(delta);

    r.rhs_projector = 4.0 * kTailC * r.norm_S0BP0 / safe_denom;
    r.rhs_coarse = 4.0 * kTailC * r.beta_op / safe_denom;
    const double beta_coarse = 2.0 * ad * r.theta1 * r.theta2 + delta * delta * r.theta1 * r.theta1 * r.theta2;
    r.rhs_coarse_scalar = 4.0 * kTailC * beta_coarse / safe_denom;
    r.rhs_orth = 4.0 * kTailC * r.norm_S0B / safe_denom;
    const double s0b_coarse =
        ad * r.theta1 * r.theta2 * (2.0 * r.cos_theta_r + ad * r.theta1 * r.cos_theta_l);
    r.rhs_orth_scalar = 4.0 * kTailC * s0b_coarse / safe_denom;
    r.rhs_w1 = 16.0 * kTailC * r.beta_op * r.beta_op / safe_denom;
    r.rhs_L = 16.0 * kTailC * r.norm_S0B * r.norm_S0BP0 / safe_denom;
    r.rhs_T = 16.0 * kTailC * r.norm_S0BP0 * r.norm_S0BP0 / safe_denom;

    r.res_HEt = spectral_norm(p.H * p.E.transpose());
    r.res_HtE = spectral_norm(p.H.transpose() * p.E);
    r.res_S0HEtP0 = spectral_norm(p.dec.S0 * p.H * p.E.transpose() * p.dec.P0);
    r.res_S0EEtP0 = spectral_norm(p.dec.S0 * p.A2 * p.dec.P0);
    return r;
}

std::vector<std::string> BoundsReport::csv_header() {
    return {"delta",         "mu_min",         "mu_max",     "nu_max",      "theta1",
            "theta2",        "theta",          "norm_B",     "beta_op",     "beta_scalar",
            "cos_theta_r",   "cos_theta_l",    "norm_S0B",   "norm_S0BP0",  "rhs_projector",
            "rhs_coarse",      "rhs_coarse_scalar", "rhs_orth",  "rhs_orth_scalar", "rhs_w1",
            "rhs_L",      "rhs_T",       "valid",      "res_HEt",     "res_HtE",
            "res_S0HEtP0",   "res_S0EEtP0"};
}

std::vector<double> BoundsReport::csv_row() const {
    return {delta,         mu_min,          mu_max,     nu_max,          theta1,
            theta2,        theta,           norm_B,     beta_op,         beta_scalar,
            cos_theta_r,   cos_theta_l,     norm_S0B,   norm_S0BP0,      rhs_projector,
            rhs_coarse,      rhs_coarse_scalar, rhs_orth,   rhs_orth_scalar, rhs_w1,
            rhs_L,      rhs_T,        valid ? 1.0 : 0.0, res_HEt,  res_HtE,
            res_S0HEtP0,   res_S0EEtP0};
}

ZeroPerturbationReport check_zero_perturbation(const PerturbationPair& p, double tol) {
    ZeroPerturbationReport r;
    r.tol = tol;
    const Matrix& s0 = p.dec.S0;
    const Matrix& p0 = p.dec.P0;
    const Matrix het = p.H * p.E.transpose();
    const Matrix eet = p.A2;

    const Matrix m2a = s0 * het * p0;
    const Matrix m2b = s0 * eet * p0;
    r.res2_a = spectral_norm(m2a);
    r.res2_b = spectral_norm(m2b);
    r.res4_a = spectral_norm(m2a + m2a.transpose());
    r.res4_b = spectral_norm(m2b + m2b.transpose());
    r.res5_a = spectral_norm(het * p0);
    r.res5_b = spectral_norm(p.H.transpose() * p.E * p.E.transpose() * p0);
    r.right_orth = spectral_norm(het);
    r.left_orth = spectral_norm(p.H.transpose() * p.E);

    const double nh = spectral_norm(p.H);
    const double ne = spectral_norm(p.E);
    const double he = nh * ne;
    const double mu = p.dec.mu_min;
    r.n2_a = r.res2_a * mu / he;
    r.n2_b = r.res2_b * mu / (ne * ne);
    r.n4_a = r.res4_a * mu / he;
    r.n4_b = r.res4_b * mu / (ne * ne);
    r.n5_a = r.res5_a / he;
    r.n5_b = r.res5_b / (nh * ne * ne);
    r.n_right = r.right_orth / he;
    r.n_left = r.left_orth / he;

    r.pass2 = r.n2_a <= tol && r.n2_b <= tol;
    r.pass4 = r.n4_a <= tol && r.n4_b <= tol;
    r.pass5 = r.n5_a <= tol && r.n5_b <= tol;
    r.biorthogonal = r.n_right <= tol && r.n_left <= tol;
    r.conditions_equivalent = (r.pass2 == r.pass4) && (r.pass4 == r.pass5);
    return r;
}

}  // namespace sigsub
