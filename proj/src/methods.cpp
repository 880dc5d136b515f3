#include "sigsub/methods.hpp"

#include <cmath>

namespace sigsub {

Matrix selector_GL(int L) {
    Matrix g = Matrix::Zero(L - 1, L);
    for (int i = 0; i < L - 1; ++i) g(i, i) = 1.0;
    return g;
}

Matrix selector_GLup(int L) {
    Matrix g = Matrix::Zero(L - 1, L);
    for (int i = 0; i < L - 1; ++i) g(i, i + 1) = 1.0;
    return g;
}

Matrix esprit_F1(int L) {
    Matrix f = Matrix::Identity(L, L);
    f(L - 1, L - 1) = 0.0;
    return f;
}

Matrix esprit_F2(int L) {
    Matrix f = Matrix::Zero(L, L);
    for (int i = 0; i < L - 1; ++i) f(i, i + 1) = 1.0;
    return f;
}

namespace {

LrfResult lrf_from_p0(const Matrix& p0, const std::vector<double>& verify) {
    const int L = static_cast<int>(p0.rows());
    if (L < 2) throw std::invalid_argument("LRF needs L >= 2");
    Vector eL = Vector::Zero(L);
    eL[L - 1] = 1.0;
    const Vector p0e = p0 * eL;
    const double n2 = p0e.squaredNorm();
    if (n2 <= 1e-20) throw std::invalid_argument("lrf: P0 e_L vanishes; no recurrence of this order");
    LrfResult r;
    r.R = -(selector_GL(L) * p0e) / n2;
    r.cos_to_null = std::sqrt(std::max(0.0, 1.0 - n2));
    if (!verify.empty()) r.residual = lrf_residual(r.R, verify);
    return r;
}

}  // namespace

double lrf_residual(const Vector& R, const std::vector<double>& series) {
    const int L = static_cast<int>(R.size()) + 1;
    const int n = static_cast<int>(series.size());
    double worst = 0.0;
    // R = (a_{L-1}, ..., a_1): R[i] multiplies x_{n-(L-1-i)}
    for (int t = L - 1; t < n; ++t) {
        double pred = 0.0;
        for (int i = 0; i < L - 1; ++i) pred += R[i] * series[static_cast<std::size_t>(t - (L - 1 - i))];
        worst = std::max(worst, std::abs(pred - series[static_cast<std::size_t>(t)]));
    }
    return worst;
}

LrfResult lrf_coefficients(const SpectralDecomposition& dec, const std::vector<double>& verify) {
    return lrf_from_p0(dec.P0, verify);
}

LrfResult lrf_perturbed(const PerturbationPair& p, double delta, int d) {
    const DeltaOperator pd = projector_direct(p, delta, d);
    const Matrix p0d = Matrix::Identity(p.L(), p.L()) - pd.matrix;
    return lrf_from_p0(p0d, {});
}

double lrf_error_bound(double dP, double vartheta) {
    const double c2 = 1.0 - vartheta * vartheta;
    if (c2 <= 0.0) throw std::invalid_argument("lrf_error_bound: vartheta must be < 1");
    const double c = std::sqrt(c2);
    if (!(dP < c)) throw std::invalid_argument("lrf_error_bound requires dP < sqrt(1 - vartheta^2)");
    const double f = 1.0 - dP / c;
    return dP / c2 / (f * f) * (1.0 + 2.0 / c);
}

EspritResult esprit(const Matrix& basis) {
    const int L = static_cast<int>(basis.rows());
    const int d = static_cast<int>(basis.cols());
    if (d < 1 || L <= d) throw std::invalid_argument("esprit: basis must be L x d with L > d >= 1");
    const Matrix f1 = esprit_F1(L);
    const Matrix f2 = esprit_F2(L);
    const Matrix x = basis.transpose() * f1 * basis;
    const Matrix y = basis.transpose() * f2 * basis;
    Eigen::FullPivLU<Matrix> lu(x);
    if (!lu.isInvertible()) throw std::invalid_argument("esprit: U^T F1 U is singular");

    EspritResult r;
    r.D = lu.solve(y);
    r.upsilon = spectral_norm(x) / (spectral_norm(basis) * spectral_norm(basis));
    Eigen::EigenSolver<Matrix> es(r.D);
    if (es.info() != Eigen::Success) throw std::runtime_error("esprit: eigensolver failed");
    for (int i = 0; i < d; ++i) {
        const std::complex<double> lam = es.eigenvalues()[i];
        r.eigenvalues.push_back(lam);
        r.frequencies.push_back(std::arg(lam) / (2.0 * M_PI));
        r.growth_rates.push_back(std::abs(lam));
    }
    return r;
}

EspritResult esprit_perturbed(const PerturbationPair& p, double delta, int d) {
    const Matrix g = p.H + delta * p.E;
    Eigen::BDCSVD<Matrix> svd(g, Eigen::ComputeThinU);
    const auto& s = svd.singularValues();
    const double sd = s[d - 1];
    const double sd1 = d < s.size() ? s[d] : 0.0;
    if (!(sd > 0.0) || (sd - sd1) <= 1e-8 * sd)
        throw GapError("esprit_perturbed: perturbed singular values not separated");
    return esprit(svd.matrixU().leftCols(d));
}

EspritResult esprit_projected(const PerturbationPair& p, double delta, int d) {
    const DeltaOperator pd = projector_direct(p, delta, d);
    const double dP = spectral_norm(pd.matrix - p.dec.P0perp);
    if (!(dP < 1.0)) throw RadiusError("esprit_projected requires ||dP|| < 1");
    // columns of P(delta) U stay linearly independent
    Matrix basis(p.L(), d);
    int col = 0;
    for (const auto& c : p.dec.clusters)
        for (int j = 0; j < c.multiplicity(); ++j) basis.col(col++) = c.basis.col(j);
    return esprit(pd.matrix * basis);
}

double esprit_error_bound(double dP, double upsilon) {
    if (!(upsilon > 0.0)) throw std::invalid_argument("esprit_error_bound: upsilon must be positive");
    if (!(dP < 0.5 * upsilon)) throw std::invalid_argument("esprit_error_bound requires dP < upsilon/2");
    const double t = 2.0 * dP / upsilon;
    return t * (1.0 + 1.0 / (1.0 - t));
}

SsaResult ssa_reconstruct(const PerturbationPair& p, double delta, int d) {
    const Matrix g = p.H + delta * p.E;
    Eigen::BDCSVD<Matrix> svd(g, Eigen::ComputeThinU);
    const auto& s = svd.singularValues();
    const double sd = s[d - 1];
    const double sd1 = d < s.size() ? s[d] : 0.0;
    if (!(sd > 0.0) || (sd - sd1) <= 1e-8 * sd)
        throw GapError("ssa_reconstruct: rank-d truncation is ambiguous");
    const Matrix u = svd.matrixU().leftCols(d);
    const Matrix ht = u * (u.transpose() * g);

    SsaResult r;
    r.delta_matrix = ht - p.H;
    r.reconstructed = matrix_to_series(hankelize(ht));
    const std::vector<double> f = matrix_to_series(p.H);
    double worst = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        worst = std::max(worst, std::abs(r.reconstructed[i] - f[i]));
    r.error_max = worst;
    return r;
}

}  // namespace sigsub
