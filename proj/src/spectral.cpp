#include "sigsub/spectral.hpp"

#include <cmath>
#include <sstream>

namespace sigsub {

Matrix SpectralDecomposition::s0_power(int k) const {
    if (k < 0) throw std::invalid_argument("s0_power needs k >= 0");
    if (k == 0) return -P0;
    const int L = dim();
    Matrix out = Matrix::Zero(L, L);
    for (const auto& c : clusters) out += c.projector() / std::pow(c.mu, k);
    return out;
}

SpectralDecomposition decompose(const Matrix& h, const RankPolicy& policy) {
    if (h.size() == 0 || h.norm() == 0.0) throw std::invalid_argument("decompose: zero matrix");
    const int L = static_cast<int>(h.rows());

    Matrix a = h * h.transpose();
    a = 0.5 * (a + a.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(a);
    if (es.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");

    // descending order
    Vector vals(L);
    Matrix vecs(L, L);
    for (int i = 0; i < L; ++i) {
        vals[i] = es.eigenvalues()[L - 1 - i];
        vecs.col(i) = es.eigenvectors().col(L - 1 - i);
    }

    const double mu_max = std::max(vals[0], 0.0);
    const double cutoff = policy.eps_rank * mu_max;
    int d_threshold = 0;
    while (d_threshold < L && vals[d_threshold] > cutoff) ++d_threshold;

    int d = d_threshold;
    if (policy.kind == RankPolicy::Kind::exact) {
        if (policy.d < 1 || policy.d > L) throw std::invalid_argument("exact rank policy needs 1 <= d <= L");
        if (d_threshold < policy.d) {
            std::ostringstream msg;
            msg << "degenerate rank: requested d=" << policy.d << " but only " << d_threshold
                << " eigenvalues clear the threshold";
            throw DegenerateRankError(msg.str());
        }
        d = policy.d;
    }
    if (d == 0) throw DegenerateRankError("no eigenvalue above rank threshold");

    SpectralDecomposition dec;
    dec.d = d;
    dec.mu_max = vals[0];
    dec.mu_min = vals[d - 1];

    // group retained eigenvalues into clusters by relative gap
    int i = 0;
    while (i < d) {
        int j = i;
        while (j + 1 < d && (vals[j] - vals[j + 1]) <= policy.cluster_tol * vals[j]) ++j;
        EigenCluster c;
        c.mu = vals.segment(i, j - i + 1).mean();
        c.basis = vecs.middleCols(i, j - i + 1);
        dec.clusters.push_back(std::move(c));
        i = j + 1;
    }

    dec.P0perp = Matrix::Zero(L, L);
    dec.S0 = Matrix::Zero(L, L);
    for (const auto& c : dec.clusters) {
        const Matrix p = c.projector();
        dec.P0perp += p;
        dec.S0 += p / c.mu;
    }
    dec.P0 = Matrix::Identity(L, L) - dec.P0perp;
    return dec;
}

}  // namespace sigsub
