#pragma once

#include <stdexcept>
#include <vector>

#include "sigsub/trajectory.hpp"

namespace sigsub {

struct DegenerateRankError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One eigenvalue cluster of A = H H^T: a representative value and an
// orthonormal basis of its eigenspace (the projector is basis * basis^T).
struct EigenCluster {
    double mu;
    Matrix basis;  // L x multiplicity
    Matrix projector() const { return basis * basis.transpose(); }
    int multiplicity() const { return static_cast<int>(basis.cols()); }
};

// How to decide the numerical rank of H H^T.
//   threshold: keep mu > eps_rank * mu_max.
//   exact:     the caller supplies d; it is an error if fewer than d
//              eigenvalues clear the threshold.
struct RankPolicy {
    enum class Kind { threshold, exact };
    Kind kind = Kind::threshold;
    int d = -1;
    double eps_rank = 1e-10;
    double cluster_tol = 1e-8;  // relative gap that merges eigenvalues into one cluster

    static RankPolicy exact(int d, double eps_rank = 1e-10) {
        RankPolicy p;
        p.kind = Kind::exact;
        p.d = d;
        p.eps_rank = eps_rank;
        return p;
    }
};

struct SpectralDecomposition {
    std::vector<EigenCluster> clusters;  // positive eigenvalues, descending
    int d = 0;                           // rank = sum of cluster multiplicities
    Matrix P0;                           // projector onto the null space U_0
    Matrix P0perp;                       // projector onto the signal subspace
    Matrix S0;                           // pseudoinverse sum_{mu>0} P_mu / mu
    double mu_min = 0.0;                 // smallest retained positive eigenvalue
    double mu_max = 0.0;

    int dim() const { return static_cast<int>(P0.rows()); }

    // k = 0 -> -P0; k >= 1 -> sum_{mu>0} P_mu / mu^k.
    Matrix s0_power(int k) const;
};

SpectralDecomposition decompose(const Matrix& h, const RankPolicy& policy = {});

}  // namespace sigsub
