#include "sigsub/perturb.hpp"

#include <cmath>
#include <sstream>
#include <vector>

namespace sigsub {

namespace {

// C = e^{1/6}/sqrt(pi), the constant of the central-binomial tail bound.
constexpr double kTailC = 0.66698637801892266;

Matrix symmetrize(Matrix m) { return 0.5 * (m + m.transpose()); }

}  // namespace

PerturbationPair PerturbationPair::make(Matrix h, Matrix e, const RankPolicy& policy) {
    if (h.rows() != e.rows() || h.cols() != e.cols())
        throw std::invalid_argument("signal and noise matrices must have equal dimensions");
    PerturbationPair p;
    p.H = std::move(h);
    p.E = std::move(e);
    p.dec = decompose(p.H, policy);
    p.A1 = symmetrize(p.H * p.E.transpose() + p.E * p.H.transpose());
    p.A2 = symmetrize(p.E * p.E.transpose());
    p.norm_A1 = spectral_norm(p.A1);
    p.norm_A2 = spectral_norm(p.A2);
    return p;
}

Matrix b_of_delta(const PerturbationPair& p, double delta) {
    return delta * p.A1 + (delta * delta) * p.A2;
}

double b_norm_bound(const PerturbationPair& p, double delta) {
    return std::abs(delta) * p.norm_A1 + delta * delta * p.norm_A2;
}

double radius_delta0(const PerturbationPair& p, double fraction) {
    if (fraction <= 0.0) throw std::invalid_argument("radius fraction must be positive");
    const double target = fraction * p.dec.mu_min;
    if (p.norm_A1 == 0.0 && p.norm_A2 == 0.0) return kInfiniteRadius;
    if (p.norm_A2 == 0.0) return target / p.norm_A1;
    return (-p.norm_A1 + std::sqrt(p.norm_A1 * p.norm_A1 + 4.0 * p.norm_A2 * target)) /
           (2.0 * p.norm_A2);
}

DeltaOperator projector_direct(const PerturbationPair& p, double delta, int d, double gap_tol) {
    if (d < 1 || d > std::min(p.L(), p.K())) throw std::invalid_argument("projector_direct: bad d");
    const Matrix g = p.H + delta * p.E;
    Eigen::BDCSVD<Matrix> svd(g, Eigen::ComputeThinU);
    const auto& s = svd.singularValues();
    const double sd = s[d - 1];
    const double sd1 = d < s.size() ? s[d] : 0.0;
    if (!(sd > 0.0) || (sd - sd1) <= gap_tol * sd) {
        std::ostringstream msg;
        msg << "ambiguous subspace: singular values " << d << " and " << d + 1
            << " of H+delta*E are not separated (sigma_d=" << sd << ", sigma_{d+1}=" << sd1 << ")";
        throw GapError(msg.str());
    }
    DeltaOperator out;
    out.delta = delta;
    out.kind = DeltaOperatorKind::direct;
    const Matrix u = svd.matrixU().leftCols(d);
    out.matrix = u * u.transpose();
    return out;
}

namespace {

// all W_p share the powers S0^(0) = -P0, S0^(k) = S0^k
std::vector<Matrix> s0_powers(const SpectralDecomposition& dec, int up_to) {
    std::vector<Matrix> s;
    s.reserve(static_cast<std::size_t>(up_to) + 1);
    for (int k = 0; k <= up_to; ++k) s.push_back(dec.s0_power(k));
    return s;
}

// sum over all compositions l_1+...+l_{p+1} = p of S^(l1) B S^(l2) ... B S^(l_{p+1})
Matrix wp_enumerated(const Matrix& b, const std::vector<Matrix>& s, int p) {
    const int L = static_cast<int>(b.rows());
    Matrix acc = Matrix::Zero(L, L);
    std::vector<int> comp(static_cast<std::size_t>(p) + 1, 0);
    comp[0] = p;
    // iterate compositions in colex order
    while (true) {
        Matrix m = s[static_cast<std::size_t>(comp[0])];
        for (int j = 1; j <= p; ++j) m = m * b * s[static_cast<std::size_t>(comp[static_cast<std::size_t>(j)])];
        acc += m;
        // next composition
        int i = 0;
        while (i <= p && comp[static_cast<std::size_t>(i)] == 0) ++i;
        if (i == p) break;  // all weight at the end: last composition
        const int v = comp[static_cast<std::size_t>(i)];
        comp[static_cast<std::size_t>(i)] = 0;
        comp[0] = v - 1;
        comp[static_cast<std::size_t>(i + 1)] += 1;
    }
    return (p % 2 == 0) ? acc : Matrix(-acc);
}

// Recursive accumulation of partial sums:
//   G(j, t) = sum over words with j B's and S-exponent total t,
//   G(j, t) = sum_l G(j-1, t-l) B S^(l),  W_p = (-1)^p G(p, p).
std::vector<Matrix> wp_recursive(const Matrix& b, const std::vector<Matrix>& s, int up_to) {
    const int L = static_cast<int>(b.rows());
    std::vector<std::vector<Matrix>> g(2, std::vector<Matrix>(static_cast<std::size_t>(up_to) + 1));
    std::vector<Matrix> w(static_cast<std::size_t>(up_to) + 1, Matrix::Zero(L, L));
    for (int t = 0; t <= up_to; ++t) g[0][static_cast<std::size_t>(t)] = s[static_cast<std::size_t>(t)];
    for (int j = 1; j <= up_to; ++j) {
        auto& cur = g[j % 2];
        const auto& prev = g[(j - 1) % 2];
        for (int t = 0; t <= up_to; ++t) {
            Matrix acc = Matrix::Zero(L, L);
            for (int l = 0; l <= t; ++l)
                acc += prev[static_cast<std::size_t>(t - l)] * b * s[static_cast<std::size_t>(l)];
            cur[static_cast<std::size_t>(t)] = acc;
        }
        w[static_cast<std::size_t>(j)] = (j % 2 == 0) ? cur[static_cast<std::size_t>(j)]
                                                      : Matrix(-cur[static_cast<std::size_t>(j)]);
    }
    return w;
}

int truncation_order(double beta, double tol) {
    // smallest P with C (4 beta)^{P+1} / (1 - 4 beta) <= tol
    int p = 0;
    double term = kTailC / (1.0 - 4.0 * beta);
    while (term * std::pow(4.0 * beta, p + 1) > tol) {
        ++p;
        if (p > 4000) throw RadiusError("series truncation order exceeds 4000; beta too close to 1/4");
    }
    return std::max(p, 1);
}

}  // namespace

Matrix w_term(const PerturbationPair& p, double delta, int order) {
    if (order < 1) throw std::invalid_argument("w_term: order >= 1");
    const Matrix b = b_of_delta(p, delta);
    const auto s = s0_powers(p.dec, order);
    if (order <= 6) return wp_enumerated(b, s, order);
    return wp_recursive(b, s, order)[static_cast<std::size_t>(order)];
}

DeltaOperator series_projector(const PerturbationPair& p, double delta, double tol) {
    const double beta = b_norm_bound(p, delta) / p.dec.mu_min;
    if (!(beta < 0.25)) {
        std::ostringstream msg;
        msg << "series precondition B(delta)/mu_min < 1/4 violated (beta=" << beta << ")";
        throw RadiusError(msg.str());
    }
    const int order = truncation_order(beta, tol);
    const Matrix b = b_of_delta(p, delta);
    const auto s = s0_powers(p.dec, order);

    DeltaOperator out;
    out.delta = delta;
    out.kind = DeltaOperatorKind::series;
    out.order = order;
    out.tail_bound = kTailC * std::pow(4.0 * beta, order + 1) / (1.0 - 4.0 * beta);
    out.matrix = p.dec.P0perp;
    const int enum_top = std::min(order, 6);
    for (int q = 1; q <= enum_top; ++q) out.matrix += wp_enumerated(b, s, q);
    if (order > 6) {
        const auto w = wp_recursive(b, s, order);
        for (int q = 7; q <= order; ++q) out.matrix += w[static_cast<std::size_t>(q)];
    }
    return out;
}

Matrix V0_1(const PerturbationPair& p) {
    const Matrix& s0 = p.dec.S0;
    const Matrix& p0 = p.dec.P0;
    return symmetrize(p0 * p.A1 * s0 + s0 * p.A1 * p0);
}

Matrix V0_2(const PerturbationPair& p) {
    const Matrix& s0 = p.dec.S0;
    const Matrix& p0 = p.dec.P0;
    const Matrix s2 = s0 * s0;
    Matrix v = p0 * p.A2 * s0 + s0 * p.A2 * p0;
    v += p0 * p.A1 * p0 * p.A1 * s2;
    v += p0 * p.A1 * s2 * p.A1 * p0;
    v += s2 * p.A1 * p0 * p.A1 * p0;
    v -= p0 * p.A1 * s0 * p.A1 * s0;
    v -= s0 * p.A1 * p0 * p.A1 * s0;
    v -= s0 * p.A1 * s0 * p.A1 * p0;
    return symmetrize(v);
}

Matrix W1(const PerturbationPair& p, double delta) {
    const Matrix b = b_of_delta(p, delta);
    return symmetrize(p.dec.P0 * b * p.dec.S0 + p.dec.S0 * b * p.dec.P0);
}

namespace {

struct Resolvents {
    // LDLT factorizations of (I - delta^2 A2_0 / mu) per cluster
    std::vector<Eigen::LDLT<Matrix>> fact;
    Matrix a20;

    Resolvents(const PerturbationPair& p, double delta) {
        const int L = p.L();
        a20 = symmetrize(p.dec.P0 * p.A2 * p.dec.P0);
        if (!(delta * delta * p.norm_A2 < p.dec.mu_min))
            throw RadiusError("resolvent precondition delta^2 ||A2|| < mu_min violated");
        for (const auto& c : p.dec.clusters) {
            Matrix m = Matrix::Identity(L, L) - (delta * delta / c.mu) * a20;
            Eigen::LDLT<Matrix> f(m);
            if (f.info() != Eigen::Success) throw RadiusError("resolvent factorization failed");
            fact.emplace_back(std::move(f));
        }
    }

    // X * (I - delta^2 A2_0/mu)^{-1}; the resolvent is symmetric
    Matrix apply_right(const Matrix& x, std::size_t cluster) const {
        return fact[cluster].solve(x.transpose()).transpose();
    }
};

Matrix l1_of(const PerturbationPair& p, const Resolvents& res, const Matrix& b) {
    const int L = p.L();
    Matrix l1 = Matrix::Zero(L, L);
    for (std::size_t c = 0; c < p.dec.clusters.size(); ++c) {
        const auto& cl = p.dec.clusters[c];
        const Matrix lead = cl.projector() * b * p.dec.P0 / cl.mu;
        l1 += res.apply_right(lead, c);
    }
    return l1;
}

}  // namespace

Matrix L_delta(const PerturbationPair& p, double delta) {
    const Resolvents res(p, delta);
    const Matrix b = b_of_delta(p, delta);
    const Matrix l1 = l1_of(p, res, b);
    return l1 + l1.transpose();
}

Matrix K_delta(const PerturbationPair& p, double delta) {
    const Resolvents res(p, delta);
    const Matrix b = b_of_delta(p, delta);
    const int L = p.L();
    Matrix k1 = Matrix::Zero(L, L);
    for (std::size_t c = 0; c < p.dec.clusters.size(); ++c) {
        const auto& cl = p.dec.clusters[c];
        const Matrix lead = cl.projector() * b * res.a20 / (cl.mu * cl.mu);
        k1 += res.apply_right(lead, c);
    }
    return k1 + k1.transpose();
}

Matrix T_delta(const PerturbationPair& p, double delta, double tol) {
    const double beta = b_norm_bound(p, delta) / p.dec.mu_min;
    if (!(beta < 0.25)) throw RadiusError("T(delta) requires B(delta)/mu_min < 1/4");
    const Resolvents res(p, delta);
    const Matrix b = b_of_delta(p, delta);
    const Matrix l1 = l1_of(p, res, b);

    // X_0 = L_1; X_i = sum_mu (P_mu B / mu) X_{i-1} (I - delta^2 A2_0/mu)^{-1}.
    // Term norms are bounded by ||L_1|| (beta g)^i with
    // g = 1/(1 - delta^2 nu_max/mu_min) >= max_mu ||resolvent||.
    const double g = 1.0 / (1.0 - delta * delta * p.norm_A2 / p.dec.mu_min);
    const double q = beta * g;
    if (!(q < 1.0)) throw RadiusError("T(delta) series does not contract");
    const double l1_norm = spectral_norm(l1);

    Matrix t1 = l1;
    Matrix x = l1;
    double bound = l1_norm;
    int sign = -1;
    for (int i = 1; i < 10000; ++i) {
        bound *= q;
        if (bound <= tol) break;
        Matrix next = Matrix::Zero(p.L(), p.L());
        for (std::size_t c = 0; c < p.dec.clusters.size(); ++c) {
            const auto& cl = p.dec.clusters[c];
            const Matrix lead = cl.projector() * b * x / cl.mu;
            next += res.apply_right(lead, c);
        }
        x = std::move(next);
        t1 += sign * x;
        sign = -sign;
    }
    return t1 + t1.transpose();
}

}  // namespace sigsub
