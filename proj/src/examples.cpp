#include "sigsub/examples.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "sigsub/csv.hpp"
#include "sigsub/perturb.hpp"
#include "sigsub/series.hpp"

namespace sigsub {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

std::pair<int, int> WindowRule::dims(int n) const {
    int L = 0;
    switch (kind) {
        case Kind::fixed_L: L = static_cast<int>(value); break;
        case Kind::fixed_K: L = n - static_cast<int>(value) + 1; break;
        case Kind::alpha: L = static_cast<int>(std::lround(value * n)); break;
    }
    if (L < 1 || L > n) throw std::invalid_argument("window rule leaves L outside [1, N]");
    return {L, n - L + 1};
}

WindowRule WindowRule::fixed_L(int L0) { return {Kind::fixed_L, static_cast<double>(L0)}; }
WindowRule WindowRule::fixed_K(int K0) { return {Kind::fixed_K, static_cast<double>(K0)}; }
WindowRule WindowRule::with_alpha(double a) {
    if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
    return {Kind::alpha, a};
}

namespace {

struct ExpConstGeometry {
    double wL2, wK2, bL, bK;  // ||W_L||^2, ||W_K||^2, beta_L, beta_K
    double c, r;              // <E_L, w>, ||E_L - c w||
};

ExpConstGeometry exp_const_geometry(double a, int L, int K) {
    auto nW2 = [a](int j) { return (std::pow(a, 2 * j) - 1.0) / (a * a - 1.0); };
    auto beta = [a](int j) { return (std::pow(a, j) - 1.0) / (a - 1.0); };
    ExpConstGeometry g;
    g.wL2 = nW2(L);
    g.wK2 = nW2(K);
    g.bL = beta(L);
    g.bK = beta(K);
    g.c = g.bL / std::sqrt(g.wL2);
    g.r = std::sqrt(std::max(0.0, static_cast<double>(L) - g.c * g.c));
    return g;
}

}  // namespace

double exp_const_H(double a, int L) {
    const ExpConstGeometry g = exp_const_geometry(a, L, L);
    return (a + 1.0) / a * std::pow(a, L) * std::sqrt(L * g.wL2 - g.bL * g.bL) / g.wL2;
}

Matrix exp_const_Z1(double a, int L, int K) {
    const ExpConstGeometry g = exp_const_geometry(a, L, K);
    Vector wl(L), el = Vector::Ones(L);
    for (int i = 0; i < L; ++i) wl[i] = std::pow(a, i);
    return g.bK * (el * wl.transpose() + wl * el.transpose()) / (g.wL2 * g.wK2);
}

Matrix exp_const_Z2(double a, int L, int K) {
    const ExpConstGeometry g = exp_const_geometry(a, L, K);
    Vector wl(L);
    for (int i = 0; i < L; ++i) wl[i] = std::pow(a, i);
    return g.bL * g.bK * (wl * wl.transpose()) / (g.wL2 * g.wL2 * g.wK2);
}

ExpConstPackage example_exp_const(double a, double delta, const WindowRule& rule,
                                  const std::vector<int>& n_grid) {
    if (!(a > 1.0)) throw std::invalid_argument("exp/const example needs a > 1");
    ExpConstPackage pkg;
    pkg.a = a;
    pkg.delta = delta;
    pkg.rule = rule;

    const double ad = std::abs(delta);
    const double root = std::sqrt(a * a - 1.0);
    switch (rule.kind) {
        case WindowRule::Kind::alpha: {
            const double alpha = rule.value;
            pkg.ratio_limit = ad * std::sqrt(alpha) * (a + 1.0) * root / a;
            pkg.residual_limit = 2.0 * ad * (a + 1.0) * (a + 1.0) / a;
            pkg.h_of_a_L = kNaN;
            break;
        }
        case WindowRule::Kind::fixed_K: {
            const double k0 = rule.value;
            const double f = a * (1.0 + std::pow(a, -k0));
            pkg.ratio_limit = ad * (a + 1.0) * root / f;
            pkg.residual_limit = 2.0 * ad * (a + 1.0) * (a + 1.0) / f;
            pkg.h_of_a_L = kNaN;
            break;
        }
        case WindowRule::Kind::fixed_L: {
            pkg.h_of_a_L = exp_const_H(a, static_cast<int>(rule.value));
            pkg.ratio_limit = ad * pkg.h_of_a_L;
            pkg.residual_limit = kNaN;  // only an O(N a^{-2N}) statement applies
            break;
        }
    }

    for (int n : n_grid) {
        auto [L, K] = rule.dims(n);
        if (2.0 * n * std::log(a) > std::log(1e300))
            throw std::range_error("exp/const grid point overflows double range (a^{2N} >= 1e300)");
        const ExpConstGeometry g = exp_const_geometry(a, L, K);

        ExpConstPoint pt;
        pt.n = n;
        pt.L = L;
        pt.K = K;
        pt.beta_L = g.bL;
        pt.beta_K = g.bK;
        pt.norm_WL2 = g.wL2;
        pt.norm_WK2 = g.wK2;

        // Gram of H + delta E restricted to the orthonormal pair
        // {w = W_L/||W_L||, u = (E_L - c w)/r}.
        const double nwL = std::sqrt(g.wL2);
        const double gww = g.wL2 * g.wK2 + 2.0 * delta * g.c * nwL * g.bK + delta * delta * g.c * g.c * K;
        const double gwu = delta * g.r * (nwL * g.bK + delta * g.c * K);
        const double guu = delta * delta * g.r * g.r * K;
        const double t = 0.5 * std::atan2(2.0 * gwu, gww - guu);
        pt.dP = std::abs(std::sin(t));

        pt.v01_norm = g.bK * nwL * g.r / (g.wL2 * g.wK2);

        const double aN = std::pow(a, n);
        pt.normalized = (rule.kind == WindowRule::Kind::fixed_L) ? aN * pt.dP
                                                                 : aN / std::sqrt(n) * pt.dP;

        // ||dPmat - delta Z0^{(1)}|| in the {w,u} basis:
        //   dPmat = [[cos^2 t - 1, cos t sin t], [cos t sin t, sin^2 t]],
        //   Z1    = (beta_K ||W_L|| / mu) [[2c, r], [r, 0]].
        const double mu = g.wL2 * g.wK2;
        const double z = g.bK * nwL / mu;
        const double ct = std::cos(t), st = std::sin(t);
        const double m00 = ct * ct - 1.0 - delta * z * 2.0 * g.c;
        const double m01 = ct * st - delta * z * g.r;
        const double m11 = st * st;
        const double tr = m00 + m11;
        const double det = m00 * m11 - m01 * m01;
        const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
        const double norm_res = std::max(std::abs(tr / 2.0 + disc), std::abs(tr / 2.0 - disc));
        pt.residual_normalized = aN * norm_res;

        pkg.points.push_back(pt);
    }
    return pkg;
}

ConstSawPackage example_const_saw(double delta, int L, int K) {
    if (!(std::abs(delta) < 0.5)) throw std::invalid_argument("const/saw example needs |delta| < 1/2");
    if (std::min(L, K) <= 1) throw std::invalid_argument("const/saw example needs min(L,K) > 1");

    ConstSawPackage pkg;
    pkg.L = L;
    pkg.K = K;
    pkg.delta = delta;
    const bool oddL = L % 2 != 0;
    const bool oddK = K % 2 != 0;
    pkg.parity_case = oddK && !oddL ? 1 : (oddL && !oddK ? 2 : (oddL && oddK ? 3 : 0));

    Vector wl = Vector::Ones(L);
    Vector el(L);
    for (int i = 0; i < L; ++i) el[i] = (i % 2 == 0) ? 1.0 : -1.0;
    const double bL = oddL ? 1.0 : 0.0;
    pkg.e_Lw = el - bL * wl / L;
    pkg.w_E = wl * pkg.e_Lw.transpose() + pkg.e_Lw * wl.transpose();

    const double d2 = delta * delta;
    switch (pkg.parity_case) {
        case 0:
            pkg.m_delta = Matrix::Zero(L, L);
            pkg.norm_closed = 0.0;
            break;
        case 1:
            pkg.m_delta = delta / (1.0 - d2) * pkg.w_E / (static_cast<double>(L) * K);
            pkg.norm_closed = std::abs(delta) / (1.0 - d2) / K;
            break;
        case 2:
            pkg.m_delta = d2 / (1.0 - d2) * pkg.w_E / (L * std::sqrt(L * static_cast<double>(L) - 1.0));
            pkg.norm_closed = d2 / (1.0 - d2) / L;
            break;
        case 3:
            pkg.m_delta = delta / (1.0 - d2) * (1.0 / K + delta / L) * pkg.w_E /
                          std::sqrt(L * static_cast<double>(L) - 1.0);
            pkg.norm_closed = std::abs(delta) / (1.0 - d2) * std::abs(1.0 / K + delta / L);
            break;
    }
    pkg.norm_matrix = spectral_norm(pkg.m_delta);
    return pkg;
}

Fig1Result figure1_reproduce(double a, double delta, int n) {
    if (n % 2 == 0) throw std::invalid_argument("figure1 needs odd N so that L = K = (N+1)/2");
    const int L = (n + 1) / 2;

    Fig1Result r;
    r.n = n;
    r.L = L;
    r.a = a;
    r.delta = delta;

    const Series sig = generate(SeriesSpec(ExponentialSum{{{1.0, a}}}), n);
    std::vector<double> obs(sig.values);
    for (auto& v : obs) v += delta;  // constant noise
    const Matrix g = embed(obs, L);

    Eigen::BDCSVD<Matrix> svd(g, Eigen::ComputeThinU);
    const auto& s = svd.singularValues();
    if ((s[0] - s[1]) <= 1e-8 * s[0])
        throw GapError("figure1: leading singular values of H + delta E are not separated");
    const Vector u = svd.matrixU().col(0);
    const Matrix ht = u * (u.transpose() * g);
    const std::vector<double> rec = matrix_to_series(hankelize(ht));

    r.error.resize(static_cast<std::size_t>(n));
    r.main_term.assign(static_cast<std::size_t>(n), kNaN);
    const double b = (a + 1.0) / (a - 1.0);
    const double aL = std::pow(a, -L);
    for (int l = 0; l < n; ++l) {
        r.error[static_cast<std::size_t>(l)] = rec[static_cast<std::size_t>(l)] - sig.values[static_cast<std::size_t>(l)];
        if (l < L) {
            r.main_term[static_cast<std::size_t>(l)] =
                2.0 * delta * b * aL * (std::pow(a, l + 1) - 1.0) / (l + 1);
        } else {
            const int k = 2 * L - l;
            if (k > 1)
                r.main_term[static_cast<std::size_t>(l)] =
                    2.0 * delta * b * (a * (std::pow(a, k - 1) - 1.0) - (a * a - 1.0) * (k - 1)) /
                    ((k - 1) * std::pow(a, k));
        }
    }

    r.df0 = r.error[0];
    r.df0_pred = 2.0 * delta * (a + 1.0) * aL;
    r.dfL1_times_L = r.error[static_cast<std::size_t>(L - 1)] * L;
    r.dfL1_pred = 2.0 * delta * b;
    double m = 0.0, m09 = 0.0;
    const int cut = static_cast<int>(0.9 * n);
    for (int l = 0; l < n; ++l) {
        const double e = std::abs(r.error[static_cast<std::size_t>(l)]);
        m = std::max(m, e);
        if (l < cut) m09 = std::max(m09, e);
    }
    r.max_err = m;
    r.max_err_09 = m09;
    return r;
}

void fig1_to_csv(const Fig1Result& r, const std::string& path) {
    CsvTable t;
    t.header = {"index", "error", "main_term"};
    for (int l = 0; l < r.n; ++l)
        t.rows.push_back({static_cast<double>(l), r.error[static_cast<std::size_t>(l)],
                          r.main_term[static_cast<std::size_t>(l)]});
    write_csv(path, t);
}

}  // namespace sigsub
