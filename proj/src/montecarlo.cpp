#include "sigsub/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>
#include <variant>

#include "json.hpp"
#include "sigsub/spectral.hpp"

namespace sigsub {

namespace {

McStatistic statistic_from_name(const std::string& s) {
    if (s == "hankel_norm_growth") return McStatistic::hankel_norm_growth;
    if (s == "covariance_convergence") return McStatistic::covariance_convergence;
    if (s == "cross_term_lil") return McStatistic::cross_term_lil;
    if (s == "clt_const_whitenoise") return McStatistic::clt_const_whitenoise;
    throw std::invalid_argument("unknown monte carlo statistic '" + s + "'");
}

// y = M (M^T x) for the L x K Hankel matrix of `e`, without forming M.
void hankel_gram_apply(const std::vector<double>& e, int L, const Vector& x, Vector& tmp,
                       Vector& out) {
    const int K = static_cast<int>(e.size()) - L + 1;
    tmp.setZero();
    for (int i = 0; i < L; ++i) {
        const double xi = x[i];
        if (xi == 0.0) continue;
        const double* row = e.data() + i;
        for (int j = 0; j < K; ++j) tmp[j] += row[j] * xi;
    }
    out.setZero();
    for (int i = 0; i < L; ++i) {
        const double* row = e.data() + i;
        double acc = 0.0;
        for (int j = 0; j < K; ++j) acc += row[j] * tmp[j];
        out[i] = acc;
    }
}

}  // namespace

double hankel_spectral_norm(const std::vector<double>& values, int window, int max_iters) {
    const int L = window;
    const int n = static_cast<int>(values.size());
    if (L < 1 || L > n) throw std::invalid_argument("hankel_spectral_norm: bad window");
    const int K = n - L + 1;
    if (static_cast<long long>(L) * K <= 64 * 64) return spectral_norm(embed(values, L));

    const int m = std::min(max_iters, L);
    std::vector<Vector> basis;
    basis.reserve(static_cast<std::size_t>(m));
    std::vector<double> alpha, beta;

    // fixed deterministic start vector
    Vector v(L);
    std::mt19937_64 eng(0x5eedcafe1234abcdull);
    for (int i = 0; i < L; ++i) v[i] = static_cast<double>(eng() >> 11) * 0x1.0p-53 - 0.5;
    v.normalize();

    Vector tmp(K), w(L);
    double lam_prev = 0.0;
    for (int k = 0; k < m; ++k) {
        basis.push_back(v);
        hankel_gram_apply(values, L, v, tmp, w);
        double a = v.dot(w);
        alpha.push_back(a);
        w -= a * v;
        if (k > 0) w -= beta.back() * basis[static_cast<std::size_t>(k) - 1];
        for (const auto& b : basis) w -= b.dot(w) * b;  // full reorthogonalization
        const double nb = w.norm();

        const bool check = (k % 10 == 9) || nb < 1e-13 || k == m - 1;
        if (check) {
            const int sz = static_cast<int>(alpha.size());
            Matrix t = Matrix::Zero(sz, sz);
            for (int i = 0; i < sz; ++i) {
                t(i, i) = alpha[static_cast<std::size_t>(i)];
                if (i + 1 < sz) t(i, i + 1) = t(i + 1, i) = beta[static_cast<std::size_t>(i)];
            }
            Eigen::SelfAdjointEigenSolver<Matrix> es(t, Eigen::EigenvaluesOnly);
            const double lam = es.eigenvalues().maxCoeff();
            if (nb < 1e-13 || (k > 20 && std::abs(lam - lam_prev) <= 1e-12 * lam)) {
                return lam > 0.0 ? std::sqrt(lam) : 0.0;
            }
            lam_prev = lam;
        }
        if (nb < 1e-13) break;
        beta.push_back(nb);
        v = w / nb;
    }
    return lam_prev > 0.0 ? std::sqrt(lam_prev) : 0.0;
}

Matrix clt_variance_prediction(int L0, double delta, double fourth_moment) {
    // Entry (i,j) of the limit is (delta^2/L0) [ (c_i + c_j)/L0 - 2 s/L0^2 ]
    // with c_j the j-th column sum of Psi and s its total sum; expanding over
    // the independent diagonals psi_m gives the variance below.
    std::vector<std::vector<double>> nm(static_cast<std::size_t>(L0),
                                        std::vector<double>(static_cast<std::size_t>(L0), 0.0));
    std::vector<double> Nm(static_cast<std::size_t>(L0), 0.0);
    for (int m = 0; m < L0; ++m) {
        for (int j = 0; j < L0; ++j) {
            double c = 0.0;
            if (m == 0) c = 1.0;
            else c = (j - m >= 0 ? 1.0 : 0.0) + (j + m < L0 ? 1.0 : 0.0);
            nm[static_cast<std::size_t>(m)][static_cast<std::size_t>(j)] = c;
            Nm[static_cast<std::size_t>(m)] += c;
        }
    }
    const double scale = delta * delta / L0;
    Matrix var(L0, L0);
    for (int i = 0; i < L0; ++i)
        for (int j = 0; j < L0; ++j) {
            double v = 0.0;
            for (int m = 0; m < L0; ++m) {
                const double amij = (nm[static_cast<std::size_t>(m)][static_cast<std::size_t>(i)] +
                                     nm[static_cast<std::size_t>(m)][static_cast<std::size_t>(j)]) /
                                        L0 -
                                    2.0 * Nm[static_cast<std::size_t>(m)] / (L0 * static_cast<double>(L0));
                const double sig2 = (m == 0) ? fourth_moment - 1.0 : 1.0;
                v += amij * amij * sig2;
            }
            var(i, j) = scale * scale * v;
        }
    return var;
}

McConfig McConfig::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("malformed mc config: ") + e.what());
    }
    try {
        McConfig cfg;
        cfg.stat = statistic_from_name(j.at("statistic").get<std::string>());
        cfg.noise = SeriesSpec::from_json(j.at("noise").dump());
        if (j.contains("signal")) cfg.signal = SeriesSpec::from_json(j.at("signal").dump());
        cfg.trials = j.value("trials", 1);
        cfg.n_grid = j.at("n_grid").get<std::vector<int>>();
        cfg.L0 = j.value("L0", 5);
        cfg.delta = j.value("delta", 0.5);
        cfg.seed = j.value("seed", 1ull);
        return cfg;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("bad mc config fields: ") + e.what());
    }
}

McConfig McConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

namespace {

void run_units_parallel(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const int nt = static_cast<int>(std::min(static_cast<std::size_t>(threads), count));
    for (int t = 0; t < nt; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
        });
    for (auto& th : pool) th.join();
}

McSummary mc_hankel_norm(const McConfig& cfg, int threads) {
    McSummary s;
    s.stat = cfg.stat;
    s.table.header = {"trial", "n", "L", "K", "norm", "ratio", "ratio_over_S"};
    const double l1 = coefficient_l1_norm(cfg.noise);
    const std::size_t units = static_cast<std::size_t>(cfg.trials) * cfg.n_grid.size();
    std::vector<std::vector<double>> rows(units);

    run_units_parallel(units, threads, [&](std::size_t u) {
        const std::size_t trial = u / cfg.n_grid.size();
        const std::size_t ni = u % cfg.n_grid.size();
        const int n = cfg.n_grid[ni];
        const int L = n / 2;
        const Series e = generate(cfg.noise, n, mix_seed(cfg.seed, trial, ni));
        const double nrm = hankel_spectral_norm(e.values, L);
        const double ratio = nrm / std::sqrt(n * std::log(n));
        rows[u] = {static_cast<double>(trial), static_cast<double>(n), static_cast<double>(L),
                   static_cast<double>(n - L + 1), nrm, ratio, ratio / l1};
    });

    s.table.rows = std::move(rows);
    s.envelope.assign(cfg.n_grid.size(), 0.0);
    for (const auto& r : s.table.rows) {
        const std::size_t ni = static_cast<std::size_t>(
            std::find(cfg.n_grid.begin(), cfg.n_grid.end(), static_cast<int>(r[1])) -
            cfg.n_grid.begin());
        s.envelope[ni] = std::max(s.envelope[ni], r[5]);
        s.max_ratio = std::max(s.max_ratio, r[5]);
    }
    // The upper envelope is the running maximum of the per-N cross-trial
    // maxima; a bounded limsup means no new record highs appear once N is
    // large, so the envelope must be flat over the top half of the grid.
    s.envelope_nonincreasing_top = true;
    double record = 0.0;
    for (std::size_t i = 0; i + 1 < cfg.n_grid.size(); ++i) {
        record = std::max(record, s.envelope[i]);
        if (i + 1 > cfg.n_grid.size() / 2 && s.envelope[i + 1] > record + 1e-12)
            s.envelope_nonincreasing_top = false;
    }
    return s;
}

McSummary mc_covariance(const McConfig& cfg, int threads) {
    McSummary s;
    s.stat = cfg.stat;
    s.table.header = {"trial", "n", "K", "dev"};
    const std::size_t units = static_cast<std::size_t>(cfg.trials) * cfg.n_grid.size();
    std::vector<std::vector<double>> rows(units);

    run_units_parallel(units, threads, [&](std::size_t u) {
        const std::size_t trial = u / cfg.n_grid.size();
        const std::size_t ni = u % cfg.n_grid.size();
        const int n = cfg.n_grid[ni];
        const int K = n - cfg.L0 + 1;
        const Series e = generate(cfg.noise, n, mix_seed(cfg.seed, trial, ni));
        const Matrix em = embed(e, cfg.L0);
        const Matrix dev = em * em.transpose() / K - Matrix::Identity(cfg.L0, cfg.L0);
        rows[u] = {static_cast<double>(trial), static_cast<double>(n), static_cast<double>(K),
                   spectral_norm(dev)};
    });
    s.table.rows = std::move(rows);
    for (const auto& r : s.table.rows)
        if (static_cast<int>(r[1]) == cfg.n_grid.back())
            s.worst_dev_last_n = std::max(s.worst_dev_last_n, r[3]);
    return s;
}

McSummary mc_cross_term(const McConfig& cfg, int threads) {
    const auto* osc = std::get_if<Oscillating>(&cfg.signal.variant());
    if (!osc) throw std::invalid_argument("cross_term_lil needs an oscillating signal spec");
    double g2 = 0.0;
    for (const auto& t : osc->terms) g2 += t.gamma * t.gamma;

    McSummary s;
    s.stat = cfg.stat;
    s.lil_constant = std::sqrt(g2);
    s.table.header = {"trial", "n", "ratio"};
    const int n_max = cfg.n_grid.back();
    const Series x = generate(cfg.signal, n_max);

    std::vector<std::vector<double>> per_trial(static_cast<std::size_t>(cfg.trials));
    run_units_parallel(static_cast<std::size_t>(cfg.trials), threads, [&](std::size_t trial) {
        const Series eps = generate(cfg.noise, n_max, mix_seed(cfg.seed, trial));
        std::vector<double>& out = per_trial[trial];
        double acc = 0.0;
        std::size_t gi = 0;
        for (int j = 0; j < n_max && gi < cfg.n_grid.size(); ++j) {
            acc += x.values[static_cast<std::size_t>(j)] * eps.values[static_cast<std::size_t>(j)];
            if (j + 1 == cfg.n_grid[gi]) {
                const double n = cfg.n_grid[gi];
                out.push_back(std::abs(acc) / std::sqrt(n * std::log(std::log(n))));
                ++gi;
            }
        }
    });
    for (int trial = 0; trial < cfg.trials; ++trial)
        for (std::size_t gi = 0; gi < cfg.n_grid.size(); ++gi) {
            const double ratio = per_trial[static_cast<std::size_t>(trial)][gi];
            s.table.rows.push_back({static_cast<double>(trial), static_cast<double>(cfg.n_grid[gi]), ratio});
            s.lil_empirical_max = std::max(s.lil_empirical_max, ratio);
        }
    return s;
}

McSummary mc_clt(const McConfig& cfg) {
    if (!std::holds_alternative<Constant>(cfg.signal.variant()))
        throw std::invalid_argument("clt_const_whitenoise needs the constant signal");
    const auto* wn = std::get_if<WhiteNoise>(&cfg.noise.variant());
    if (!wn) throw std::invalid_argument("clt_const_whitenoise needs white noise");
    if (!(cfg.delta * cfg.delta < cfg.L0 / 4.0))
        throw std::invalid_argument("clt check needs delta^2 < L0/4");
    const int L0 = cfg.L0;
    const int n = cfg.n_grid.back();
    const int K = n - L0 + 1;

    double fourth = 3.0;  // normal
    if (wn->innovation == Innovation::rademacher) fourth = 1.0;
    if (wn->innovation == Innovation::uniform) fourth = 1.8;  // E u^4 = 9/5 for sqrt(3)-scaled uniform

    McSummary s;
    s.stat = cfg.stat;
    s.predicted_variance = clt_variance_prediction(L0, cfg.delta, fourth);

    const Matrix pperp = Matrix::Ones(L0, L0) / L0;
    const double mu_min = static_cast<double>(L0) * K;

    std::vector<Matrix> samples;   // sqrt(N) dP per accepted trial
    std::vector<Matrix> phis;      // sqrt(K) (E E^T/K - I)
    samples.reserve(static_cast<std::size_t>(cfg.trials));
    std::uint64_t attempt = 0;
    while (static_cast<int>(samples.size()) < cfg.trials) {
        const Series e = generate(cfg.noise, n, mix_seed(cfg.seed, attempt++));
        const Matrix em = embed(e, L0);
        Matrix hm = Matrix::Ones(L0, K);
        const Matrix gm = hm + cfg.delta * em;
        const Matrix a = gm * gm.transpose();
        const Matrix b = a - hm * hm.transpose();
        if (spectral_norm(b) >= 0.5 * mu_min) {
            ++s.rejected;
            continue;
        }
        Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (a + a.transpose()));
        const Vector v = es.eigenvectors().col(L0 - 1);
        samples.push_back(std::sqrt(static_cast<double>(n)) * (v * v.transpose() - pperp));
        phis.push_back(std::sqrt(static_cast<double>(K)) *
                       (em * em.transpose() / K - Matrix::Identity(L0, L0)));
    }
    s.accepted = static_cast<int>(samples.size());

    // per-entry variance of sqrt(N) dP
    Matrix mean = Matrix::Zero(L0, L0), m2 = Matrix::Zero(L0, L0);
    for (const auto& m : samples) {
        mean += m;
        m2 += m.cwiseProduct(m);
    }
    mean /= s.accepted;
    s.empirical_variance = m2 / s.accepted - mean.cwiseProduct(mean);

    const double pred_max = s.predicted_variance.maxCoeff();
    s.max_var_rel_err = 0.0;
    s.zero_pred_var_ratio = 0.0;
    for (int i = 0; i < L0; ++i)
        for (int j = 0; j < L0; ++j) {
            const double pred = s.predicted_variance(i, j);
            const double emp = s.empirical_variance(i, j);
            if (pred > 1e-12 * pred_max)
                s.max_var_rel_err = std::max(s.max_var_rel_err, std::abs(emp - pred) / pred);
            else
                s.zero_pred_var_ratio = std::max(s.zero_pred_var_ratio, emp / pred_max);
        }

    // correlations of covariance-matrix entries tied by |i-j|
    s.min_tied_correlation = 1.0;
    struct EntryStat {
        int i, j;
        double mean = 0, var = 0;
        std::vector<double> vals;
    };
    for (int lag = 0; lag < L0; ++lag) {
        std::vector<EntryStat> entries;
        for (int i = 0; i + lag < L0; ++i) {
            EntryStat st;
            st.i = i;
            st.j = i + lag;
            st.vals.reserve(phis.size());
            for (const auto& ph : phis) st.vals.push_back(ph(st.i, st.j));
            double sum = 0;
            for (double v : st.vals) sum += v;
            st.mean = sum / st.vals.size();
            double var = 0;
            for (double v : st.vals) var += (v - st.mean) * (v - st.mean);
            st.var = var / st.vals.size();
            entries.push_back(std::move(st));
        }
        for (std::size_t aa = 0; aa < entries.size(); ++aa)
            for (std::size_t bb = aa + 1; bb < entries.size(); ++bb) {
                double cov = 0;
                for (std::size_t t = 0; t < entries[aa].vals.size(); ++t)
                    cov += (entries[aa].vals[t] - entries[aa].mean) *
                           (entries[bb].vals[t] - entries[bb].mean);
                cov /= entries[aa].vals.size();
                const double corr = cov / std::sqrt(entries[aa].var * entries[bb].var);
                s.min_tied_correlation = std::min(s.min_tied_correlation, corr);
            }
    }

    s.table.header = {"i", "j", "empirical_var", "predicted_var"};
    for (int i = 0; i < L0; ++i)
        for (int j = 0; j < L0; ++j)
            s.table.rows.push_back({static_cast<double>(i), static_cast<double>(j),
                                    s.empirical_variance(i, j), s.predicted_variance(i, j)});
    return s;
}

}  // namespace

McSummary run_monte_carlo(const McConfig& cfg, int threads) {
    if (cfg.trials < 1) throw std::invalid_argument("monte carlo needs trials >= 1");
    if (cfg.n_grid.empty()) throw std::invalid_argument("monte carlo needs an N grid");
    for (std::size_t i = 0; i < cfg.n_grid.size(); ++i) {
        if (cfg.n_grid[i] < 16) throw std::invalid_argument("monte carlo grid entries must be >= 16");
        if (i > 0 && cfg.n_grid[i] <= cfg.n_grid[i - 1])
            throw std::invalid_argument("monte carlo grid must be strictly increasing");
    }
    if (!cfg.noise.stochastic()) throw std::invalid_argument("monte carlo noise must be stochastic");
    switch (cfg.stat) {
        case McStatistic::hankel_norm_growth: return mc_hankel_norm(cfg, threads);
        case McStatistic::covariance_convergence: return mc_covariance(cfg, threads);
        case McStatistic::cross_term_lil: return mc_cross_term(cfg, threads);
        case McStatistic::clt_const_whitenoise: return mc_clt(cfg);
    }
    throw std::logic_error("unreachable");
}

}  // namespace sigsub
