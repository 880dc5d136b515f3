#include "sigsub/sweep.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace sigsub {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

WindowRule window_rule_from_json(const nlohmann::json& j) {
    const std::string kind = j.at("rule").get<std::string>();
    const double value = j.at("value").get<double>();
    if (kind == "fixed_L") return WindowRule::fixed_L(static_cast<int>(value));
    if (kind == "fixed_K") return WindowRule::fixed_K(static_cast<int>(value));
    if (kind == "alpha") return WindowRule::with_alpha(value);
    throw std::invalid_argument("unknown window rule '" + kind + "'");
}

}  // namespace

void SweepConfig::validate() const {
    if (!signal.theoretical_rank())
        throw std::invalid_argument("sweep signal must be a finite-rank family");
    if (deltas.empty()) throw std::invalid_argument("sweep needs at least one delta");
    if (n_grid.empty()) throw std::invalid_argument("sweep needs an N grid");
    for (std::size_t i = 1; i < n_grid.size(); ++i)
        if (n_grid[i] <= n_grid[i - 1]) throw std::invalid_argument("N grid must be strictly increasing");
    const int d = *signal.theoretical_rank();
    for (int n : n_grid) {
        auto [L, K] = rule.dims(n);
        if (std::min(L, K) <= d)
            throw std::invalid_argument("window rule must keep min(L,K) > rank d on the whole grid");
    }
    if (n_grid.back() > max_safe_length(signal))
        throw std::invalid_argument("N grid exceeds the safe length of the exponential signal");
}

SweepConfig SweepConfig::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("malformed sweep config: ") + e.what());
    }
    try {
        SweepConfig cfg;
        cfg.signal = SeriesSpec::from_json(j.at("signal").dump());
        cfg.noise = SeriesSpec::from_json(j.at("noise").dump());
        cfg.deltas = j.at("deltas").get<std::vector<double>>();
        cfg.n_grid = j.at("n_grid").get<std::vector<int>>();
        cfg.rule = window_rule_from_json(j.at("window"));
        cfg.seed = j.value("seed", 1ull);
        cfg.main_terms = j.value("main_terms", true);
        cfg.validate();
        return cfg;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("bad sweep config fields: ") + e.what());
    }
}

SweepConfig SweepConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

RateFit fit_line(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) throw std::invalid_argument("fit_line needs >= 2 points");
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    RateFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss_res = 0, rmax = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        ss_res += r * r;
        rmax = std::max(rmax, std::abs(r));
    }
    f.max_residual = rmax;
    f.slope_stderr = n > 2 ? std::sqrt(ss_res / (static_cast<double>(n) - 2.0) / sxx) : 0.0;
    return f;
}

namespace {

RateFit fit_top_half(const std::vector<double>& ns, const std::vector<double>& qs, bool log_x) {
    if (ns.size() != qs.size() || ns.size() < 2)
        throw std::invalid_argument("rate fit needs matching sequences of >= 2 points");
    const std::size_t start = ns.size() / 2;
    std::vector<double> xs, ys;
    for (std::size_t i = start; i < ns.size(); ++i) {
        if (!(qs[i] > 0.0) || !std::isfinite(qs[i])) continue;
        xs.push_back(log_x ? std::log(ns[i]) : ns[i]);
        ys.push_back(std::log(qs[i]));
    }
    if (xs.size() < 2) {
        RateFit f;
        f.slope = f.intercept = f.slope_stderr = f.max_residual = kNaN;
        return f;
    }
    return fit_line(xs, ys);
}

}  // namespace

RateFit fit_loglog_top_half(const std::vector<double>& ns, const std::vector<double>& qs) {
    return fit_top_half(ns, qs, true);
}
RateFit fit_semilog_top_half(const std::vector<double>& ns, const std::vector<double>& qs) {
    return fit_top_half(ns, qs, false);
}

SweepResult run_sweep(const SweepConfig& cfg, int threads) {
    cfg.validate();
    const int d = *cfg.signal.theoretical_rank();
    const std::size_t n_count = cfg.n_grid.size();
    const std::size_t d_count = cfg.deltas.size();

    SweepResult result;
    result.deltas = cfg.deltas;
    result.records.resize(n_count * d_count);

    auto work = [&](std::size_t ni) {
        const int n = cfg.n_grid[ni];
        auto [L, K] = cfg.rule.dims(n);
        const Series sig = generate(cfg.signal, n);
        const Series noi = cfg.noise.stochastic()
                               ? generate(cfg.noise, n, mix_seed(cfg.seed, ni))
                               : generate(cfg.noise, n);
        const PerturbationPair pair =
            PerturbationPair::make(embed(sig, L), embed(noi, L), RankPolicy::exact(d));
        for (std::size_t di = 0; di < d_count; ++di) {
            const double delta = cfg.deltas[di];
            SweepRecord rec;
            rec.n = n;
            rec.L = L;
            rec.K = K;
            rec.delta = delta;
            rec.bounds = compute_bounds(pair, delta);

            Matrix dpm;
            try {
                dpm = projector_direct(pair, delta, d).matrix - pair.dec.P0perp;
                rec.dP = spectral_norm(dpm);
            } catch (const GapError&) {
                rec.dP = kNaN;
            }
            rec.res_v01 = rec.res_L = rec.res_T = kNaN;
            if (cfg.main_terms && std::isfinite(rec.dP)) {
                rec.res_v01 = spectral_norm(dpm - delta * V0_1(pair));
                try {
                    rec.res_L = spectral_norm(dpm - L_delta(pair, delta));
                    rec.res_T = spectral_norm(dpm - T_delta(pair, delta));
                } catch (const RadiusError&) {
                }
            }
            if (rec.bounds.valid && std::isfinite(rec.dP)) {
                const double slack = 1e-12;
                auto violated = [&](double measured, double rhs) {
                    return std::isfinite(measured) && measured > rhs * (1.0 + slack) + 1e-15;
                };
                rec.violation = violated(rec.dP, rec.bounds.rhs_projector) ||
                                violated(rec.dP, rec.bounds.rhs_coarse) ||
                                violated(rec.dP, rec.bounds.rhs_orth) ||
                                violated(rec.res_L, rec.bounds.rhs_L) ||
                                violated(rec.res_T, rec.bounds.rhs_T);
                // the W1-residual bound needs W1 itself, recomputed only when needed
                if (!rec.violation && cfg.main_terms && std::isfinite(rec.dP)) {
                    const double res_w1 = spectral_norm(dpm - W1(pair, delta));
                    rec.violation = violated(res_w1, rec.bounds.rhs_w1);
                }
            }
            result.records[ni * d_count + di] = std::move(rec);
        }
    };

    if (threads <= 1) {
        for (std::size_t ni = 0; ni < n_count; ++ni) work(ni);
    } else {
        std::vector<std::thread> pool;
        std::atomic<std::size_t> next{0};
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (std::size_t ni = next.fetch_add(1); ni < n_count; ni = next.fetch_add(1)) work(ni);
            });
        for (auto& th : pool) th.join();
    }

    for (const auto& rec : result.records) result.violations += rec.violation ? 1 : 0;

    std::vector<double> ns(cfg.n_grid.begin(), cfg.n_grid.end());
    for (std::size_t di = 0; di < d_count; ++di) {
        std::vector<double> q(n_count);
        for (std::size_t ni = 0; ni < n_count; ++ni) q[ni] = result.records[ni * d_count + di].dP;
        result.dp_loglog.push_back(fit_loglog_top_half(ns, q));
        result.dp_semilog.push_back(fit_semilog_top_half(ns, q));
    }
    return result;
}

CsvTable SweepResult::to_csv() const {
    CsvTable t;
    t.header = {"n", "L", "K", "delta", "dP", "res_v01", "res_L", "res_T", "violation"};
    const auto bh = BoundsReport::csv_header();
    t.header.insert(t.header.end(), bh.begin() + 1, bh.end());  // skip duplicate delta column
    for (const auto& r : records) {
        std::vector<double> row = {static_cast<double>(r.n), static_cast<double>(r.L),
                                   static_cast<double>(r.K), r.delta,
                                   r.dP,  r.res_v01, r.res_L, r.res_T,
                                   r.violation ? 1.0 : 0.0};
        const auto br = r.bounds.csv_row();
        row.insert(row.end(), br.begin() + 1, br.end());
        t.rows.push_back(std::move(row));
    }
    return t;
}

}  // namespace sigsub
