// Command-line front end: series generation, bound evaluation, expansion
// checks, N-sweeps, SSA reconstruction, ESPRIT, LRF recovery, Monte Carlo.

#include <cstdio>
#include <exception>
#include <limits>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "sigsub/bounds.hpp"
#include "sigsub/examples.hpp"
#include "sigsub/methods.hpp"
#include "sigsub/montecarlo.hpp"
#include "sigsub/plot.hpp"
#include "sigsub/sweep.hpp"

using namespace sigsub;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumeric = 2;

PerturbationPair load_pair(const std::string& signal_csv, const std::string& noise_csv, int L,
                           std::optional<int> d) {
    const auto sig = Series::values_from_csv(signal_csv);
    const auto noi = Series::values_from_csv(noise_csv);
    if (sig.size() != noi.size())
        throw std::invalid_argument("signal and noise series must have the same length");
    const RankPolicy policy = d ? RankPolicy::exact(*d) : RankPolicy{};
    return PerturbationPair::make(embed(sig, L), embed(noi, L), policy);
}

void write_table(const CsvTable& t, const std::string& path) {
    write_csv(path, t);
    std::fprintf(stderr, "wrote %s\n", path.c_str());
}

int run(int argc, char** argv) {
    CLI::App app{"perturbation analysis of Hankel signal subspaces"};
    app.require_subcommand(1);
    int threads = 1;

    // generate
    auto* gen = app.add_subcommand("generate", "evaluate a series spec to CSV");
    std::string gen_spec, gen_out = "series.csv";
    int gen_n = 100;
    std::uint64_t gen_seed = 1;
    gen->add_option("--spec", gen_spec, "series spec JSON file")->required();
    gen->add_option("--n", gen_n, "length")->required();
    auto* gen_seed_opt = gen->add_option("--seed", gen_seed, "seed for stochastic specs");
    gen->add_option("--out", gen_out, "output CSV");
    gen->callback([&] {
        const auto spec = SeriesSpec::from_json_file(gen_spec);
        std::optional<std::uint64_t> seed;
        if (gen_seed_opt->count() > 0) seed = gen_seed;
        const auto s = generate(spec, gen_n, seed);
        s.to_csv(gen_out);
        std::fprintf(stderr, "wrote %s\n", gen_out.c_str());
    });

    // analyze
    auto* ana = app.add_subcommand("analyze", "bounds report for a signal/noise pair");
    std::string ana_sig, ana_noise, ana_out = "analysis.csv";
    int ana_L = 0;
    double ana_delta = 0.1;
    int ana_d = -1;
    ana->add_option("--signal", ana_sig, "signal series CSV")->required();
    ana->add_option("--noise", ana_noise, "noise series CSV")->required();
    ana->add_option("--L", ana_L, "window length")->required();
    ana->add_option("--delta", ana_delta, "perturbation parameter")->required();
    ana->add_option("--d", ana_d, "signal rank (default: numerical rank)");
    ana->add_option("--out", ana_out, "output CSV");
    ana->callback([&] {
        const auto p = load_pair(ana_sig, ana_noise, ana_L,
                                 ana_d > 0 ? std::optional<int>(ana_d) : std::nullopt);
        const auto b = compute_bounds(p, ana_delta);
        CsvTable t;
        t.header = BoundsReport::csv_header();
        t.header.insert(t.header.end(), {"dP", "res_v01", "res_L", "res_T", "radius_half"});
        auto row = b.csv_row();
        const Matrix dpm = projector_direct(p, ana_delta, p.dec.d).matrix - p.dec.P0perp;
        row.push_back(spectral_norm(dpm));
        row.push_back(spectral_norm(dpm - ana_delta * V0_1(p)));
        double res_l = std::numeric_limits<double>::quiet_NaN();
        double res_t = res_l;
        try {
            res_l = spectral_norm(dpm - L_delta(p, ana_delta));
            res_t = spectral_norm(dpm - T_delta(p, ana_delta));
        } catch (const RadiusError&) {
        }
        row.push_back(res_l);
        row.push_back(res_t);
        row.push_back(radius_delta0(p, 0.5));
        t.rows.push_back(row);
        write_table(t, ana_out);
    });

    // expand
    auto* exp = app.add_subcommand("expand", "perturbation series against the SVD oracle");
    std::string exp_sig, exp_noise;
    int exp_L = 0, exp_d = -1;
    double exp_delta = 0.1, exp_tol = 1e-10;
    exp->add_option("--signal", exp_sig)->required();
    exp->add_option("--noise", exp_noise)->required();
    exp->add_option("--L", exp_L)->required();
    exp->add_option("--delta", exp_delta)->required();
    exp->add_option("--d", exp_d, "signal rank (default: numerical rank)");
    exp->add_option("--tol", exp_tol, "series truncation tolerance");
    exp->callback([&] {
        const auto p = load_pair(exp_sig, exp_noise, exp_L,
                                 exp_d > 0 ? std::optional<int>(exp_d) : std::nullopt);
        const auto ser = series_projector(p, exp_delta, exp_tol);
        const auto dir = projector_direct(p, exp_delta, p.dec.d);
        std::printf("order,%d\ntail_bound,%s\nresidual,%s\n", ser.order,
                    fmt17(*ser.tail_bound).c_str(),
                    fmt17(spectral_norm(ser.matrix - dir.matrix)).c_str());
    });

    // sweep
    auto* swp = app.add_subcommand("sweep", "N-sweep with rate fits from a JSON config");
    std::string swp_cfg, swp_out = "sweep.csv", swp_plot;
    swp->add_option("--config", swp_cfg, "sweep config JSON")->required();
    swp->add_option("--threads", threads, "worker threads");
    swp->add_option("--out", swp_out, "output CSV");
    swp->add_option("--plot", swp_plot, "optional SVG of dP vs N (log-log)");
    swp->callback([&] {
        const auto cfg = SweepConfig::from_json_file(swp_cfg);
        const auto res = run_sweep(cfg, threads);
        write_table(res.to_csv(), swp_out);
        for (std::size_t di = 0; di < res.deltas.size(); ++di)
            std::printf("delta,%s,loglog_slope,%s,stderr,%s,semilog_slope,%s,violations,%d\n",
                        fmt17(res.deltas[di]).c_str(), fmt17(res.dp_loglog[di].slope).c_str(),
                        fmt17(res.dp_loglog[di].slope_stderr).c_str(),
                        fmt17(res.dp_semilog[di].slope).c_str(), res.violations);
        if (!swp_plot.empty()) {
            std::vector<PlotSeries> series;
            for (std::size_t di = 0; di < res.deltas.size(); ++di) {
                PlotSeries ps;
                ps.label = "delta=" + std::to_string(res.deltas[di]);
                for (std::size_t ni = 0; ni < cfg.n_grid.size(); ++ni) {
                    ps.x.push_back(cfg.n_grid[ni]);
                    ps.y.push_back(res.records[ni * res.deltas.size() + di].dP);
                }
                series.push_back(std::move(ps));
            }
            PlotOptions opt;
            opt.title = "projector difference vs N";
            opt.log_x = opt.log_y = true;
            write_svg_plot(swp_plot, series, opt);
        }
    });

    // reconstruct
    auto* rec = app.add_subcommand(
        "reconstruct", "SSA reconstruction error curve (a^n signal, constant noise)");
    double rec_a = 1.01, rec_delta = 1.0;
    int rec_n = 999;
    std::string rec_out = "reconstruct.csv", rec_plot;
    rec->add_option("--a", rec_a, "exponent base")->required();
    rec->add_option("--delta", rec_delta, "perturbation parameter");
    rec->add_option("--n", rec_n, "odd series length")->required();
    rec->add_option("--out", rec_out, "output CSV");
    rec->add_option("--plot", rec_plot, "optional SVG");
    rec->callback([&] {
        const auto r = figure1_reproduce(rec_a, rec_delta, rec_n);
        fig1_to_csv(r, rec_out);
        std::fprintf(stderr, "wrote %s\n", rec_out.c_str());
        std::printf("df0,%s,df0_pred,%s,dfL1_times_L,%s,dfL1_pred,%s,max_err,%s\n",
                    fmt17(r.df0).c_str(), fmt17(r.df0_pred).c_str(), fmt17(r.dfL1_times_L).c_str(),
                    fmt17(r.dfL1_pred).c_str(), fmt17(r.max_err).c_str());
        if (!rec_plot.empty()) {
            PlotSeries err{"error", {}, {}}, main{"main term", {}, {}};
            for (int l = 0; l < r.n; ++l) {
                err.x.push_back(l);
                err.y.push_back(r.error[static_cast<std::size_t>(l)]);
                main.x.push_back(l);
                main.y.push_back(r.main_term[static_cast<std::size_t>(l)]);
            }
            PlotOptions opt;
            opt.title = "reconstruction errors";
            write_svg_plot(rec_plot, {err, main}, opt);
        }
    });

    // esprit
    auto* esp = app.add_subcommand("esprit", "characteristic roots from the signal subspace");
    std::string esp_sig, esp_noise, esp_out = "esprit.csv";
    int esp_L = 0, esp_d = -1;
    double esp_delta = 0.0;
    esp->add_option("--signal", esp_sig)->required();
    esp->add_option("--noise", esp_noise, "optional noise series CSV");
    esp->add_option("--delta", esp_delta, "perturbation parameter (with --noise)");
    esp->add_option("--L", esp_L)->required();
    esp->add_option("--d", esp_d, "signal rank (default: numerical rank)");
    esp->add_option("--out", esp_out, "output CSV");
    esp->callback([&] {
        const auto sig = Series::values_from_csv(esp_sig);
        const Matrix h = embed(sig, esp_L);
        EspritResult r;
        double bound = std::numeric_limits<double>::quiet_NaN();
        if (esp_noise.empty()) {
            const auto dec = decompose(h, esp_d > 0 ? RankPolicy::exact(esp_d) : RankPolicy{});
            Matrix basis(dec.dim(), dec.d);
            int col = 0;
            for (const auto& c : dec.clusters)
                for (int j = 0; j < c.multiplicity(); ++j) basis.col(col++) = c.basis.col(j);
            r = esprit(basis);
        } else {
            const auto p = load_pair(esp_sig, esp_noise, esp_L,
                                     esp_d > 0 ? std::optional<int>(esp_d) : std::nullopt);
            r = esprit_perturbed(p, esp_delta, p.dec.d);
            const double dP =
                spectral_norm(projector_direct(p, esp_delta, p.dec.d).matrix - p.dec.P0perp);
            if (dP < 0.5 * r.upsilon) bound = esprit_error_bound(dP, r.upsilon);
        }
        CsvTable t;
        t.header = {"re", "im", "frequency", "growth", "upsilon", "error_bound"};
        for (std::size_t i = 0; i < r.eigenvalues.size(); ++i)
            t.rows.push_back({r.eigenvalues[i].real(), r.eigenvalues[i].imag(), r.frequencies[i],
                              r.growth_rates[i], r.upsilon, bound});
        write_table(t, esp_out);
    });

    // lrf
    auto* lrf = app.add_subcommand("lrf", "linear recurrence coefficients from the null space");
    std::string lrf_sig, lrf_noise, lrf_out = "lrf.csv";
    int lrf_L = 0, lrf_d = -1;
    double lrf_delta = 0.0;
    lrf->add_option("--signal", lrf_sig)->required();
    lrf->add_option("--noise", lrf_noise, "optional noise series CSV");
    lrf->add_option("--delta", lrf_delta, "perturbation parameter (with --noise)");
    lrf->add_option("--L", lrf_L)->required();
    lrf->add_option("--d", lrf_d, "signal rank (default: numerical rank)");
    lrf->add_option("--out", lrf_out, "output CSV");
    lrf->callback([&] {
        const auto sig = Series::values_from_csv(lrf_sig);
        CsvTable t;
        t.header = {"k", "a_k", "vartheta", "residual", "error_bound"};
        double bound = std::numeric_limits<double>::quiet_NaN();
        LrfResult r;
        if (lrf_noise.empty()) {
            const auto dec =
                decompose(embed(sig, lrf_L), lrf_d > 0 ? RankPolicy::exact(lrf_d) : RankPolicy{});
            r = lrf_coefficients(dec, sig);
        } else {
            const auto p = load_pair(lrf_sig, lrf_noise, lrf_L,
                                     lrf_d > 0 ? std::optional<int>(lrf_d) : std::nullopt);
            r = lrf_perturbed(p, lrf_delta, p.dec.d);
            const auto clean = lrf_coefficients(p.dec);
            const double dP =
                spectral_norm(projector_direct(p, lrf_delta, p.dec.d).matrix - p.dec.P0perp);
            if (dP < std::sqrt(1.0 - clean.cos_to_null * clean.cos_to_null))
                bound = lrf_error_bound(dP, clean.cos_to_null);
        }
        // R holds (a_{L-1}, ..., a_1): row k gives the coefficient of x_{n-k}
        const int order = static_cast<int>(r.R.size());
        for (int i = 0; i < order; ++i)
            t.rows.push_back(
                {static_cast<double>(order - i), r.R[i], r.cos_to_null, r.residual, bound});
        write_table(t, lrf_out);
    });

    // mc
    auto* mc = app.add_subcommand("mc", "Monte Carlo verification runs");
    std::string mc_cfg, mc_out = "mc.csv";
    mc->add_option("--config", mc_cfg, "mc config JSON")->required();
    mc->add_option("--threads", threads, "worker threads");
    mc->add_option("--out", mc_out, "output CSV");
    mc->callback([&] {
        const auto cfg = McConfig::from_json_file(mc_cfg);
        const auto s = run_monte_carlo(cfg, threads);
        write_table(s.table, mc_out);
        switch (s.stat) {
            case McStatistic::hankel_norm_growth:
                std::printf("max_ratio,%s,envelope_nonincreasing_top,%d\n",
                            fmt17(s.max_ratio).c_str(), s.envelope_nonincreasing_top ? 1 : 0);
                break;
            case McStatistic::covariance_convergence:
                std::printf("worst_dev_last_n,%s\n", fmt17(s.worst_dev_last_n).c_str());
                break;
            case McStatistic::cross_term_lil:
                std::printf("lil_constant,%s,empirical_max,%s\n", fmt17(s.lil_constant).c_str(),
                            fmt17(s.lil_empirical_max).c_str());
                break;
            case McStatistic::clt_const_whitenoise:
                std::printf("accepted,%d,rejected,%d,max_var_rel_err,%s,min_tied_correlation,%s\n",
                            s.accepted, s.rejected, fmt17(s.max_var_rel_err).c_str(),
                            fmt17(s.min_tied_correlation).c_str());
                break;
        }
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const RadiusError& e) {
        std::fprintf(stderr, "numerical precondition failed (expansion radius): %s\n", e.what());
        return kExitNumeric;
    } catch (const GapError& e) {
        std::fprintf(stderr, "numerical precondition failed (singular value gap): %s\n", e.what());
        return kExitNumeric;
    } catch (const DegenerateRankError& e) {
        std::fprintf(stderr, "numerical precondition failed (rank): %s\n", e.what());
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    }
}
