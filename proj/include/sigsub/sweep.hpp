#pragma once

#include <cstdint>
#include <span>

#include "sigsub/bounds.hpp"
#include "sigsub/csv.hpp"
#include "sigsub/examples.hpp"
#include "sigsub/series.hpp"

namespace sigsub {

struct SweepConfig {
    SeriesSpec signal;  // deterministic finite-rank family
    SeriesSpec noise;
    std::vector<double> deltas;
    std::vector<int> n_grid;  // strictly increasing
    WindowRule rule;
    std::uint64_t seed = 1;
    bool main_terms = true;  // also record ||dP - dV01||, ||dP - L||, ||dP - T||

    static SweepConfig from_json(const std::string& text);
    static SweepConfig from_json_file(const std::string& path);
    void validate() const;
};

struct SweepRecord {
    int n = 0, L = 0, K = 0;
    double delta = 0.0;
    double dP = 0.0;  // oracle ||P0perp(delta) - P0perp||
    double res_v01 = 0.0, res_L = 0.0, res_T = 0.0;  // NaN where a precondition fails
    BoundsReport bounds;
    bool violation = false;  // a valid bound was exceeded by its measured quantity
};

// Ordinary least squares of y against x with the usual slope standard error.
struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double max_residual = 0.0;
};
RateFit fit_line(std::span<const double> x, std::span<const double> y);

struct SweepResult {
    std::vector<SweepRecord> records;  // ordered by (n index, delta index)
    std::vector<double> deltas;
    std::vector<RateFit> dp_loglog;   // log dP vs log N over the top half, per delta
    std::vector<RateFit> dp_semilog;  // log dP vs N over the top half, per delta
    int violations = 0;

    CsvTable to_csv() const;
};

SweepResult run_sweep(const SweepConfig& cfg, int threads = 1);

// Fit over the top half (indices >= floor(n/2)) of a positive sequence.
RateFit fit_loglog_top_half(const std::vector<double>& ns, const std::vector<double>& qs);
RateFit fit_semilog_top_half(const std::vector<double>& ns, const std::vector<double>& qs);

}  // namespace sigsub
