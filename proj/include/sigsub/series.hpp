#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sigsub/rng.hpp"

namespace sigsub {

// Signal / noise families. Deterministic families have finite rank as time
// series; the stochastic ones do not.
struct ExpTerm {
    double beta;  // weight, != 0
    double a;     // base, != 0; |a| strictly decreasing across terms
};

struct OscTerm {
    double gamma;  // amplitude > 0
    double omega;  // frequency in [0, 1/2], strictly increasing across terms
    double phi;    // phase in [0, 2*pi)
};

struct ExponentialSum {
    std::vector<ExpTerm> terms;
};
struct Polynomial {
    std::vector<double> coeffs;  // gamma_p .. gamma_0, gamma_p != 0
};
struct Oscillating {
    std::vector<OscTerm> terms;
};
struct LinearStationary {
    std::vector<double> coeffs;  // c_{-m} .. c_{m}, odd length, L2-normalized on validate()
    Innovation innovation = Innovation::normal;
};
struct Ar1 {
    double rho;  // |rho| < 1; e_n = rho e_{n-1} + sqrt(1-rho^2) eps_n
    Innovation innovation = Innovation::normal;
};
struct WhiteNoise {
    Innovation innovation = Innovation::normal;
};
struct Constant {};
struct Saw {};

class SeriesSpec {
public:
    using Variant = std::variant<ExponentialSum, Polynomial, Oscillating, LinearStationary,
                                 Ar1, WhiteNoise, Constant, Saw>;

    SeriesSpec() : v_(Constant{}) {}
    explicit SeriesSpec(Variant v);  // validates; LinearStationary coeffs are renormalized

    const Variant& variant() const { return v_; }

    bool stochastic() const;
    // Rank of the trajectory matrix for any min(L,K) > rank; absent for
    // stochastic variants (not of finite rank).
    std::optional<int> theoretical_rank() const;

    std::string to_json() const;
    static SeriesSpec from_json(const std::string& text);
    static SeriesSpec from_json_file(const std::string& path);

private:
    void validate_and_normalize();
    Variant v_;
};

struct Series {
    std::vector<double> values;
    SeriesSpec spec;
    std::optional<std::uint64_t> seed;

    int size() const { return static_cast<int>(values.size()); }
    double operator[](int i) const { return values[static_cast<std::size_t>(i)]; }

    void to_csv(const std::string& path) const;  // header "index,value"
    static std::vector<double> values_from_csv(const std::string& path);
};

// Evaluate the family formula on 0..n-1. Stochastic variants require a seed;
// deterministic ones ignore it. Throws std::range_error when an exponential
// term would overflow double range (the message names the maximal safe n).
Series generate(const SeriesSpec& spec, int n, std::optional<std::uint64_t> seed = std::nullopt);

// Largest n for which generate() of an exponential-sum spec stays within
// double range; n is unconstrained (INT_MAX) for the other families.
int max_safe_length(const SeriesSpec& spec);

// l1 norm of the moving-average coefficients of a stationary spec: sum|c_j|
// for the finite window, sqrt((1+|rho|)/(1-|rho|)) for AR(1), 1 for white
// noise. Scales the norm-growth envelope of the trajectory matrices.
double coefficient_l1_norm(const SeriesSpec& spec);

}  // namespace sigsub
