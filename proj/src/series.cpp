#include "sigsub/series.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "sigsub/csv.hpp"

namespace sigsub {

namespace {

using nlohmann::json;

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::string innovation_name(Innovation inn) {
    switch (inn) {
        case Innovation::normal: return "normal";
        case Innovation::rademacher: return "rademacher";
        case Innovation::uniform: return "uniform";
    }
    return "normal";
}

Innovation innovation_from_name(const std::string& s) {
    if (s == "normal") return Innovation::normal;
    if (s == "rademacher") return Innovation::rademacher;
    if (s == "uniform") return Innovation::uniform;
    throw std::invalid_argument("unknown innovation '" + s + "'");
}

}  // namespace

SeriesSpec::SeriesSpec(Variant v) : v_(std::move(v)) { validate_and_normalize(); }

void SeriesSpec::validate_and_normalize() {
    std::visit(
        [](auto& fam) {
            using T = std::decay_t<decltype(fam)>;
            if constexpr (std::is_same_v<T, ExponentialSum>) {
                if (fam.terms.empty()) throw std::invalid_argument("exponential sum needs at least one term");
                for (std::size_t i = 0; i < fam.terms.size(); ++i) {
                    if (fam.terms[i].beta == 0.0) throw std::invalid_argument("exponential weight beta must be nonzero");
                    if (fam.terms[i].a == 0.0) throw std::invalid_argument("exponential base must be nonzero");
                    if (i > 0 && std::abs(fam.terms[i].a) >= std::abs(fam.terms[i - 1].a))
                        throw std::invalid_argument("exponential |a_k| must be strictly decreasing");
                }
            } else if constexpr (std::is_same_v<T, Polynomial>) {
                if (fam.coeffs.empty()) throw std::invalid_argument("polynomial needs coefficients");
                if (fam.coeffs.front() == 0.0) throw std::invalid_argument("leading polynomial coefficient must be nonzero");
            } else if constexpr (std::is_same_v<T, Oscillating>) {
                if (fam.terms.empty()) throw std::invalid_argument("oscillating series needs at least one term");
                for (std::size_t i = 0; i < fam.terms.size(); ++i) {
                    const auto& t = fam.terms[i];
                    if (t.gamma <= 0.0) throw std::invalid_argument("oscillating amplitude must be positive");
                    if (t.omega < 0.0 || t.omega > 0.5) throw std::invalid_argument("frequency must lie in [0, 1/2]");
                    if (t.phi < 0.0 || t.phi >= kTwoPi) throw std::invalid_argument("phase must lie in [0, 2*pi)");
                    if (i > 0 && t.omega <= fam.terms[i - 1].omega)
                        throw std::invalid_argument("frequencies must be strictly increasing");
                }
            } else if constexpr (std::is_same_v<T, LinearStationary>) {
                if (fam.coeffs.empty() || fam.coeffs.size() % 2 == 0)
                    throw std::invalid_argument("linear stationary window must have odd length c_{-m}..c_m");
                double s2 = 0.0;
                for (double c : fam.coeffs) s2 += c * c;
                if (s2 <= 0.0) throw std::invalid_argument("linear stationary window must be nonzero");
                const double inv = 1.0 / std::sqrt(s2);
                for (double& c : fam.coeffs) c *= inv;  // unit variance
            } else if constexpr (std::is_same_v<T, Ar1>) {
                if (!(std::abs(fam.rho) < 1.0)) throw std::invalid_argument("AR(1) needs |rho| < 1");
            }
        },
        v_);
}

bool SeriesSpec::stochastic() const {
    return std::holds_alternative<LinearStationary>(v_) || std::holds_alternative<Ar1>(v_) ||
           std::holds_alternative<WhiteNoise>(v_);
}

std::optional<int> SeriesSpec::theoretical_rank() const {
    if (const auto* e = std::get_if<ExponentialSum>(&v_)) return static_cast<int>(e->terms.size());
    if (const auto* p = std::get_if<Polynomial>(&v_)) return static_cast<int>(p->coeffs.size());
    if (const auto* o = std::get_if<Oscillating>(&v_)) {
        int r = 2 * static_cast<int>(o->terms.size());
        if (o->terms.front().omega == 0.0) r -= 1;
        if (o->terms.back().omega == 0.5) r -= 1;
        return r;
    }
    if (std::holds_alternative<Constant>(v_) || std::holds_alternative<Saw>(v_)) return 1;
    return std::nullopt;
}

double coefficient_l1_norm(const SeriesSpec& spec) {
    if (const auto* ls = std::get_if<LinearStationary>(&spec.variant())) {
        double s = 0.0;
        for (double c : ls->coeffs) s += std::abs(c);
        return s;
    }
    if (const auto* ar = std::get_if<Ar1>(&spec.variant())) {
        const double r = std::abs(ar->rho);
        return std::sqrt((1.0 + r) / (1.0 - r));
    }
    if (std::holds_alternative<WhiteNoise>(spec.variant())) return 1.0;
    throw std::invalid_argument("coefficient_l1_norm needs a stationary spec");
}

int max_safe_length(const SeriesSpec& spec) {
    const auto* e = std::get_if<ExponentialSum>(&spec.variant());
    if (!e) return std::numeric_limits<int>::max();
    const double amax = std::abs(e->terms.front().a);
    if (amax <= 1.0) return std::numeric_limits<int>::max();
    double bsum = 0.0;
    for (const auto& t : e->terms) bsum += std::abs(t.beta);
    // largest n with bsum * amax^(n-1) < DBL_MAX / 16
    const double budget = std::log(std::numeric_limits<double>::max() / 16.0) - std::log(bsum);
    const double nmax = 1.0 + budget / std::log(amax);
    if (nmax >= static_cast<double>(std::numeric_limits<int>::max())) return std::numeric_limits<int>::max();
    return std::max(1, static_cast<int>(nmax));
}

Series generate(const SeriesSpec& spec, int n, std::optional<std::uint64_t> seed) {
    if (n < 1) throw std::invalid_argument("series length must be >= 1");
    if (spec.stochastic() && !seed) throw std::invalid_argument("stochastic series requires a seed");

    Series out;
    out.spec = spec;
    if (spec.stochastic()) out.seed = seed;
    auto& y = out.values;
    y.resize(static_cast<std::size_t>(n));

    std::visit(
        [&](const auto& fam) {
            using T = std::decay_t<decltype(fam)>;
            if constexpr (std::is_same_v<T, Constant>) {
                std::fill(y.begin(), y.end(), 1.0);
            } else if constexpr (std::is_same_v<T, Saw>) {
                for (int i = 0; i < n; ++i) y[i] = (i % 2 == 0) ? 1.0 : -1.0;
            } else if constexpr (std::is_same_v<T, ExponentialSum>) {
                const int nmax = max_safe_length(out.spec);
                if (n > nmax) {
                    std::ostringstream msg;
                    msg << "exponential sum overflows double range at length " << n
                        << "; maximal safe n is " << nmax;
                    throw std::range_error(msg.str());
                }
                std::vector<double> pw(fam.terms.size(), 1.0);
                for (int i = 0; i < n; ++i) {
                    double v = 0.0;
                    for (std::size_t k = 0; k < fam.terms.size(); ++k) {
                        v += fam.terms[k].beta * pw[k];
                        pw[k] *= fam.terms[k].a;
                    }
                    y[i] = v;
                }
            } else if constexpr (std::is_same_v<T, Polynomial>) {
                for (int i = 0; i < n; ++i) {
                    double v = 0.0;
                    for (double c : fam.coeffs) v = v * static_cast<double>(i) + c;  // Horner
                    y[i] = v;
                }
            } else if constexpr (std::is_same_v<T, Oscillating>) {
                for (int i = 0; i < n; ++i) {
                    double v = 0.0;
                    for (const auto& t : fam.terms) v += t.gamma * std::cos(kTwoPi * t.omega * i + t.phi);
                    y[i] = v;
                }
            } else if constexpr (std::is_same_v<T, WhiteNoise>) {
                InnovationSampler eps(fam.innovation, *seed);
                for (int i = 0; i < n; ++i) y[i] = eps();
            } else if constexpr (std::is_same_v<T, Ar1>) {
                InnovationSampler eps(fam.innovation, *seed);
                const double scale = std::sqrt(1.0 - fam.rho * fam.rho);
                double prev = eps();  // variance-1 start keeps the process stationary
                for (int i = 0; i < n; ++i) {
                    prev = fam.rho * prev + scale * eps();
                    y[i] = prev;
                }
            } else if constexpr (std::is_same_v<T, LinearStationary>) {
                const int m = (static_cast<int>(fam.coeffs.size()) - 1) / 2;
                InnovationSampler sampler(fam.innovation, *seed);
                std::vector<double> eps(static_cast<std::size_t>(n + 2 * m));
                for (auto& e : eps) e = sampler();
                // f_n = sum_{j=-m}^{m} c_j eps_{j+n}; eps index shifted by +m
                for (int i = 0; i < n; ++i) {
                    double v = 0.0;
                    for (int j = -m; j <= m; ++j) v += fam.coeffs[static_cast<std::size_t>(j + m)] * eps[static_cast<std::size_t>(i + j + m)];
                    y[i] = v;
                }
            }
        },
        spec.variant());

    for (double v : y)
        if (!std::isfinite(v)) throw std::range_error("series contains non-finite values");
    return out;
}

// ---- JSON ----

std::string SeriesSpec::to_json() const {
    json j;
    std::visit(
        [&](const auto& fam) {
            using T = std::decay_t<decltype(fam)>;
            if constexpr (std::is_same_v<T, Constant>) {
                j["type"] = "constant";
            } else if constexpr (std::is_same_v<T, Saw>) {
                j["type"] = "saw";
            } else if constexpr (std::is_same_v<T, ExponentialSum>) {
                j["type"] = "exponential_sum";
                for (const auto& t : fam.terms) j["terms"].push_back({{"beta", t.beta}, {"a", t.a}});
            } else if constexpr (std::is_same_v<T, Polynomial>) {
                j["type"] = "polynomial";
                j["coeffs"] = fam.coeffs;
            } else if constexpr (std::is_same_v<T, Oscillating>) {
                j["type"] = "oscillating";
                for (const auto& t : fam.terms)
                    j["terms"].push_back({{"gamma", t.gamma}, {"omega", t.omega}, {"phi", t.phi}});
            } else if constexpr (std::is_same_v<T, LinearStationary>) {
                j["type"] = "linear_stationary";
                j["coeffs"] = fam.coeffs;
                j["innovation"] = innovation_name(fam.innovation);
            } else if constexpr (std::is_same_v<T, Ar1>) {
                j["type"] = "ar1";
                j["rho"] = fam.rho;
                j["innovation"] = innovation_name(fam.innovation);
            } else if constexpr (std::is_same_v<T, WhiteNoise>) {
                j["type"] = "white_noise";
                j["innovation"] = innovation_name(fam.innovation);
            }
        },
        v_);
    return j.dump();
}

SeriesSpec SeriesSpec::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed series spec json: ") + e.what());
    }
    try {
        const std::string type = j.at("type").get<std::string>();
        if (type == "constant") return SeriesSpec(Constant{});
        if (type == "saw") return SeriesSpec(Saw{});
        if (type == "exponential_sum") {
            ExponentialSum fam;
            for (const auto& t : j.at("terms")) fam.terms.push_back({t.at("beta").get<double>(), t.at("a").get<double>()});
            return SeriesSpec(fam);
        }
        if (type == "polynomial") {
            Polynomial fam;
            fam.coeffs = j.at("coeffs").get<std::vector<double>>();
            return SeriesSpec(fam);
        }
        if (type == "oscillating") {
            Oscillating fam;
            for (const auto& t : j.at("terms"))
                fam.terms.push_back({t.at("gamma").get<double>(), t.at("omega").get<double>(),
                                     t.value("phi", 0.0)});
            return SeriesSpec(fam);
        }
        if (type == "linear_stationary") {
            LinearStationary fam;
            fam.coeffs = j.at("coeffs").get<std::vector<double>>();
            fam.innovation = innovation_from_name(j.value("innovation", "normal"));
            return SeriesSpec(fam);
        }
        if (type == "ar1") {
            Ar1 fam;
            fam.rho = j.at("rho").get<double>();
            fam.innovation = innovation_from_name(j.value("innovation", "normal"));
            return SeriesSpec(fam);
        }
        if (type == "white_noise") {
            WhiteNoise fam;
            fam.innovation = innovation_from_name(j.value("innovation", "normal"));
            return SeriesSpec(fam);
        }
        throw std::invalid_argument("unknown series type '" + type + "'");
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("bad series spec fields: ") + e.what());
    }
}

SeriesSpec SeriesSpec::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

void Series::to_csv(const std::string& path) const {
    CsvTable t;
    t.header = {"index", "value"};
    t.rows.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        t.rows.push_back({static_cast<double>(i), values[i]});
    write_csv(path, t);
}

std::vector<double> Series::values_from_csv(const std::string& path) {
    CsvTable t = read_csv(path);
    if (t.header.size() < 2) throw std::invalid_argument("series csv needs index,value columns: " + path);
    std::vector<double> v;
    v.reserve(t.rows.size());
    for (const auto& row : t.rows) {
        if (row.size() < 2) throw std::invalid_argument("short row in series csv: " + path);
        v.push_back(row[1]);
    }
    if (v.empty()) throw std::invalid_argument("empty series csv: " + path);
    return v;
}

}  // namespace sigsub
