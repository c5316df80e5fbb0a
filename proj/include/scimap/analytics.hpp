#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "scimap/ingest.hpp"
#include "scimap/matrix.hpp"
#include "scimap/text.hpp"

namespace scimap {

// Inverse standard normal CDF: rational initial guess (Acklam) refined by
// one Halley step against std::erfc, accurate to ~1e-15 over (0, 1).
inline double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw Error("normal_quantile requires 0 < p < 1");

    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                               1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                               6.680131188771972e+01,  -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                               -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                               3.754408661907416e+00};

    const double p_low = 0.02425;
    double x;
    if (p < p_low) {
        double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        double q = p - 0.5;
        double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
    double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(x * x / 2.0);
    x = x - u / (1.0 + x * u / 2.0);
    return x;
}

/// One-sided upper quantile: value z with P(Z > z) = sigma.
inline double normal_quantile_upper(double sigma) { return -normal_quantile(sigma); }

struct ReliabilityParams {
    double p = 0.5;     // probability of correct assignment
    double m = 0.4;     // lower tolerance proportion
    double sigma = 0.05; // one-sided significance level

    void validate() const {
        if (!(p > 0.0 && p < 1.0)) throw Error("p must be in (0,1)");
        if (!(m > 0.0 && m < p)) throw Error("m must satisfy 0 < m < p");
        if (!(sigma > 0.0 && sigma < 0.5)) throw Error("sigma must be in (0, 0.5)");
    }
};

inline bool check_normal_approx(double n, double p) {
    return n >= 50.0 && n * p * (1.0 - p) >= 9.0;
}

struct ReliabilityResult {
    long long n = 0;          // rounded minimum sample size
    double unrounded = 0.0;   // (z/(p-m))^2 * p * (1-p)
    double z = 0.0;           // quantile actually used
    bool normal_approx_ok = false;
};

// Minimum sample size so that the true category keeps at least proportion m
// despite misassignment probability 1-p, at one-sided significance sigma.
// Rounds to nearest (ties up); `conservative` applies a ceiling instead.
inline ReliabilityResult min_sample_size(double p, double m, double sigma,
                                         bool conservative = false) {
    ReliabilityParams params{p, m, sigma};
    params.validate();
    ReliabilityResult r;
    r.z = normal_quantile_upper(sigma);
    double ratio = r.z / (p - m);
    r.unrounded = ratio * ratio * p * (1.0 - p);
    r.n = static_cast<long long>(conservative ? std::ceil(r.unrounded)
                                              : std::floor(r.unrounded + 0.5));
    r.normal_approx_ok = check_normal_approx(static_cast<double>(r.n), p);
    return r;
}

/// z = N(p - m) / sqrt(N p (1 - p)); N may be fractional.
inline double reliability_zscore(double n, double p, double m) {
    if (!(n >= 1.0)) throw Error("reliability_zscore requires N >= 1");
    if (!(p > 0.0 && p < 1.0)) throw Error("p must be in (0,1)");
    return n * (p - m) / std::sqrt(n * p * (1.0 - p));
}

enum class NormalizeMode { Raw, ByTotal, ByCategory };

// Raw passes through; ByTotal divides by the vector sum; ByCategory divides
// each count by the matching world count (size-of-category normalization,
// world vector supplied explicitly by the caller).
inline OverlayVector normalize_overlay(const OverlayVector& vec, NormalizeMode mode,
                                       const OverlayVector* world = nullptr) {
    if (mode == NormalizeMode::Raw) return vec;
    OverlayVector out = vec;
    if (mode == NormalizeMode::ByTotal) {
        double total = vec.sum();
        if (!(total > 0)) throw Error("normalize by_total requires a positive count sum");
        for (auto& c : out.counts) c /= total;
        return out;
    }
    if (world == nullptr) throw Error("normalize by_category requires a world vector");
    if (world->counts.size() != vec.counts.size())
        throw Error("world vector has " + std::to_string(world->counts.size()) +
                    " categories, overlay has " + std::to_string(vec.counts.size()));
    std::string offenders;
    for (std::size_t i = 0; i < vec.counts.size(); ++i) {
        if (vec.counts[i] > 0 && !(world->counts[i] > 0)) offenders += " " + std::to_string(i);
    }
    if (!offenders.empty())
        throw Error("normalize by_category: world count is zero for active categories:" + offenders);
    for (std::size_t i = 0; i < vec.counts.size(); ++i) {
        out.counts[i] = vec.counts[i] > 0 ? vec.counts[i] / world->counts[i] : 0.0;
    }
    return out;
}

struct GrowthVector {
    std::vector<std::optional<double>> growth; // per category; nullopt = undefined
    int year_min = 0;
    int year_max = 0;
};

// Average of year-over-year relative growth n_{t+1}/n_t - 1 over the pairs
// with a positive baseline. Categories with no valid pair stay undefined;
// zero baselines are never smoothed into a number.
inline GrowthVector growth_rates(const std::vector<OverlayVector>& series) {
    if (series.size() < 2) throw Error("growth needs at least two overlay vectors");
    const std::size_t s = series.front().counts.size();
    for (const auto& v : series) {
        if (!v.year) throw Error("growth: every overlay needs a year");
        if (v.counts.size() != s) throw Error("growth: overlay sizes differ");
    }
    for (std::size_t t = 1; t < series.size(); ++t) {
        if (*series[t].year <= *series[t - 1].year)
            throw Error("growth: years must be strictly increasing (got " +
                        std::to_string(*series[t - 1].year) + " then " +
                        std::to_string(*series[t].year) + ")");
    }
    GrowthVector out;
    out.year_min = *series.front().year;
    out.year_max = *series.back().year;
    out.growth.assign(s, std::nullopt);
    for (std::size_t i = 0; i < s; ++i) {
        double sum = 0.0;
        int valid = 0;
        for (std::size_t t = 0; t + 1 < series.size(); ++t) {
            double prev = series[t].counts[i];
            if (prev > 0) {
                sum += series[t + 1].counts[i] / prev - 1.0;
                ++valid;
            }
        }
        if (valid > 0) out.growth[i] = sum / valid;
    }
    return out;
}

struct DiversityReport {
    long long variety = 0;
    double balance = 0.0;
    double disparity = 0.0;
    double rao_stirling = 0.0;
};

// Variety, balance, disparity, and the combined Rao-Stirling index with
// distance d(i,j) = 1 - sim(i,j). Rao-Stirling sums over unordered pairs
// i < j; conventions in the literature differ by a factor of 2.
inline DiversityReport diversity(const OverlayVector& vec, const SimilarityMatrix& sim) {
    if (vec.counts.size() != static_cast<std::size_t>(sim.size()))
        throw Error("diversity: overlay has " + std::to_string(vec.counts.size()) +
                    " categories, similarity matrix has " + std::to_string(sim.size()));
    double total = vec.sum();
    if (!(total > 0)) throw Error("diversity: overlay has no documents");

    std::vector<int> active;
    for (std::size_t i = 0; i < vec.counts.size(); ++i)
        if (vec.counts[i] > 0) active.push_back(static_cast<int>(i));

    DiversityReport rep;
    rep.variety = static_cast<long long>(active.size());

    // Balance = normalized Shannon entropy. A uniform distribution (and the
    // single-category case) is exactly 1 by definition, so short-circuit it
    // instead of relying on log arithmetic to cancel.
    bool uniform = true;
    for (int i : active)
        if (vec.counts[static_cast<std::size_t>(i)] != vec.counts[static_cast<std::size_t>(active[0])]) {
            uniform = false;
            break;
        }
    if (uniform) {
        rep.balance = 1.0;
    } else {
        double h = 0.0;
        for (int i : active) {
            double p = vec.counts[static_cast<std::size_t>(i)] / total;
            h -= p * std::log(p);
        }
        rep.balance = std::clamp(h / std::log(static_cast<double>(active.size())), 0.0, 1.0);
    }

    if (active.size() >= 2) {
        double dsum = 0.0, rs = 0.0;
        for (std::size_t ai = 0; ai < active.size(); ++ai) {
            for (std::size_t aj = ai + 1; aj < active.size(); ++aj) {
                int i = active[ai], j = active[aj];
                double d = 1.0 - sim.at(i, j);
                dsum += d;
                double pi = vec.counts[static_cast<std::size_t>(i)] / total;
                double pj = vec.counts[static_cast<std::size_t>(j)] / total;
                rs += pi * pj * d;
            }
        }
        double pairs = static_cast<double>(active.size()) * (static_cast<double>(active.size()) - 1.0) / 2.0;
        rep.disparity = dsum / pairs;
        rep.rao_stirling = rs;
    }
    return rep;
}

} // namespace scimap
