#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

#include "bloq/errors.hpp"

namespace bloq::stats {

struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;

    std::size_t total() const { return tp + fp + tn + fn; }
    ConfusionCounts& operator+=(const ConfusionCounts& o) {
        tp += o.tp;
        fp += o.fp;
        tn += o.tn;
        fn += o.fn;
        return *this;
    }
    friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

/// 2tp / (2tp + fp + fn), or 0 when nothing was predicted or present.
inline double f1(const ConfusionCounts& c) {
    const double den = 2.0 * static_cast<double>(c.tp) + static_cast<double>(c.fp) + static_cast<double>(c.fn);
    return den == 0.0 ? 0.0 : 2.0 * static_cast<double>(c.tp) / den;
}

/// Mean computed relative to the first element, so constant inputs return
/// that constant exactly.
inline double mean(const std::vector<double>& v) {
    if (v.empty()) throw ValidationError("mean of an empty sample");
    const double base = v.front();
    double acc = 0.0;
    for (double x : v) acc += x - base;
    return base + acc / static_cast<double>(v.size());
}

/// Quantile with linear interpolation between order statistics
/// (position p * (n - 1) in the sorted sample).
inline double quantile_sorted(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) throw ValidationError("quantile of an empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("quantile level must lie in [0, 1]");
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    if (frac == 0.0) return sorted[lo];
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

inline double quantile(std::vector<double> v, double p) {
    std::sort(v.begin(), v.end());
    return quantile_sorted(v, p);
}

struct Summary {
    std::size_t count = 0;
    double mean = 0.0;
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
    double iqr = 0.0;
};

inline Summary summarize(std::vector<double> v) {
    if (v.empty()) throw ValidationError("summary of an empty sample");
    Summary s;
    s.count = v.size();
    s.mean = mean(v);
    std::sort(v.begin(), v.end());
    s.median = quantile_sorted(v, 0.5);
    s.q1 = quantile_sorted(v, 0.25);
    s.q3 = quantile_sorted(v, 0.75);
    s.iqr = s.q3 - s.q1;
    return s;
}

// ---------------------------------------------------------------------------
// Mann-Whitney U

struct MannWhitney {
    double u = 0.0;  // U statistic of the first sample
    double p = 1.0;  // two-sided
    bool exact = false;
};

namespace detail {

/// Midranks (1-based) of the pooled sample and the tie-group sizes.
inline std::pair<std::vector<double>, std::vector<std::size_t>> midranks(const std::vector<double>& pooled) {
    std::vector<std::size_t> order(pooled.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pooled[a] < pooled[b]; });
    std::vector<double> ranks(pooled.size());
    std::vector<std::size_t> ties;
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && pooled[order[j + 1]] == pooled[order[i]]) ++j;
        const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t m = i; m <= j; ++m) ranks[order[m]] = r;
        ties.push_back(j - i + 1);
        i = j + 1;
    }
    return {ranks, ties};
}

}  // namespace detail

inline constexpr std::size_t kExactLimit = 20;

/// Two-sided Mann-Whitney U test. Pools of at most 20 observations use the
/// exact permutation distribution of the (mid)rank sum; larger pools use the
/// normal approximation with tie and continuity corrections.
inline MannWhitney mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) throw ValidationError("Mann-Whitney U needs two non-empty samples");
    const std::size_t na = a.size();
    const std::size_t nb = b.size();
    const std::size_t N = na + nb;
    std::vector<double> pooled(a);
    pooled.insert(pooled.end(), b.begin(), b.end());
    const auto [ranks, ties] = detail::midranks(pooled);
    double ra = 0.0;
    for (std::size_t i = 0; i < na; ++i) ra += ranks[i];
    MannWhitney out;
    out.u = ra - static_cast<double>(na) * (static_cast<double>(na) + 1.0) / 2.0;
    const double mu = static_cast<double>(na) * static_cast<double>(nb) / 2.0;
    const double dev = std::abs(out.u - mu);

    if (N <= kExactLimit) {
        // Doubled midranks are integers; count size-na subsets by doubled sum.
        std::vector<std::size_t> r2(N);
        std::size_t total2 = 0;
        for (std::size_t i = 0; i < N; ++i) {
            r2[i] = static_cast<std::size_t>(std::lround(2.0 * ranks[i]));
            total2 += r2[i];
        }
        std::vector<std::vector<double>> ways(na + 1, std::vector<double>(total2 + 1, 0.0));
        ways[0][0] = 1.0;
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = std::min(i + 1, na); j >= 1; --j)
                for (std::size_t s = total2; s >= r2[i]; --s) {
                    ways[j][s] += ways[j - 1][s - r2[i]];
                    if (s == r2[i]) break;
                }
        double all = 0.0;
        double extreme = 0.0;
        const double offset = static_cast<double>(na) * (static_cast<double>(na) + 1.0) / 2.0;
        for (std::size_t s = 0; s <= total2; ++s) {
            if (ways[na][s] == 0.0) continue;
            all += ways[na][s];
            const double u = static_cast<double>(s) / 2.0 - offset;
            if (std::abs(u - mu) >= dev - 1e-9) extreme += ways[na][s];
        }
        out.p = std::min(1.0, extreme / all);
        out.exact = true;
        return out;
    }

    double tie_term = 0.0;
    for (std::size_t t : ties) {
        const double td = static_cast<double>(t);
        tie_term += td * td * td - td;
    }
    const double Nd = static_cast<double>(N);
    const double var = static_cast<double>(na) * static_cast<double>(nb) / 12.0 *
                       ((Nd + 1.0) - tie_term / (Nd * (Nd - 1.0)));
    if (var <= 0.0) {
        out.p = 1.0;
        return out;
    }
    const double z = (dev - 0.5) / std::sqrt(var);
    out.p = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
    return out;
}

// ---------------------------------------------------------------------------
// Vargha-Delaney A12

enum class Magnitude { N, S, M, L };

inline std::string_view to_string(Magnitude m) {
    switch (m) {
        case Magnitude::N: return "N";
        case Magnitude::S: return "S";
        case Magnitude::M: return "M";
        case Magnitude::L: return "L";
    }
    return "?";
}

/// Bins of |2(A12 - 0.5)|: N below 0.147, S up to 0.33 inclusive, M below
/// 0.474, L from 0.474.
inline Magnitude magnitude_of_scaled(double scaled) {
    const double s = std::abs(scaled);
    if (s < 0.147) return Magnitude::N;
    if (s <= 0.33) return Magnitude::S;
    if (s < 0.474) return Magnitude::M;
    return Magnitude::L;
}

struct EffectSize {
    double a12 = 0.5;
    double scaled = 0.0;
    Magnitude magnitude = Magnitude::N;
};

inline EffectSize vargha_delaney(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) throw ValidationError("A12 needs two non-empty samples");
    // Count greater/equal pairs by merging sorted copies.
    std::vector<double> sb(b);
    std::sort(sb.begin(), sb.end());
    double wins = 0.0;
    for (double x : a) {
        const auto lo = std::lower_bound(sb.begin(), sb.end(), x);
        const auto hi = std::upper_bound(lo, sb.end(), x);
        wins += static_cast<double>(lo - sb.begin()) + 0.5 * static_cast<double>(hi - lo);
    }
    const double pairs = static_cast<double>(a.size()) * static_cast<double>(b.size());
    EffectSize e;
    e.a12 = wins / pairs;
    // from the exact half-integer win count, so swapping a and b negates it exactly
    e.scaled = (2.0 * wins - pairs) / pairs;
    e.magnitude = magnitude_of_scaled(e.scaled);
    return e;
}

// ---------------------------------------------------------------------------
// Bootstrap

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double half_width() const { return (hi - lo) / 2.0; }
};

/// Percentile bootstrap interval of the mean.
inline Interval bootstrap_ci(const std::vector<double>& values, double level = 0.99, std::size_t resamples = 10000,
                             std::uint64_t seed = 0) {
    if (values.empty()) throw ValidationError("bootstrap of an empty sample");
    if (!(level > 0.0 && level < 1.0)) throw ValidationError("confidence level must lie in (0, 1)");
    if (resamples == 0) throw ValidationError("bootstrap needs at least one resample");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, values.size() - 1);
    std::vector<double> means(resamples);
    std::vector<double> draw(values.size());
    for (auto& m : means) {
        for (auto& d : draw) d = values[pick(rng)];
        m = mean(draw);
    }
    std::sort(means.begin(), means.end());
    const double alpha = (1.0 - level) / 2.0;
    return {quantile_sorted(means, alpha), quantile_sorted(means, 1.0 - alpha)};
}

/// MWU plus effect size; significant only when p <= 0.05 and the magnitude is
/// above negligible.
struct Comparison {
    MannWhitney mwu;
    EffectSize effect;
    bool significant = false;
};

inline Comparison compare(const std::vector<double>& a, const std::vector<double>& b) {
    Comparison c;
    c.mwu = mann_whitney_u(a, b);
    c.effect = vargha_delaney(a, b);
    c.significant = c.mwu.p <= 0.05 && c.effect.magnitude != Magnitude::N;
    return c;
}

}  // namespace bloq::stats
