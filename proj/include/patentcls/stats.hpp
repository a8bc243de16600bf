#ifndef PATENTCLS_STATS_HPP
#define PATENTCLS_STATS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "patentcls/error.hpp"
#include "patentcls/metrics.hpp"

namespace patentcls::stats {

// ---------------------------------------------------------------------------
// RNG: splitmix64 (64-bit state, single stream). Resample indices are drawn
// sequentially as next() % n. Named in every stats artifact header for
// cross-language reproducibility.
// ---------------------------------------------------------------------------

inline constexpr const char* kRngName = "splitmix64 (index = next() % n)";

struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
    std::size_t bounded(std::size_t n) { return static_cast<std::size_t>(next() % n); }
};

// ---------------------------------------------------------------------------
// Frequency stratification into rare / medium / frequent bands.
// ---------------------------------------------------------------------------

enum class Band { Rare, Medium, Frequent };

inline std::string band_name(Band b) {
    switch (b) {
        case Band::Rare: return "rare";
        case Band::Medium: return "medium";
        case Band::Frequent: return "frequent";
    }
    return "?";
}

struct StratifiedLabels {
    std::map<std::string, std::size_t> supports;
    std::map<std::string, Band> bands;
    double lower_threshold = 0.0;  // Rare: support <= lower_threshold
    double upper_threshold = 0.0;  // Frequent: support >= upper_threshold
    double lower_fraction = 0.2;
    double upper_fraction = 0.8;
};

// Thresholds are nearest-rank cut points on the sorted support multiset:
// the lower threshold is the largest support among the bottom ceil(lower*n)
// values, the upper threshold the smallest support among the top
// ceil((1-upper)*n) values. Frequent is checked before Rare, so a degenerate
// distribution lands every label in Frequent.
inline StratifiedLabels stratify(const std::map<std::string, std::size_t>& supports,
                                 double lower = 0.2, double upper = 0.8) {
    if (supports.empty()) throw ConfigError("stratify: no labels");
    if (!(lower >= 0.0 && lower < upper && upper <= 1.0))
        throw ConfigError("stratify: need 0 <= lower < upper <= 1");
    StratifiedLabels out;
    out.supports = supports;
    out.lower_fraction = lower;
    out.upper_fraction = upper;

    std::vector<std::size_t> sorted;
    for (const auto& [_, s] : supports) sorted.push_back(s);
    std::sort(sorted.begin(), sorted.end());
    std::size_t n = sorted.size();
    auto cut = [&](double frac) {
        auto k = static_cast<std::size_t>(std::ceil(frac * static_cast<double>(n)));
        return std::min(std::max<std::size_t>(k, 1), n);
    };
    out.lower_threshold = static_cast<double>(sorted[cut(lower) - 1]);
    out.upper_threshold = static_cast<double>(sorted[n - cut(1.0 - upper)]);

    for (const auto& [label, s] : supports) {
        if (static_cast<double>(s) >= out.upper_threshold)
            out.bands[label] = Band::Frequent;
        else if (static_cast<double>(s) <= out.lower_threshold)
            out.bands[label] = Band::Rare;
        else
            out.bands[label] = Band::Medium;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Label-resampled bootstrap confidence intervals.
// ---------------------------------------------------------------------------

enum class BootstrapMetric { MicroF1, MacroF1 };

struct BootstrapResult {
    std::string metric_name;
    double point_estimate = 0.0;
    double ci_lower = 0.0;
    double ci_upper = 0.0;
    std::size_t resamples = 0;
    std::uint64_t seed = 0;
};

namespace detail {

// empirical quantile with linear interpolation on the sorted sample
inline double quantile(const std::vector<double>& sorted, double q) {
    if (sorted.size() == 1) return sorted.front();
    double pos = q * static_cast<double>(sorted.size() - 1);
    auto lo = static_cast<std::size_t>(std::floor(pos));
    auto hi = std::min(lo + 1, sorted.size() - 1);
    double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

}  // namespace detail

// CPC subclasses (table rows) are resampled with replacement. Micro: a label
// drawn k times contributes its counts k times. Macro: the resample averages
// the drawn per-label F1 values. The resample plan is drawn sequentially from
// one seeded stream, so results are independent of worker count.
inline BootstrapResult bootstrap_ci(const metrics::LabelConfusionTable& table,
                                    BootstrapMetric metric, std::size_t B = 1000,
                                    std::uint64_t seed = 0,
                                    std::pair<double, double> levels = {0.025, 0.975}) {
    if (table.labels.empty()) throw ConfigError("bootstrap_ci: empty table");
    if (B == 0) throw ConfigError("bootstrap_ci: B must be >= 1");

    std::vector<metrics::LabelCounts> rows;
    std::vector<double> f1s;
    for (const auto& [_, c] : table.labels) {
        rows.push_back(c);
        f1s.push_back(metrics::prf_from_counts(c.tp, c.fp, c.fn).f1);
    }
    std::size_t n = rows.size();

    BootstrapResult result;
    result.metric_name = metric == BootstrapMetric::MicroF1 ? "micro_f1" : "macro_f1";
    result.resamples = B;
    result.seed = seed;
    if (metric == BootstrapMetric::MicroF1) {
        result.point_estimate = metrics::micro(table).f1;
    } else {
        double sum = 0.0;
        for (double f : f1s) sum += f;
        result.point_estimate = sum / static_cast<double>(n);
    }

    SplitMix64 rng(seed);
    std::vector<double> samples;
    samples.reserve(B);
    for (std::size_t b = 0; b < B; ++b) {
        if (metric == BootstrapMetric::MicroF1) {
            std::size_t tp = 0, fp = 0, fn = 0;
            for (std::size_t i = 0; i < n; ++i) {
                const auto& c = rows[rng.bounded(n)];
                tp += c.tp;
                fp += c.fp;
                fn += c.fn;
            }
            samples.push_back(metrics::prf_from_counts(tp, fp, fn).f1);
        } else {
            double sum = 0.0;
            for (std::size_t i = 0; i < n; ++i) sum += f1s[rng.bounded(n)];
            samples.push_back(sum / static_cast<double>(n));
        }
    }
    std::sort(samples.begin(), samples.end());
    result.ci_lower = detail::quantile(samples, levels.first);
    result.ci_upper = detail::quantile(samples, levels.second);
    return result;
}

// ---------------------------------------------------------------------------
// Paired Wilcoxon signed-rank test over per-label scores.
// ---------------------------------------------------------------------------

enum class Alternative { Greater, Less, TwoSided };
enum class WilcoxonMethod { Exact, NormalApprox };
enum class ZeroMethod { Discard, Pratt };

struct PairedTestResult {
    std::size_t n_pairs = 0;        // nonzero differences used
    std::size_t zeros_dropped = 0;  // Discard: excluded; Pratt: kept in ranking
    double w_statistic = 0.0;       // sum of ranks of positive differences
    double p_value = 1.0;
    Alternative alternative = Alternative::TwoSided;
    WilcoxonMethod method = WilcoxonMethod::NormalApprox;
    ZeroMethod zero_method = ZeroMethod::Discard;
};

namespace detail {

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Exact distribution of W+ over all 2^n sign assignments of integer ranks
// 1..n (valid only without ties). Returns P(W >= w) and P(W <= w).
inline std::pair<double, double> exact_tails(std::size_t n, double w_obs) {
    std::size_t max_sum = n * (n + 1) / 2;
    std::vector<double> counts(max_sum + 1, 0.0);
    counts[0] = 1.0;
    for (std::size_t r = 1; r <= n; ++r)
        for (std::size_t s = max_sum + 1; s-- > r;) counts[s] += counts[s - r];
    double total = std::pow(2.0, static_cast<double>(n));
    double ge = 0.0, le = 0.0;
    for (std::size_t s = 0; s <= max_sum; ++s) {
        if (static_cast<double>(s) >= w_obs) ge += counts[s];
        if (static_cast<double>(s) <= w_obs) le += counts[s];
    }
    return {ge / total, le / total};
}

// average ranks of |values|, with tie information
struct Ranked {
    std::vector<double> ranks;
    double tie_correction = 0.0;  // sum over tie groups of (t^3 - t)
    bool has_ties = false;
};

inline Ranked rank_abs(const std::vector<double>& values) {
    std::vector<std::size_t> order(values.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::fabs(values[a]) < std::fabs(values[b]);
    });
    Ranked out;
    out.ranks.resize(values.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() &&
               std::fabs(values[order[j + 1]]) == std::fabs(values[order[i]]))
            ++j;
        double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        std::size_t t = j - i + 1;
        if (t > 1) {
            out.has_ties = true;
            out.tie_correction += static_cast<double>(t * t * t - t);
        }
        for (std::size_t k = i; k <= j; ++k) out.ranks[order[k]] = avg_rank;
        i = j + 1;
    }
    return out;
}

}  // namespace detail

inline PairedTestResult wilcoxon(const std::vector<double>& scores_a,
                                 const std::vector<double>& scores_b,
                                 Alternative alternative,
                                 ZeroMethod zero_method = ZeroMethod::Discard) {
    if (scores_a.size() != scores_b.size() || scores_a.empty())
        throw ConfigError("wilcoxon: inputs must be non-empty and aligned");

    std::vector<double> diffs;
    std::size_t zeros = 0;
    for (std::size_t i = 0; i < scores_a.size(); ++i) {
        double d = scores_a[i] - scores_b[i];
        if (d == 0.0) {
            ++zeros;
            if (zero_method == ZeroMethod::Pratt) diffs.push_back(0.0);
        } else {
            diffs.push_back(d);
        }
    }
    std::size_t n_nonzero = diffs.size() - (zero_method == ZeroMethod::Pratt ? zeros : 0);
    if (n_nonzero == 0) throw AllZeroDifferences("wilcoxon: all differences are zero");

    auto ranked = detail::rank_abs(diffs);

    PairedTestResult result;
    result.alternative = alternative;
    result.zero_method = zero_method;
    result.n_pairs = n_nonzero;
    result.zeros_dropped = zeros;

    double w = 0.0;
    for (std::size_t i = 0; i < diffs.size(); ++i)
        if (diffs[i] > 0.0) w += ranked.ranks[i];
    result.w_statistic = w;

    bool exact_ok = zero_method == ZeroMethod::Discard && n_nonzero <= 25 && !ranked.has_ties;
    if (exact_ok) {
        result.method = WilcoxonMethod::Exact;
        auto [p_ge, p_le] = detail::exact_tails(n_nonzero, w);
        switch (alternative) {
            case Alternative::Greater: result.p_value = p_ge; break;
            case Alternative::Less: result.p_value = p_le; break;
            case Alternative::TwoSided: result.p_value = std::min(1.0, 2.0 * std::min(p_ge, p_le)); break;
        }
    } else {
        result.method = WilcoxonMethod::NormalApprox;
        double n_all = static_cast<double>(diffs.size());
        double mean, var;
        if (zero_method == ZeroMethod::Pratt) {
            double z0 = static_cast<double>(zeros);
            mean = (n_all * (n_all + 1.0) - z0 * (z0 + 1.0)) / 4.0;
            var = (n_all * (n_all + 1.0) * (2.0 * n_all + 1.0) -
                   z0 * (z0 + 1.0) * (2.0 * z0 + 1.0)) / 24.0 -
                  ranked.tie_correction / 48.0;
        } else {
            mean = n_all * (n_all + 1.0) / 4.0;
            var = n_all * (n_all + 1.0) * (2.0 * n_all + 1.0) / 24.0 -
                  ranked.tie_correction / 48.0;
        }
        if (var <= 0.0) throw AllZeroDifferences("wilcoxon: zero variance");
        double sd = std::sqrt(var);
        switch (alternative) {
            case Alternative::Greater:
                result.p_value = 1.0 - detail::normal_cdf((w - mean - 0.5) / sd);
                break;
            case Alternative::Less:
                result.p_value = detail::normal_cdf((w - mean + 0.5) / sd);
                break;
            case Alternative::TwoSided: {
                double z = (std::fabs(w - mean) - 0.5) / sd;
                result.p_value = std::min(1.0, 2.0 * (1.0 - detail::normal_cdf(z)));
                break;
            }
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// Delta-F1-vs-frequency series.
// ---------------------------------------------------------------------------

struct DeltaPoint {
    std::string label;
    std::size_t support = 0;
    double delta = 0.0;  // F1_a - F1_b
};

struct DeltaSeries {
    std::vector<DeltaPoint> points;        // ascending support, ties lexicographic
    std::vector<double> rolling_mean;      // windowed over `points`
    std::size_t window = 0;                // max(5, ceil(0.05 * label count))
};

inline DeltaSeries delta_series(const std::map<std::string, double>& per_label_a,
                                const std::map<std::string, double>& per_label_b,
                                const std::map<std::string, std::size_t>& supports) {
    if (per_label_a.size() != per_label_b.size())
        throw ConfigError("delta_series: label sets must align");
    DeltaSeries out;
    for (const auto& [label, fa] : per_label_a) {
        auto itb = per_label_b.find(label);
        if (itb == per_label_b.end())
            throw ConfigError("delta_series: label " + label + " missing from b");
        auto its = supports.find(label);
        std::size_t sup = its == supports.end() ? 0 : its->second;
        out.points.push_back({label, sup, fa - itb->second});
    }
    std::sort(out.points.begin(), out.points.end(), [](const DeltaPoint& a, const DeltaPoint& b) {
        if (a.support != b.support) return a.support < b.support;
        return a.label < b.label;
    });

    std::size_t n = out.points.size();
    out.window = std::max<std::size_t>(
        5, static_cast<std::size_t>(std::ceil(0.05 * static_cast<double>(n))));
    std::size_t w = std::min(out.window, n);
    for (std::size_t i = 0; i + w <= n; ++i) {
        double sum = 0.0;
        for (std::size_t k = i; k < i + w; ++k) sum += out.points[k].delta;
        out.rolling_mean.push_back(sum / static_cast<double>(w));
    }
    return out;
}

}  // namespace patentcls::stats

#endif
