#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "patentcls/stats.hpp"

using namespace patentcls;
using namespace patentcls::stats;

namespace {

std::map<std::string, std::size_t> supports_1_to_n(std::size_t n) {
    std::map<std::string, std::size_t> out;
    for (std::size_t i = 1; i <= n; ++i) {
        char buf[8];
        std::snprintf(buf, sizeof buf, "L%02zu", i);
        out[buf] = i;
    }
    return out;
}

// Brute-force exact Wilcoxon: enumerate all 2^n sign assignments of the rank
// vector and count how many reach at least / at most the observed W.
double brute_exact_p(const std::vector<double>& diffs, Alternative alt) {
    // discard zeros, rank |d| (assumes no ties among nonzero |d|)
    std::vector<double> d;
    for (double x : diffs)
        if (x != 0.0) d.push_back(x);
    std::size_t n = d.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return std::fabs(d[a]) < std::fabs(d[b]); });
    std::vector<double> rank(n);
    for (std::size_t i = 0; i < n; ++i) rank[order[i]] = static_cast<double>(i + 1);
    double w_obs = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        if (d[i] > 0.0) w_obs += rank[i];

    std::size_t ge = 0, le = 0, total = std::size_t{1} << n;
    for (std::size_t bits = 0; bits < total; ++bits) {
        double w = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (bits & (std::size_t{1} << i)) w += rank[i];
        if (w >= w_obs) ++ge;
        if (w <= w_obs) ++le;
    }
    double p_ge = static_cast<double>(ge) / static_cast<double>(total);
    double p_le = static_cast<double>(le) / static_cast<double>(total);
    switch (alt) {
        case Alternative::Greater: return p_ge;
        case Alternative::Less: return p_le;
        case Alternative::TwoSided: return std::min(1.0, 2.0 * std::min(p_ge, p_le));
    }
    return 1.0;
}

metrics::LabelConfusionTable toy_table(std::vector<std::array<std::size_t, 3>> tpfpfn) {
    metrics::LabelConfusionTable t;
    std::size_t i = 0;
    for (const auto& [tp, fp, fn] : tpfpfn) {
        metrics::LabelCounts c;
        c.tp = tp;
        c.fp = fp;
        c.fn = fn;
        c.support = tp + fn;
        c.pred_pos = tp + fp;
        t.labels["L" + std::to_string(i++)] = c;
    }
    t.document_count = 100;
    return t;
}

}  // namespace

TEST_CASE("splitmix64 reference stream") {
    // first outputs for seed 0 (published splitmix64 reference values)
    SplitMix64 rng(0);
    CHECK(rng.next() == 0xE220A8397B1DCDAFULL);
    CHECK(rng.next() == 0x6E789E6AA1B965F4ULL);
    CHECK(rng.next() == 0x06C45D188009454FULL);
    // same seed, same stream
    SplitMix64 a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
}

TEST_CASE("stratify: supports 1..10 split at the 20/80 percentiles") {
    auto s = stratify(supports_1_to_n(10));
    CHECK(s.lower_threshold == 2.0);
    CHECK(s.upper_threshold == 9.0);
    std::map<Band, std::set<std::size_t>> by_band;
    for (const auto& [label, band] : s.bands) by_band[band].insert(s.supports.at(label));
    CHECK(by_band[Band::Rare] == std::set<std::size_t>{1, 2});
    CHECK(by_band[Band::Frequent] == std::set<std::size_t>{9, 10});
    CHECK(by_band[Band::Medium] == std::set<std::size_t>{3, 4, 5, 6, 7, 8});
}

TEST_CASE("stratify degenerate distributions") {
    // all equal: both threshold conditions hold; Frequent wins by precedence
    std::map<std::string, std::size_t> equal{{"A", 5}, {"B", 5}, {"C", 5}};
    auto s = stratify(equal);
    for (const auto& [_, band] : s.bands) CHECK(band == Band::Frequent);
    // single label
    auto one = stratify({{"A", 3}});
    CHECK(one.bands.at("A") == Band::Frequent);
}

TEST_CASE("stratify monotone in support and validates config") {
    std::mt19937 rng(5);
    std::map<std::string, std::size_t> supports;
    for (int i = 0; i < 40; ++i)
        supports["L" + std::to_string(i)] = std::uniform_int_distribution<std::size_t>(1, 50)(rng);
    auto s = stratify(supports);
    auto ord = [](Band b) { return b == Band::Rare ? 0 : b == Band::Medium ? 1 : 2; };
    for (const auto& [x, bx] : s.bands)
        for (const auto& [y, by] : s.bands)
            if (supports.at(x) <= supports.at(y)) CHECK(ord(bx) <= ord(by));
    CHECK_THROWS_AS(stratify({}), ConfigError);
    CHECK_THROWS_AS(stratify(supports, 0.8, 0.2), ConfigError);
    CHECK_THROWS_AS(stratify(supports, 0.5, 0.5), ConfigError);
}

TEST_CASE("bootstrap_ci: constant table gives a zero-width interval") {
    auto t = toy_table({{5, 2, 3}, {5, 2, 3}, {5, 2, 3}});
    for (auto metric : {BootstrapMetric::MicroF1, BootstrapMetric::MacroF1}) {
        auto r = bootstrap_ci(t, metric, 200, 7);
        CHECK(r.ci_lower == Catch::Approx(r.point_estimate));
        CHECK(r.ci_upper == Catch::Approx(r.point_estimate));
    }
}

TEST_CASE("bootstrap_ci matches a hand-rolled resampler, bit for bit") {
    auto t = toy_table({{5, 2, 3}, {1, 4, 2}, {9, 0, 1}});
    const std::size_t B = 10;
    const std::uint64_t seed = 1234;

    // independent reference: replay the documented generator and resampling
    std::vector<metrics::LabelCounts> rows;
    for (const auto& [_, c] : t.labels) rows.push_back(c);
    for (auto metric : {BootstrapMetric::MicroF1, BootstrapMetric::MacroF1}) {
        SplitMix64 rng(seed);
        std::vector<double> samples;
        for (std::size_t b = 0; b < B; ++b) {
            std::size_t tp = 0, fp = 0, fn = 0;
            double f1sum = 0.0;
            for (std::size_t i = 0; i < rows.size(); ++i) {
                const auto& c = rows[rng.next() % rows.size()];
                tp += c.tp;
                fp += c.fp;
                fn += c.fn;
                f1sum += metrics::prf_from_counts(c.tp, c.fp, c.fn).f1;
            }
            samples.push_back(metric == BootstrapMetric::MicroF1
                                  ? metrics::prf_from_counts(tp, fp, fn).f1
                                  : f1sum / static_cast<double>(rows.size()));
        }
        std::sort(samples.begin(), samples.end());
        auto interp = [&](double q) {
            double pos = q * static_cast<double>(samples.size() - 1);
            std::size_t lo = static_cast<std::size_t>(std::floor(pos));
            std::size_t hi = std::min(lo + 1, samples.size() - 1);
            return samples[lo] * (1.0 - (pos - lo)) + samples[hi] * (pos - lo);
        };

        auto r = bootstrap_ci(t, metric, B, seed);
        CHECK(r.ci_lower == interp(0.025));
        CHECK(r.ci_upper == interp(0.975));
        CHECK(r.resamples == B);
        CHECK(r.seed == seed);
    }
}

TEST_CASE("bootstrap_ci is reproducible and bounds are ordered") {
    auto t = toy_table({{5, 2, 3}, {1, 4, 2}, {9, 0, 1}, {0, 3, 4}, {2, 2, 2}});
    auto r1 = bootstrap_ci(t, BootstrapMetric::MicroF1, 500, 99);
    auto r2 = bootstrap_ci(t, BootstrapMetric::MicroF1, 500, 99);
    CHECK(r1.ci_lower == r2.ci_lower);
    CHECK(r1.ci_upper == r2.ci_upper);
    CHECK(r1.ci_lower <= r1.ci_upper);
    CHECK(r1.point_estimate == Catch::Approx(metrics::micro(t).f1));
    auto r3 = bootstrap_ci(t, BootstrapMetric::MicroF1, 500, 100);
    CHECK((r3.ci_lower != r1.ci_lower || r3.ci_upper != r1.ci_upper));
}

TEST_CASE("wilcoxon hand examples") {
    // d = (1,2,3,4,5): all positive, Greater -> only the all-positive
    // assignment reaches W = 15, p = 1/32
    std::vector<double> b(5, 0.0);
    auto r = wilcoxon({1, 2, 3, 4, 5}, b, Alternative::Greater);
    CHECK(r.method == WilcoxonMethod::Exact);
    CHECK(r.w_statistic == 15.0);
    CHECK(r.p_value == Catch::Approx(1.0 / 32.0));

    // d = (-1,-2,-3): Greater -> every assignment has W >= 0, p = 1
    auto neg = wilcoxon({0, 0, 0}, {1, 2, 3}, Alternative::Greater);
    CHECK(neg.w_statistic == 0.0);
    CHECK(neg.p_value == Catch::Approx(1.0));

    // identical inputs
    CHECK_THROWS_AS(wilcoxon({1, 2}, {1, 2}, Alternative::Greater), AllZeroDifferences);
    CHECK_THROWS_AS(wilcoxon({}, {}, Alternative::Greater), ConfigError);
    CHECK_THROWS_AS(wilcoxon({1, 2}, {1}, Alternative::Greater), ConfigError);
}

TEST_CASE("wilcoxon exact p matches brute-force enumeration for n <= 12") {
    std::mt19937 rng(20240820);
    std::uniform_int_distribution<int> n_dist(1, 12);
    std::uniform_real_distribution<double> mag(0.01, 1.0);
    std::uniform_int_distribution<int> coin(0, 1);
    for (int trial = 0; trial < 200; ++trial) {
        int n = n_dist(rng);
        std::vector<double> a, b, diffs;
        std::set<double> used;
        for (int i = 0; i < n; ++i) {
            double m;
            do {
                m = mag(rng);
            } while (!used.insert(m).second);  // distinct magnitudes: no ties
            double d = coin(rng) ? m : -m;
            a.push_back(d);
            b.push_back(0.0);
            diffs.push_back(d);
        }
        for (auto alt : {Alternative::Greater, Alternative::Less, Alternative::TwoSided}) {
            auto r = wilcoxon(a, b, alt);
            REQUIRE(r.method == WilcoxonMethod::Exact);
            INFO("trial " << trial << " n " << n);
            CHECK(r.p_value == Catch::Approx(brute_exact_p(diffs, alt)).epsilon(1e-12));
        }
    }
}

TEST_CASE("wilcoxon: zeros are dropped and counted under Discard") {
    auto r = wilcoxon({1, 2, 0.5, 3}, {1, 2, 0.25, 1}, Alternative::Greater);
    CHECK(r.zeros_dropped == 2);
    CHECK(r.n_pairs == 2);
    // remaining d = (0.25, 2): both positive, p = 1/4
    CHECK(r.p_value == Catch::Approx(0.25));
}

TEST_CASE("wilcoxon symmetry: (a,b,Greater) == (b,a,Less)") {
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> val(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::size_t n = 3 + trial * 2;  // crosses the exact/approx boundary
        std::vector<double> a, b;
        for (std::size_t i = 0; i < n; ++i) {
            a.push_back(val(rng));
            b.push_back(val(rng));
        }
        auto g = wilcoxon(a, b, Alternative::Greater);
        auto l = wilcoxon(b, a, Alternative::Less);
        CHECK(g.p_value == Catch::Approx(l.p_value).epsilon(1e-12));
        auto t1 = wilcoxon(a, b, Alternative::TwoSided);
        auto t2 = wilcoxon(b, a, Alternative::TwoSided);
        CHECK(t1.p_value == Catch::Approx(t2.p_value).epsilon(1e-12));
    }
}

TEST_CASE("wilcoxon switches to the normal approximation on ties or n > 25") {
    // tied |d| forces the approximation even for small n
    auto tied = wilcoxon({1, 1, 2, 2}, {0, 0, 0, 0}, Alternative::Greater);
    CHECK(tied.method == WilcoxonMethod::NormalApprox);
    CHECK(tied.p_value > 0.0);
    CHECK(tied.p_value < 1.0);

    std::vector<double> a, b;
    for (int i = 1; i <= 30; ++i) {
        a.push_back(i * 0.01);
        b.push_back(0.0);
    }
    auto big = wilcoxon(a, b, Alternative::Greater);
    CHECK(big.method == WilcoxonMethod::NormalApprox);
    CHECK(big.p_value < 0.001);  // 30 positive differences
}

TEST_CASE("wilcoxon Pratt keeps zeros in the ranking") {
    std::vector<double> a = {1.0, 2.0, 3.0, 1.0, 1.0};
    std::vector<double> b = {0.5, 1.0, 2.5, 1.0, 1.0};
    auto pratt = wilcoxon(a, b, Alternative::Greater, ZeroMethod::Pratt);
    CHECK(pratt.zero_method == ZeroMethod::Pratt);
    CHECK(pratt.zeros_dropped == 2);
    CHECK(pratt.n_pairs == 3);
    CHECK(pratt.method == WilcoxonMethod::NormalApprox);  // Pratt never exact
    // zeros occupy the lowest ranks: |d| = (0,0,0.5,0.5,1) so the two 0.5s get
    // ranks 3.5 each and 1.0 gets rank 5; W = 3.5 + 3.5 + 5
    CHECK(pratt.w_statistic == 12.0);
    auto discard = wilcoxon(a, b, Alternative::Greater, ZeroMethod::Discard);
    CHECK(discard.w_statistic == 6.0);  // ranks of (0.5,0.5,1) = (1.5,1.5,3)
}

TEST_CASE("delta_series sorting, rolling mean, antisymmetry") {
    std::map<std::string, double> a{{"G06F", 0.8}, {"H04L", 0.5}, {"A01B", 0.2}};
    std::map<std::string, double> b{{"G06F", 0.6}, {"H04L", 0.7}, {"A01B", 0.2}};
    std::map<std::string, std::size_t> sup{{"G06F", 100}, {"H04L", 10}, {"A01B", 10}};
    auto s = delta_series(a, b, sup);
    REQUIRE(s.points.size() == 3);
    // ascending support; A01B before H04L at support 10
    CHECK(s.points[0].label == "A01B");
    CHECK(s.points[1].label == "H04L");
    CHECK(s.points[2].label == "G06F");
    CHECK(s.points[0].delta == Catch::Approx(0.0));
    CHECK(s.points[1].delta == Catch::Approx(-0.2));
    CHECK(s.points[2].delta == Catch::Approx(0.2));
    // window = max(5, ceil(0.05*3)) = 5 > n: single saturated mean point
    CHECK(s.window == 5);
    REQUIRE(s.rolling_mean.size() == 1);
    CHECK(s.rolling_mean[0] == Catch::Approx(0.0).margin(1e-15));

    auto swapped = delta_series(b, a, sup);
    for (std::size_t i = 0; i < s.points.size(); ++i) {
        CHECK(swapped.points[i].label == s.points[i].label);
        CHECK(swapped.points[i].delta == Catch::Approx(-s.points[i].delta));
    }
}

TEST_CASE("delta_series window growth and alignment checks") {
    std::map<std::string, double> a, b;
    std::map<std::string, std::size_t> sup;
    for (int i = 0; i < 200; ++i) {
        std::string l = "L" + std::to_string(1000 + i);
        a[l] = 0.5;
        b[l] = 0.25;
        sup[l] = static_cast<std::size_t>(i);
    }
    auto s = delta_series(a, b, sup);
    CHECK(s.window == 10);  // ceil(0.05 * 200)
    CHECK(s.rolling_mean.size() == 200 - 10 + 1);
    for (double m : s.rolling_mean) CHECK(m == Catch::Approx(0.25));

    b.erase("L1000");
    CHECK_THROWS_AS(delta_series(a, b, sup), ConfigError);
}
