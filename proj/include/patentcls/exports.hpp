#ifndef PATENTCLS_EXPORTS_HPP
#define PATENTCLS_EXPORTS_HPP

#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "patentcls/corpus.hpp"
#include "patentcls/costs.hpp"
#include "patentcls/metrics.hpp"
#include "patentcls/stats.hpp"

// CSV / JSON serializers for the report types. Numeric CSV fields use
// max_digits10 so a reload reproduces the stored doubles exactly.

namespace patentcls::exports {

namespace detail {

inline std::string num(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

}  // namespace detail

inline void write_frequency_csv(const corpus::FrequencyReport& rep, std::ostream& out) {
    out << "code,count\n";
    // descending count, ties by code (same order as the coverage curve)
    std::vector<std::pair<std::string, std::size_t>> ordered(rep.counts.begin(), rep.counts.end());
    std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    for (const auto& [code, count] : ordered) out << code << ',' << count << '\n';
}

inline nlohmann::json frequency_summary_json(const corpus::FrequencyReport& rep) {
    nlohmann::json j;
    j["patent_count"] = rep.patent_count;
    j["subclass_count"] = rep.counts.size();
    j["total_assignments"] = rep.total_assignments;
    j["mean_labels_per_patent"] = rep.mean_labels;
    j["median_labels_per_patent"] = rep.median_labels;
    j["p90_labels_per_patent"] = rep.p90_labels;
    j["p95_labels_per_patent"] = rep.p95_labels;
    j["p99_labels_per_patent"] = rep.p99_labels;
    j["share_1_to_7"] = rep.share_1_to_7;
    j["max_labels_per_patent"] = rep.max_labels;
    nlohmann::json hist = nlohmann::json::object();
    for (const auto& [k, v] : rep.labels_per_patent_hist) hist[std::to_string(k)] = v;
    j["labels_per_patent_hist"] = hist;
    nlohmann::json curve = nlohmann::json::array();
    for (const auto& [x, y] : rep.coverage_curve) curve.push_back({x, y});
    j["coverage_curve"] = curve;
    return j;
}

inline void write_confusion_csv(const metrics::LabelConfusionTable& table, std::ostream& out) {
    out << "label,support,pred_pos,tp,fp,fn,tn,precision,recall,f1,accuracy\n";
    for (const auto& [label, c] : table.labels) {
        auto prf = metrics::prf_from_counts(c.tp, c.fp, c.fn);
        double acc = table.document_count == 0
                         ? 0.0
                         : static_cast<double>(c.tp + c.tn) / static_cast<double>(table.document_count);
        out << label << ',' << c.support << ',' << c.pred_pos << ',' << c.tp << ',' << c.fp << ','
            << c.fn << ',' << c.tn << ',' << detail::num(prf.precision) << ','
            << detail::num(prf.recall) << ',' << detail::num(prf.f1) << ',' << detail::num(acc)
            << '\n';
    }
}

inline nlohmann::json prf_json(const metrics::Prf& p) {
    return {{"precision", p.precision}, {"recall", p.recall}, {"f1", p.f1}};
}

inline nlohmann::json metric_report_json(const metrics::MetricReport& rep) {
    nlohmann::json j;
    j["micro"] = prf_json(rep.micro_prf);
    j["macro"] = prf_json(rep.macro_prf);
    j["macro_universe"] = rep.macro_universe == metrics::MacroUniverse::GoldSupported
                              ? "gold_supported"
                              : "full_label_space";
    j["macro_label_count"] = rep.macro_label_count;
    j["acc_at_1"] = rep.acc1;
    j["hierarchical"] = {{"section", prf_json(rep.hier_section)},
                         {"class", prf_json(rep.hier_class)},
                         {"subclass", prf_json(rep.hier_subclass)}};
    return j;
}

inline nlohmann::json bootstrap_json(const stats::BootstrapResult& r) {
    nlohmann::json j;
    j["rng"] = stats::kRngName;
    j["metric"] = r.metric_name;
    j["point_estimate"] = r.point_estimate;
    j["ci_lower"] = r.ci_lower;
    j["ci_upper"] = r.ci_upper;
    j["resamples"] = r.resamples;
    j["seed"] = r.seed;
    return j;
}

inline nlohmann::json wilcoxon_json(const stats::PairedTestResult& r) {
    nlohmann::json j;
    j["n_pairs"] = r.n_pairs;
    j["zeros"] = r.zeros_dropped;
    j["w_statistic"] = r.w_statistic;
    j["p_value"] = r.p_value;
    switch (r.alternative) {
        case stats::Alternative::Greater: j["alternative"] = "greater"; break;
        case stats::Alternative::Less: j["alternative"] = "less"; break;
        case stats::Alternative::TwoSided: j["alternative"] = "two_sided"; break;
    }
    j["method"] = r.method == stats::WilcoxonMethod::Exact ? "exact" : "normal_approx";
    j["zero_method"] = r.zero_method == stats::ZeroMethod::Discard ? "discard" : "pratt";
    return j;
}

inline void write_delta_csv(const stats::DeltaSeries& series, std::ostream& out) {
    out << "label,support,delta_f1\n";
    for (const auto& p : series.points)
        out << p.label << ',' << p.support << ',' << detail::num(p.delta) << '\n';
}

inline void write_tradeoff_csv(const costs::TradeoffTable& table, std::ostream& out) {
    out << "key,micro_f1,energy_kwh,time_min,sec_per_patent,wh_per_patent,g_co2_per_patent\n";
    for (const auto& r : table.rows)
        out << r.key << ',' << detail::num(r.micro_f1) << ',' << detail::num(r.energy_kwh) << ','
            << detail::num(r.time_min) << ',' << detail::num(r.per_patent_costs.seconds) << ','
            << detail::num(r.per_patent_costs.wh) << ',' << detail::num(r.per_patent_costs.grams)
            << '\n';
}

inline nlohmann::json tradeoff_plot_json(const costs::TradeoffTable& table,
                                         double best_encoder_micro_f1) {
    nlohmann::json j;
    j["x_log_scale"] = true;
    j["reference_micro_f1"] = best_encoder_micro_f1;
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& r : table.rows)
        pts.push_back({{"key", r.key}, {"energy_kwh", r.energy_kwh}, {"micro_f1", r.micro_f1}});
    j["points"] = pts;
    return j;
}

}  // namespace patentcls::exports

#endif
