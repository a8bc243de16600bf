#ifndef PATENTCLS_METRICS_HPP
#define PATENTCLS_METRICS_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "patentcls/error.hpp"
#include "patentcls/taxonomy.hpp"

namespace patentcls::metrics {

struct PredictionRecord {
    std::string id;
    std::set<std::string> gold;          // non-empty, canonical
    std::vector<std::string> predicted;  // rank order, unique, size <= 7
};

struct LabelCounts {
    std::size_t support = 0;   // TP + FN
    std::size_t pred_pos = 0;  // TP + FP
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::size_t tn = 0;
};

struct LabelConfusionTable {
    taxonomy::Level level = taxonomy::Level::Subclass;
    std::map<std::string, LabelCounts> labels;
    std::size_t document_count = 0;
};

struct Prf {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

// 0/0 conventions: P = 0 when TP+FP = 0, R = 0 when TP+FN = 0, F1 = 0 when P+R = 0.
inline Prf prf_from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
    Prf out;
    if (tp + fp > 0) out.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    if (tp + fn > 0) out.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    if (out.precision + out.recall > 0)
        out.f1 = 2.0 * out.precision * out.recall / (out.precision + out.recall);
    return out;
}

inline LabelConfusionTable confusion(const std::vector<PredictionRecord>& records,
                                     taxonomy::Level level,
                                     const std::set<std::string>& label_universe = {}) {
    if (records.empty()) throw EmptyCorpus("confusion: no records");
    LabelConfusionTable table;
    table.level = level;
    table.document_count = records.size();

    std::set<std::string> universe;
    if (!label_universe.empty()) {
        universe = taxonomy::expand_label_set(label_universe, level);
    } else {
        for (const auto& r : records) {
            for (const auto& c : r.gold) universe.insert(taxonomy::prefix_at(c, level));
            for (const auto& c : r.predicted) universe.insert(taxonomy::prefix_at(c, level));
        }
    }
    for (const auto& l : universe) table.labels[l];

    for (const auto& r : records) {
        auto gold = taxonomy::expand_label_set(r.gold, level);
        std::set<std::string> pred;
        for (const auto& c : r.predicted) pred.insert(taxonomy::prefix_at(c, level));
        for (const auto& l : gold)
            if (!table.labels.count(l)) throw UnknownLabel("confusion: gold label " + l + " outside universe");
        for (const auto& l : pred)
            if (!table.labels.count(l)) throw UnknownLabel("confusion: predicted label " + l + " outside universe");
        for (auto& [label, cnt] : table.labels) {
            bool g = gold.count(label) > 0;
            bool p = pred.count(label) > 0;
            if (g) ++cnt.support;
            if (p) ++cnt.pred_pos;
            if (g && p)
                ++cnt.tp;
            else if (!g && p)
                ++cnt.fp;
            else if (g && !p)
                ++cnt.fn;
            else
                ++cnt.tn;
        }
    }
    return table;
}

inline Prf micro(const LabelConfusionTable& table) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (const auto& [_, c] : table.labels) {
        tp += c.tp;
        fp += c.fp;
        fn += c.fn;
    }
    return prf_from_counts(tp, fp, fn);
}

enum class MacroUniverse { GoldSupported, FullLabelSpace };

// Per-label P/R/F1 averaged with equal weight. GoldSupported averages over
// labels with test-set support > 0; FullLabelSpace over every table row.
inline Prf macro(const LabelConfusionTable& table,
                 MacroUniverse universe = MacroUniverse::GoldSupported) {
    Prf sum;
    std::size_t n = 0;
    for (const auto& [_, c] : table.labels) {
        if (universe == MacroUniverse::GoldSupported && c.support == 0) continue;
        Prf p = prf_from_counts(c.tp, c.fp, c.fn);
        sum.precision += p.precision;
        sum.recall += p.recall;
        sum.f1 += p.f1;
        ++n;
    }
    if (n == 0) return {};
    return {sum.precision / n, sum.recall / n, sum.f1 / n};
}

inline double acc_at_1(const std::vector<PredictionRecord>& records) {
    if (records.empty()) throw EmptyCorpus("acc_at_1: no records");
    std::size_t hits = 0;
    for (const auto& r : records) {
        if (r.predicted.empty()) throw EmptyPrediction("acc_at_1: record " + r.id + " has no predictions");
        if (r.gold.count(r.predicted.front())) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(records.size());
}

struct MetricReport {
    Prf micro_prf;
    Prf macro_prf;
    double acc1 = 0.0;
    Prf hier_section;
    Prf hier_class;
    Prf hier_subclass;
    std::size_t macro_label_count = 0;
    MacroUniverse macro_universe = MacroUniverse::GoldSupported;
};

inline std::map<taxonomy::Level, Prf> hierarchical_report(
    const std::vector<PredictionRecord>& records) {
    std::map<taxonomy::Level, Prf> out;
    for (auto level : {taxonomy::Level::Section, taxonomy::Level::Class, taxonomy::Level::Subclass})
        out[level] = micro(confusion(records, level));
    return out;
}

inline MetricReport full_report(const std::vector<PredictionRecord>& records,
                                MacroUniverse universe = MacroUniverse::GoldSupported) {
    MetricReport rep;
    auto table = confusion(records, taxonomy::Level::Subclass);
    rep.micro_prf = micro(table);
    rep.macro_prf = macro(table, universe);
    rep.macro_universe = universe;
    for (const auto& [_, c] : table.labels)
        if (universe == MacroUniverse::FullLabelSpace || c.support > 0) ++rep.macro_label_count;
    rep.acc1 = acc_at_1(records);
    auto hier = hierarchical_report(records);
    rep.hier_section = hier.at(taxonomy::Level::Section);
    rep.hier_class = hier.at(taxonomy::Level::Class);
    rep.hier_subclass = hier.at(taxonomy::Level::Subclass);
    return rep;
}

// Per-label F1 map at subclass level, used by the stratified comparisons.
inline std::map<std::string, double> per_label_f1(const LabelConfusionTable& table) {
    std::map<std::string, double> out;
    for (const auto& [label, c] : table.labels) out[label] = prf_from_counts(c.tp, c.fp, c.fn).f1;
    return out;
}

}  // namespace patentcls::metrics

#endif
