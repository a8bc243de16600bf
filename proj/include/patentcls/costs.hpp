#ifndef PATENTCLS_COSTS_HPP
#define PATENTCLS_COSTS_HPP

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "patentcls/error.hpp"
#include "patentcls/metrics.hpp"

// Run cost records (time / energy / CO2) and accuracy-energy trade-off tables.
// Storage units: minutes, kWh, kg. Per-patent display units: s, Wh, g.

namespace patentcls::costs {

enum class Stage { Training, Inference };

struct RunCostRecord {
    Stage stage = Stage::Inference;
    std::string setting;  // e.g. "Zero-shot", "Few-shot + RAG", "Encoder"
    std::string model;
    double time_min = 0.0;
    double energy_kwh = 0.0;
    double co2_kg = 0.0;
    std::optional<std::size_t> n_patents;  // Inference only

    std::string key() const { return model + "|" + setting; }
};

struct PerPatent {
    double seconds = 0.0;
    double wh = 0.0;
    double grams = 0.0;
};

inline PerPatent per_patent(const RunCostRecord& r) {
    if (r.stage != Stage::Inference)
        throw WrongStage("per_patent: only inference records have per-patent costs");
    if (!r.n_patents || *r.n_patents == 0)
        throw WrongStage("per_patent: inference record lacks n_patents");
    double n = static_cast<double>(*r.n_patents);
    return {r.time_min * 60.0 / n, r.energy_kwh * 1000.0 / n, r.co2_kg * 1000.0 / n};
}

// CSV header: stage,setting,model,time_min,energy_kwh,co2_kg,n_patents
inline std::vector<RunCostRecord> load_costs(const std::string& path,
                                             std::vector<std::string>* warnings = nullptr) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open costs file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path + ": missing header");
    std::vector<RunCostRecord> records;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(f);
        if (fields.size() < 6 || fields.size() > 7)
            throw ParseError(path + ":" + std::to_string(lineno) + ": expected 6 or 7 fields");
        RunCostRecord r;
        if (fields[0] == "Training")
            r.stage = Stage::Training;
        else if (fields[0] == "Inference")
            r.stage = Stage::Inference;
        else
            throw ParseError(path + ":" + std::to_string(lineno) + ": unknown stage " + fields[0]);
        r.setting = fields[1];
        r.model = fields[2];
        try {
            r.time_min = std::stod(fields[3]);
            r.energy_kwh = std::stod(fields[4]);
            r.co2_kg = std::stod(fields[5]);
        } catch (const std::exception&) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": bad numeric field");
        }
        if (r.time_min < 0 || r.energy_kwh < 0 || r.co2_kg < 0)
            throw NegativeQuantity(path + ":" + std::to_string(lineno) + ": negative quantity");
        bool has_n = fields.size() == 7 && !fields[6].empty();
        if (r.stage == Stage::Inference) {
            if (!has_n)
                throw ParseError(path + ":" + std::to_string(lineno) +
                                 ": inference record requires n_patents");
            long long n = std::stoll(fields[6]);
            if (n < 1)
                throw NegativeQuantity(path + ":" + std::to_string(lineno) + ": n_patents < 1");
            r.n_patents = static_cast<std::size_t>(n);
        } else if (has_n && warnings) {
            warnings->push_back(path + ":" + std::to_string(lineno) +
                                ": n_patents ignored for Training record");
        }
        records.push_back(std::move(r));
    }
    return records;
}

struct TradeoffRow {
    std::string key;  // model|setting
    double micro_f1 = 0.0;
    double energy_kwh = 0.0;
    double time_min = 0.0;
    PerPatent per_patent_costs;
};

struct TradeoffTable {
    std::vector<TradeoffRow> rows;  // descending micro-F1
    std::vector<std::string> unmatched_metrics;
    std::vector<std::string> unmatched_costs;
};

inline TradeoffTable tradeoff_table(const std::map<std::string, double>& micro_f1_by_key,
                                    const std::vector<RunCostRecord>& cost_records) {
    std::map<std::string, const RunCostRecord*> by_key;
    for (const auto& r : cost_records) {
        if (r.stage != Stage::Inference) continue;
        if (!by_key.emplace(r.key(), &r).second)
            throw DuplicateKey("tradeoff_table: duplicate cost record for " + r.key());
    }
    TradeoffTable table;
    for (const auto& [key, f1] : micro_f1_by_key) {
        auto it = by_key.find(key);
        if (it == by_key.end()) {
            table.unmatched_metrics.push_back(key);
            continue;
        }
        const RunCostRecord& r = *it->second;
        table.rows.push_back({key, f1, r.energy_kwh, r.time_min, per_patent(r)});
    }
    for (const auto& [key, _] : by_key)
        if (!micro_f1_by_key.count(key)) table.unmatched_costs.push_back(key);
    std::stable_sort(table.rows.begin(), table.rows.end(),
                     [](const TradeoffRow& a, const TradeoffRow& b) {
                         if (a.micro_f1 != b.micro_f1) return a.micro_f1 > b.micro_f1;
                         return a.key < b.key;
                     });
    return table;
}

// 2-3 significant figures for display; stored values stay full precision.
inline std::string display_sig(double v, int sig = 3) {
    std::ostringstream os;
    os.precision(sig);
    os << v;
    return os.str();
}

}  // namespace patentcls::costs

#endif
