#ifndef PATENTCLS_DECODING_HPP
#define PATENTCLS_DECODING_HPP

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "patentcls/error.hpp"
#include "patentcls/metrics.hpp"
#include "patentcls/taxonomy.hpp"

// Encoder probability matrices -> capped label sets: global threshold
// calibration, thresholded decoding with argmax fallback, and allowed-set
// masked decoding.

namespace patentcls::decoding {

struct ProbabilityMatrix {
    std::vector<std::string> ids;     // rows
    std::vector<std::string> codes;   // columns, canonical subclass codes
    std::vector<std::vector<double>> probs;  // [row][col], in [0,1]

    std::size_t rows() const { return ids.size(); }
    std::size_t cols() const { return codes.size(); }
};

struct DecoderConfig {
    double threshold = 0.5;
    std::size_t cap = 7;
    // per-patent allowed sets; absent entries decode unconstrained
    std::optional<std::map<std::string, std::set<std::string>>> mask;
};

namespace detail {

inline void validate_prob(double p, const std::string& where) {
    if (!(p >= 0.0 && p <= 1.0))
        throw ParseError(where + ": probability " + std::to_string(p) + " outside [0,1]");
}

}  // namespace detail

// CSV with header `id,<code1>,...` or JSONL `{"id", "probs": {code: float}}`.
inline ProbabilityMatrix load_probability_matrix(const std::string& path,
                                                 const std::string& schema) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open probability matrix: " + path);
    ProbabilityMatrix m;
    std::string line;
    if (schema == "csv") {
        if (!std::getline(in, line)) throw ParseError(path + ": missing header");
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::stringstream hs(line);
        std::string col;
        bool first = true;
        while (std::getline(hs, col, ',')) {
            if (first) {
                first = false;
                continue;
            }
            m.codes.push_back(taxonomy::normalize_code(col));
        }
        std::size_t lineno = 1;
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            std::stringstream ls(line);
            std::string field;
            std::vector<double> row;
            std::string id;
            bool first_field = true;
            while (std::getline(ls, field, ',')) {
                if (first_field) {
                    id = field;
                    first_field = false;
                } else {
                    double p = std::stod(field);
                    detail::validate_prob(p, path + ":" + std::to_string(lineno));
                    row.push_back(p);
                }
            }
            if (row.size() != m.codes.size())
                throw ParseError(path + ":" + std::to_string(lineno) + ": expected " +
                                 std::to_string(m.codes.size()) + " probabilities");
            m.ids.push_back(id);
            m.probs.push_back(std::move(row));
        }
    } else if (schema == "jsonl") {
        std::set<std::string> all_codes;
        std::vector<std::pair<std::string, std::map<std::string, double>>> rows;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(line);
            } catch (const nlohmann::json::exception& e) {
                throw ParseError(path + ":" + std::to_string(lineno) + ": " + e.what());
            }
            std::map<std::string, double> probs;
            for (auto& [k, v] : j.at("probs").items()) {
                double p = v.get<double>();
                detail::validate_prob(p, path + ":" + std::to_string(lineno));
                std::string code = taxonomy::normalize_code(k);
                probs[code] = p;
                all_codes.insert(code);
            }
            rows.emplace_back(j.at("id").get<std::string>(), std::move(probs));
        }
        m.codes.assign(all_codes.begin(), all_codes.end());
        for (auto& [id, probs] : rows) {
            std::vector<double> row(m.codes.size(), 0.0);
            for (std::size_t c = 0; c < m.codes.size(); ++c) {
                auto it = probs.find(m.codes[c]);
                if (it != probs.end()) row[c] = it->second;
            }
            m.ids.push_back(id);
            m.probs.push_back(std::move(row));
        }
    } else {
        throw ConfigError("unknown probability matrix schema: " + schema);
    }
    if (m.rows() == 0) throw ParseError(path + ": empty probability matrix");
    return m;
}

// Decode a single row: mask, threshold (strictly above), argmax fallback,
// cap to highest-probability labels; output ordered by descending probability,
// ties by code lexicographic order.
inline std::vector<std::string> decode_row(const ProbabilityMatrix& m, std::size_t row,
                                           const DecoderConfig& config) {
    const auto& probs = m.probs[row];
    const std::set<std::string>* allowed = nullptr;
    if (config.mask) {
        auto it = config.mask->find(m.ids[row]);
        if (it != config.mask->end()) allowed = &it->second;
    }
    std::vector<std::pair<double, std::string>> admissible;  // (prob, code)
    for (std::size_t c = 0; c < m.cols(); ++c) {
        if (allowed && !allowed->count(m.codes[c])) continue;  // masked to zero
        admissible.emplace_back(probs[c], m.codes[c]);
    }
    if (admissible.empty())
        throw AlignmentError("decode: allowed set for " + m.ids[row] +
                             " has no overlap with the label space");

    auto better = [](const std::pair<double, std::string>& a,
                     const std::pair<double, std::string>& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    };
    std::sort(admissible.begin(), admissible.end(), better);

    std::vector<std::string> out;
    for (const auto& [p, code] : admissible) {
        if (p > config.threshold) out.push_back(code);
        if (out.size() == config.cap) break;
    }
    if (out.empty()) out.push_back(admissible.front().second);  // argmax fallback
    return out;
}

inline std::map<std::string, std::vector<std::string>> decode(const ProbabilityMatrix& m,
                                                              const DecoderConfig& config) {
    if (config.cap == 0) throw ConfigError("decode: cap must be >= 1");
    if (config.mask) {
        std::set<std::string> space(m.codes.begin(), m.codes.end());
        for (const auto& [id, allowed] : *config.mask)
            for (const auto& code : allowed)
                if (!space.count(code))
                    throw AlignmentError("decode: allowed code " + code + " for " + id +
                                         " outside the label space");
    }
    std::map<std::string, std::vector<std::string>> out;
    for (std::size_t r = 0; r < m.rows(); ++r) out[m.ids[r]] = decode_row(m, r, config);
    return out;
}

// Grid search over {0, step, 2*step, ..., 1}; returns the threshold with
// maximal dev micro-F1, ties broken by smaller threshold.
inline double calibrate_threshold(const ProbabilityMatrix& dev_probs,
                                  const std::map<std::string, std::set<std::string>>& dev_gold,
                                  double grid_step = 0.005, std::size_t cap = 7) {
    if (!(grid_step > 0.0 && grid_step <= 0.5))
        throw ConfigError("calibrate_threshold: grid_step outside (0, 0.5]");
    for (const auto& id : dev_probs.ids)
        if (!dev_gold.count(id))
            throw AlignmentError("calibrate_threshold: no gold labels for " + id);

    double best_tau = 0.0;
    double best_f1 = -1.0;
    for (std::size_t step = 0;; ++step) {
        double tau = std::min(1.0, static_cast<double>(step) * grid_step);
        DecoderConfig config;
        config.threshold = tau;
        config.cap = cap;
        auto decoded = decode(dev_probs, config);
        std::vector<metrics::PredictionRecord> records;
        for (const auto& id : dev_probs.ids)
            records.push_back({id, dev_gold.at(id), decoded.at(id)});
        double f1 = metrics::micro(metrics::confusion(records, taxonomy::Level::Subclass)).f1;
        if (f1 > best_f1) {
            best_f1 = f1;
            best_tau = tau;
        }
        if (tau >= 1.0) break;
    }
    return best_tau;
}

}  // namespace patentcls::decoding

#endif
