#ifndef PATENTCLS_CORPUS_HPP
#define PATENTCLS_CORPUS_HPP

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "patentcls/error.hpp"
#include "patentcls/taxonomy.hpp"

namespace patentcls::corpus {

enum class Split { Train, Validation, Test };

struct PatentRecord {
    std::string id;
    std::string title;
    std::string abstract_text;
    std::set<std::string> gold_labels;  // canonical subclass codes, non-empty
};

struct PatentCorpus {
    std::vector<PatentRecord> records;  // file order, deterministic indexing
    std::string provenance;

    std::size_t size() const { return records.size(); }
    bool empty() const { return records.empty(); }
};

// `title. abstract` with whitespace runs collapsed; no extra period when the
// title already ends with terminal punctuation.
inline std::string document_text(const PatentRecord& r) {
    std::string title = taxonomy::collapse_whitespace(r.title);
    std::string abs = taxonomy::collapse_whitespace(r.abstract_text);
    std::string joined;
    if (title.empty()) {
        joined = abs;
    } else {
        joined = title;
        char last = title.back();
        if (last != '.' && last != '!' && last != '?') joined += '.';
        if (!abs.empty()) joined += ' ' + abs;
    }
    return taxonomy::collapse_whitespace(joined);
}

namespace detail {

inline PatentRecord record_from_fields(const std::string& id, const std::string& title,
                                       const std::string& abstract_text,
                                       const std::vector<std::string>& raw_labels) {
    PatentRecord rec;
    rec.id = id;
    rec.title = title;
    rec.abstract_text = abstract_text;
    for (const auto& raw : raw_labels) {
        std::string code;
        if (taxonomy::try_normalize_code(raw, code)) rec.gold_labels.insert(code);
    }
    return rec;
}

inline std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

}  // namespace detail

// JSONL: {"id", "title", "abstract", "labels": [...]}.
// CSV: header id,title,abstract,labels with labels ';'-joined.
// Records whose labels all fail normalization are rejected and their ids
// collected into `rejected_ids` when provided, else reported via ParseError.
inline PatentCorpus load_corpus(const std::string& path, const std::string& schema,
                                std::vector<std::string>* rejected_ids = nullptr) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open corpus file: " + path);
    PatentCorpus corpus;
    corpus.provenance = path;
    std::vector<std::string> rejected;
    std::unordered_set<std::string> seen_ids;
    std::string line;
    std::size_t lineno = 0;

    auto push = [&](PatentRecord&& rec) {
        if (rec.gold_labels.empty()) {
            rejected.push_back(rec.id);
            return;
        }
        if (!seen_ids.insert(rec.id).second)
            throw ParseError(path + ": duplicate patent id " + rec.id);
        corpus.records.push_back(std::move(rec));
    };

    if (schema == "jsonl") {
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(line);
            } catch (const nlohmann::json::exception& e) {
                throw ParseError(path + ":" + std::to_string(lineno) + ": " + e.what());
            }
            if (!j.contains("id") || !j.contains("title") || !j.contains("abstract") ||
                !j.contains("labels"))
                throw ParseError(path + ":" + std::to_string(lineno) +
                                 ": expected keys id/title/abstract/labels");
            push(detail::record_from_fields(j["id"].get<std::string>(),
                                            j["title"].get<std::string>(),
                                            j["abstract"].get<std::string>(),
                                            j["labels"].get<std::vector<std::string>>()));
        }
    } else if (schema == "csv") {
        if (!std::getline(in, line)) throw ParseError(path + ": missing CSV header");
        ++lineno;
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            auto fields = detail::split_csv_row(line);
            if (fields.size() != 4)
                throw ParseError(path + ":" + std::to_string(lineno) + ": expected 4 CSV fields");
            std::vector<std::string> labels;
            std::stringstream ss(fields[3]);
            std::string tok;
            while (std::getline(ss, tok, ';'))
                if (!tok.empty()) labels.push_back(tok);
            push(detail::record_from_fields(fields[0], fields[1], fields[2], labels));
        }
    } else {
        throw ConfigError("unknown corpus schema: " + schema);
    }

    if (rejected_ids) *rejected_ids = rejected;
    if (corpus.empty()) throw EmptyCorpus(path + ": no valid records");
    return corpus;
}

inline void save_corpus_jsonl(const PatentCorpus& corpus, std::ostream& out) {
    for (const auto& r : corpus.records) {
        nlohmann::json j;
        j["id"] = r.id;
        j["title"] = r.title;
        j["abstract"] = r.abstract_text;
        j["labels"] = std::vector<std::string>(r.gold_labels.begin(), r.gold_labels.end());
        out << j.dump() << '\n';
    }
}

struct FrequencyReport {
    std::map<std::string, std::size_t> counts;  // per subclass
    // (fraction of subclasses, fraction of assignments), over subclasses sorted
    // by descending count, ties by code
    std::vector<std::pair<double, double>> coverage_curve;
    std::map<std::size_t, std::size_t> labels_per_patent_hist;
    double mean_labels = 0.0;
    double median_labels = 0.0;
    double p90_labels = 0.0;
    double p95_labels = 0.0;
    double p99_labels = 0.0;
    double share_1_to_7 = 0.0;
    std::size_t max_labels = 0;
    std::size_t total_assignments = 0;
    std::size_t patent_count = 0;
};

namespace detail {
// nearest-rank percentile on sorted data
inline double nearest_rank(const std::vector<std::size_t>& sorted, double q) {
    if (sorted.empty()) return 0.0;
    std::size_t rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted.size())));
    if (rank == 0) rank = 1;
    if (rank > sorted.size()) rank = sorted.size();
    return static_cast<double>(sorted[rank - 1]);
}
}  // namespace detail

inline FrequencyReport frequency_report(const PatentCorpus& corpus) {
    if (corpus.empty()) throw EmptyCorpus("frequency_report: empty corpus");
    FrequencyReport rep;
    rep.patent_count = corpus.size();
    std::vector<std::size_t> per_patent;
    per_patent.reserve(corpus.size());
    for (const auto& r : corpus.records) {
        per_patent.push_back(r.gold_labels.size());
        rep.labels_per_patent_hist[r.gold_labels.size()]++;
        for (const auto& c : r.gold_labels) rep.counts[c]++;
        rep.total_assignments += r.gold_labels.size();
    }

    std::size_t in_range = 0;
    for (auto n : per_patent) {
        rep.max_labels = std::max(rep.max_labels, n);
        if (n >= 1 && n <= 7) ++in_range;
    }
    rep.share_1_to_7 = static_cast<double>(in_range) / static_cast<double>(per_patent.size());
    rep.mean_labels =
        static_cast<double>(rep.total_assignments) / static_cast<double>(per_patent.size());
    std::sort(per_patent.begin(), per_patent.end());
    rep.median_labels = detail::nearest_rank(per_patent, 0.5);
    rep.p90_labels = detail::nearest_rank(per_patent, 0.90);
    rep.p95_labels = detail::nearest_rank(per_patent, 0.95);
    rep.p99_labels = detail::nearest_rank(per_patent, 0.99);

    // descending count, ties by code lexicographic
    std::vector<std::pair<std::string, std::size_t>> ordered(rep.counts.begin(), rep.counts.end());
    std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    double cum = 0.0;
    for (std::size_t i = 0; i < ordered.size(); ++i) {
        cum += static_cast<double>(ordered[i].second);
        rep.coverage_curve.emplace_back(
            static_cast<double>(i + 1) / static_cast<double>(ordered.size()),
            cum / static_cast<double>(rep.total_assignments));
    }
    return rep;
}

// Pearson r of (log10(count_a + 1), log10(count_b + 1)) over the union of
// subclasses appearing in either corpus.
inline double cross_split_frequency_correlation(const PatentCorpus& a, const PatentCorpus& b) {
    auto ra = frequency_report(a);
    auto rb = frequency_report(b);
    std::set<std::string> all;
    for (const auto& [c, _] : ra.counts) all.insert(c);
    for (const auto& [c, _] : rb.counts) all.insert(c);
    std::vector<double> xs, ys;
    for (const auto& c : all) {
        auto ca = ra.counts.count(c) ? ra.counts.at(c) : 0;
        auto cb = rb.counts.count(c) ? rb.counts.at(c) : 0;
        xs.push_back(std::log10(static_cast<double>(ca) + 1.0));
        ys.push_back(std::log10(static_cast<double>(cb) + 1.0));
    }
    double n = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0)
        throw DegenerateVariance("cross_split_frequency_correlation: constant series");
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace patentcls::corpus

#endif
