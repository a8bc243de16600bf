#ifndef PATENTCLS_EVALUATION_HPP
#define PATENTCLS_EVALUATION_HPP

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "patentcls/corpus.hpp"
#include "patentcls/decoding.hpp"
#include "patentcls/error.hpp"
#include "patentcls/metrics.hpp"
#include "patentcls/postparse.hpp"
#include "patentcls/prompting.hpp"
#include "patentcls/retrieval.hpp"
#include "patentcls/stats.hpp"
#include "patentcls/taxonomy.hpp"

// End-to-end orchestration: prompt preparation, generation ingestion, encoder
// decoding, predictions.jsonl ownership, and run comparison.

namespace patentcls::evaluation {

enum class PipelineKind { LlmPrompted, EncoderDecoded };

struct RunManifest {
    std::string run_id;
    PipelineKind kind = PipelineKind::LlmPrompted;
    std::optional<prompting::Regime> regime;  // LLM runs
    std::size_t retrieval_k = 20;
    prompting::FewShotConfig fewshot;
    double threshold = 0.5;  // encoder runs
    std::size_t cap = 7;
    bool enforce_nonempty = true;
    std::uint64_t seed = 0;

    // Content-addressed digest over every config field (FNV-1a of the
    // canonical sorted-key JSON serialization).
    std::string digest() const {
        nlohmann::json j;
        j["kind"] = kind == PipelineKind::LlmPrompted ? "llm" : "encoder";
        j["regime"] = regime ? prompting::regime_name(*regime) : "";
        j["retrieval_k"] = retrieval_k;
        j["static_indices"] = fewshot.static_indices;
        j["dynamic_count"] = fewshot.dynamic_count;
        j["threshold"] = threshold;
        j["cap"] = cap;
        j["enforce_nonempty"] = enforce_nonempty;
        j["seed"] = seed;
        std::string canon = j.dump();
        std::uint64_t h = 1469598103934665603ULL;
        for (unsigned char c : canon) {
            h ^= c;
            h *= 1099511628211ULL;
        }
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
        return buf;
    }
};

struct PredictionRow {
    std::string id;
    std::string text;
    std::set<std::string> gold_labels;
    std::vector<std::string> pred_labels;
    std::optional<std::string> prompt;      // full user prompt; absent for encoder runs
    std::optional<std::string> raw_output;  // LLM runs
    std::optional<std::vector<std::string>> allowed_codes;
    std::optional<std::vector<std::string>> fewshot_ids;
    std::optional<std::string> parse_path;
};

inline metrics::PredictionRecord to_metric_record(const PredictionRow& row) {
    return {row.id, row.gold_labels, row.pred_labels};
}

inline std::vector<metrics::PredictionRecord> to_metric_records(
    const std::vector<PredictionRow>& rows) {
    std::vector<metrics::PredictionRecord> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(to_metric_record(r));
    return out;
}

inline void write_predictions_jsonl(const std::vector<PredictionRow>& rows, std::ostream& out) {
    for (const auto& r : rows) {
        nlohmann::json j;
        j["id"] = r.id;
        j["text"] = r.text;
        j["gold_labels"] = std::vector<std::string>(r.gold_labels.begin(), r.gold_labels.end());
        j["pred_labels"] = r.pred_labels;
        if (r.prompt) j["prompt"] = *r.prompt;
        if (r.raw_output) j["raw_output"] = *r.raw_output;
        if (r.allowed_codes) j["allowed_codes"] = *r.allowed_codes;
        if (r.fewshot_ids) j["fewshot_ids"] = *r.fewshot_ids;
        if (r.parse_path) j["parse_path"] = *r.parse_path;
        out << j.dump() << '\n';
    }
}

inline std::vector<PredictionRow> read_predictions_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open predictions file: " + path);
    std::vector<PredictionRow> rows;
    std::set<std::string> seen;
    std::string line;
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
        PredictionRow r;
        r.id = j.at("id").get<std::string>();
        if (!seen.insert(r.id).second)
            throw ParseError(path + ":" + std::to_string(lineno) + ": duplicate id " + r.id);
        r.text = j.value("text", std::string{});
        for (const auto& g : j.at("gold_labels"))
            r.gold_labels.insert(taxonomy::normalize_code(g.get<std::string>()));
        for (const auto& p : j.at("pred_labels"))
            r.pred_labels.push_back(taxonomy::normalize_code(p.get<std::string>()));
        if (j.contains("prompt")) r.prompt = j["prompt"].get<std::string>();
        if (j.contains("raw_output")) r.raw_output = j["raw_output"].get<std::string>();
        if (j.contains("allowed_codes"))
            r.allowed_codes = j["allowed_codes"].get<std::vector<std::string>>();
        if (j.contains("fewshot_ids"))
            r.fewshot_ids = j["fewshot_ids"].get<std::vector<std::string>>();
        if (j.contains("parse_path")) r.parse_path = j["parse_path"].get<std::string>();
        rows.push_back(std::move(r));
    }
    if (rows.empty()) throw ParseError(path + ": no prediction rows");
    return rows;
}

// Allowed-sets file: JSONL {"id", "codes": [...], "scores": [...]}.
inline void write_allowed_sets(const std::map<std::string, retrieval::AllowedLabelSet>& sets,
                               std::ostream& out) {
    for (const auto& [id, s] : sets) {
        nlohmann::json j;
        j["id"] = id;
        std::vector<std::string> codes;
        std::vector<double> scores;
        for (const auto& [c, sc] : s.ranked) {
            codes.push_back(c);
            scores.push_back(sc);
        }
        j["codes"] = codes;
        j["scores"] = scores;
        out << j.dump() << '\n';
    }
}

inline std::map<std::string, retrieval::AllowedLabelSet> read_allowed_sets(
    const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open allowed-sets file: " + path);
    std::map<std::string, retrieval::AllowedLabelSet> out;
    std::string line;
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
        retrieval::AllowedLabelSet s;
        s.patent_id = j.at("id").get<std::string>();
        auto codes = j.at("codes").get<std::vector<std::string>>();
        std::vector<double> scores(codes.size(), 0.0);
        if (j.contains("scores")) scores = j["scores"].get<std::vector<double>>();
        if (scores.size() != codes.size())
            throw ParseError(path + ":" + std::to_string(lineno) + ": codes/scores length mismatch");
        for (std::size_t i = 0; i < codes.size(); ++i)
            s.ranked.emplace_back(taxonomy::normalize_code(codes[i]), scores[i]);
        if (!out.emplace(s.patent_id, std::move(s)).second)
            throw DuplicateKey(path + ": duplicate allowed set for id");
    }
    return out;
}

// Raw generations: JSONL {"id", "raw_output"}.
inline std::map<std::string, std::string> read_generations(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open generations file: " + path);
    std::map<std::string, std::string> out;
    std::string line;
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
        out[j.at("id").get<std::string>()] = j.at("raw_output").get<std::string>();
    }
    return out;
}

struct RunOutput {
    std::vector<PredictionRow> rows;  // ordered by patent id
    metrics::MetricReport report;
};

// Prompt preparation for LLM runs (the generation step itself is external).
inline std::vector<prompting::PromptBundle> prepare_prompts(
    const RunManifest& manifest, const corpus::PatentCorpus& test,
    const corpus::PatentCorpus* training, const retrieval::TfidfIndex* tfidf,
    const std::map<std::string, retrieval::AllowedLabelSet>* allowed_sets,
    const taxonomy::DefinitionCatalog* catalog) {
    if (!manifest.regime) throw ConfigError("prepare_prompts: manifest has no regime");
    prompting::Regime regime = *manifest.regime;
    if (prompting::regime_uses_fewshot(regime) && (!training || !tfidf))
        throw ConfigError("prepare_prompts: few-shot regime needs a training corpus and TF-IDF index");
    if (prompting::regime_uses_rag(regime) && (!allowed_sets || !catalog))
        throw ConfigError("prepare_prompts: RAG regime needs allowed sets and a definition catalog");

    std::vector<prompting::PromptBundle> bundles;
    for (const auto& patent : test.records) {
        std::optional<prompting::FewShotBlock> fewshot;
        if (prompting::regime_uses_fewshot(regime))
            fewshot = prompting::build_fewshot_block(*training, manifest.fewshot, *tfidf,
                                                     corpus::document_text(patent));
        std::optional<retrieval::AllowedLabelSet> allowed;
        if (prompting::regime_uses_rag(regime)) {
            auto it = allowed_sets->find(patent.id);
            if (it == allowed_sets->end())
                throw ConfigError("prepare_prompts: no allowed set for " + patent.id);
            allowed = it->second;
        }
        bundles.push_back(prompting::render_prompt(regime, patent, fewshot, allowed, catalog));
    }
    return bundles;
}

// Consume raw generations for an LLM run: allowed-set filtering, parsing
// ladder, metrics.
inline RunOutput run_llm_pipeline(
    const RunManifest& manifest, const corpus::PatentCorpus& test,
    const std::map<std::string, std::string>& generations,
    const std::map<std::string, retrieval::AllowedLabelSet>* allowed_sets,
    const std::map<std::string, prompting::PromptBundle>* prompts_by_id = nullptr) {
    if (!manifest.regime) throw ConfigError("run_llm_pipeline: manifest has no regime");
    bool rag = prompting::regime_uses_rag(*manifest.regime);
    if (rag && !allowed_sets) throw ConfigError("run_llm_pipeline: RAG regime needs allowed sets");

    RunOutput out;
    for (const auto& patent : test.records) {
        auto git = generations.find(patent.id);
        if (git == generations.end())
            throw MissingGeneration("run_llm_pipeline: no generation for " + patent.id);
        std::optional<retrieval::AllowedLabelSet> allowed;
        if (rag) {
            auto it = allowed_sets->find(patent.id);
            if (it == allowed_sets->end())
                throw ConfigError("run_llm_pipeline: no allowed set for " + patent.id);
            allowed = it->second;
        }
        auto parsed = postparse::parse_output(git->second, allowed, manifest.enforce_nonempty,
                                              manifest.cap);
        PredictionRow row;
        row.id = patent.id;
        row.text = corpus::document_text(patent);
        row.gold_labels = patent.gold_labels;
        row.pred_labels = parsed.labels;
        row.raw_output = git->second;
        row.parse_path = postparse::parse_path_name(parsed.path);
        if (allowed) {
            std::vector<std::string> codes;
            for (const auto& [c, _] : allowed->ranked) codes.push_back(c);
            row.allowed_codes = codes;
        }
        if (prompts_by_id) {
            auto pit = prompts_by_id->find(patent.id);
            if (pit != prompts_by_id->end()) {
                row.prompt = pit->second.user_text;
                if (!pit->second.fewshot_ids.empty()) row.fewshot_ids = pit->second.fewshot_ids;
            }
        }
        out.rows.push_back(std::move(row));
    }
    std::sort(out.rows.begin(), out.rows.end(),
              [](const PredictionRow& a, const PredictionRow& b) { return a.id < b.id; });
    out.report = metrics::full_report(to_metric_records(out.rows));
    return out;
}

inline RunOutput run_encoder_pipeline(const RunManifest& manifest,
                                      const corpus::PatentCorpus& test,
                                      const decoding::ProbabilityMatrix& probs,
                                      const std::optional<std::map<std::string, std::set<std::string>>>&
                                          mask = std::nullopt) {
    std::map<std::string, const corpus::PatentRecord*> by_id;
    for (const auto& r : test.records) by_id[r.id] = &r;
    for (const auto& id : probs.ids)
        if (!by_id.count(id))
            throw AlignmentError("run_encoder_pipeline: probability row " + id + " not in corpus");

    decoding::DecoderConfig config;
    config.threshold = manifest.threshold;
    config.cap = manifest.cap;
    config.mask = mask;
    auto decoded = decoding::decode(probs, config);

    RunOutput out;
    for (const auto& id : probs.ids) {
        const corpus::PatentRecord& patent = *by_id.at(id);
        PredictionRow row;
        row.id = id;
        row.text = corpus::document_text(patent);
        row.gold_labels = patent.gold_labels;
        row.pred_labels = decoded.at(id);
        if (mask) {
            auto it = mask->find(id);
            if (it != mask->end())
                row.allowed_codes =
                    std::vector<std::string>(it->second.begin(), it->second.end());
        }
        out.rows.push_back(std::move(row));
    }
    std::sort(out.rows.begin(), out.rows.end(),
              [](const PredictionRow& a, const PredictionRow& b) { return a.id < b.id; });
    out.report = metrics::full_report(to_metric_records(out.rows));
    return out;
}

struct BandComparison {
    stats::Band band = stats::Band::Rare;
    std::size_t label_count = 0;
    double mean_f1_a = 0.0;
    double mean_f1_b = 0.0;
    std::optional<stats::PairedTestResult> test;  // absent when all differences are zero
};

struct CompareReport {
    std::vector<BandComparison> bands;
    stats::DeltaSeries deltas;
};

// Per-label F1 joins on the shared gold set, stratified Wilcoxon per band,
// plus the delta-vs-frequency series.
inline CompareReport compare_runs(const std::vector<PredictionRow>& run_a,
                                  const std::vector<PredictionRow>& run_b,
                                  double lower = 0.2, double upper = 0.8,
                                  stats::Alternative alternative = stats::Alternative::Greater,
                                  stats::ZeroMethod zero_method = stats::ZeroMethod::Discard) {
    if (run_a.size() != run_b.size())
        throw GoldMismatch("compare_runs: runs cover different numbers of patents");
    for (std::size_t i = 0; i < run_a.size(); ++i)
        if (run_a[i].id != run_b[i].id || run_a[i].gold_labels != run_b[i].gold_labels)
            throw GoldMismatch("compare_runs: gold sets differ at " + run_a[i].id);

    auto table_a = metrics::confusion(to_metric_records(run_a), taxonomy::Level::Subclass);
    auto table_b = metrics::confusion(to_metric_records(run_b), taxonomy::Level::Subclass);
    // align on the union of labels
    std::set<std::string> labels;
    for (const auto& [l, _] : table_a.labels) labels.insert(l);
    for (const auto& [l, _] : table_b.labels) labels.insert(l);
    std::map<std::string, double> f1_a, f1_b;
    std::map<std::string, std::size_t> supports;
    for (const auto& l : labels) {
        auto ca = table_a.labels.count(l) ? table_a.labels.at(l) : metrics::LabelCounts{};
        auto cb = table_b.labels.count(l) ? table_b.labels.at(l) : metrics::LabelCounts{};
        f1_a[l] = metrics::prf_from_counts(ca.tp, ca.fp, ca.fn).f1;
        f1_b[l] = metrics::prf_from_counts(cb.tp, cb.fp, cb.fn).f1;
        supports[l] = std::max(ca.support, cb.support);  // gold sets are identical
    }

    auto strata = stats::stratify(supports, lower, upper);
    CompareReport report;
    for (auto band : {stats::Band::Rare, stats::Band::Medium, stats::Band::Frequent}) {
        BandComparison cmp;
        cmp.band = band;
        std::vector<double> a, b;
        for (const auto& [l, bd] : strata.bands) {
            if (bd != band) continue;
            a.push_back(f1_a[l]);
            b.push_back(f1_b[l]);
        }
        cmp.label_count = a.size();
        if (!a.empty()) {
            for (std::size_t i = 0; i < a.size(); ++i) {
                cmp.mean_f1_a += a[i];
                cmp.mean_f1_b += b[i];
            }
            cmp.mean_f1_a /= static_cast<double>(a.size());
            cmp.mean_f1_b /= static_cast<double>(b.size());
            try {
                cmp.test = stats::wilcoxon(a, b, alternative, zero_method);
            } catch (const AllZeroDifferences&) {
                cmp.test = std::nullopt;
            }
        }
        report.bands.push_back(std::move(cmp));
    }
    report.deltas = stats::delta_series(f1_a, f1_b, supports);
    return report;
}

}  // namespace patentcls::evaluation

#endif
