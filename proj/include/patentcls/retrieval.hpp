#ifndef PATENTCLS_RETRIEVAL_HPP
#define PATENTCLS_RETRIEVAL_HPP

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "patentcls/corpus.hpp"
#include "patentcls/error.hpp"
#include "patentcls/taxonomy.hpp"

namespace patentcls::retrieval {

// ---------------------------------------------------------------------------
// Sparse TF-IDF retrieval over training texts (dynamic few-shot selection).
//
// Weighting: tf = raw count, idf = ln((1+N)/(1+df)) + 1, rows L2-normalized.
// Tokens are lowercased maximal alphanumeric runs of length >= 2; n-grams are
// joined by a single space.
// ---------------------------------------------------------------------------

struct TfidfConfig {
    std::size_t max_features = 50000;
    std::size_t ngram_lo = 1;
    std::size_t ngram_hi = 2;
    std::size_t min_df = 2;
};

using SparseVector = std::vector<std::pair<std::size_t, double>>;  // (term index, weight), sorted

struct TfidfIndex {
    std::map<std::string, std::size_t> vocabulary;  // term -> column
    std::vector<double> idf;                        // per column
    std::vector<SparseVector> rows;                 // one per document, L2-normalized
    std::vector<std::string> row_ids;               // row -> patent id
    TfidfConfig config;
};

namespace detail {

inline std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string cur;
    for (char ch : text) {
        unsigned char c = static_cast<unsigned char>(ch);
        if (std::isalnum(c)) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if (!cur.empty()) {
            if (cur.size() >= 2) tokens.push_back(cur);
            cur.clear();
        }
    }
    if (cur.size() >= 2) tokens.push_back(cur);
    return tokens;
}

inline std::vector<std::string> ngrams(const std::vector<std::string>& tokens, std::size_t lo,
                                       std::size_t hi) {
    std::vector<std::string> grams;
    for (std::size_t n = lo; n <= hi; ++n) {
        if (tokens.size() < n || n == 0) continue;
        for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
            std::string g = tokens[i];
            for (std::size_t k = 1; k < n; ++k) g += ' ' + tokens[i + k];
            grams.push_back(std::move(g));
        }
    }
    return grams;
}

inline void l2_normalize(SparseVector& v) {
    double norm2 = 0.0;
    for (const auto& [_, w] : v) norm2 += w * w;
    if (norm2 <= 0.0) return;  // zero vector stays zero
    double inv = 1.0 / std::sqrt(norm2);
    for (auto& [_, w] : v) w *= inv;
}

inline double sparse_dot(const SparseVector& a, const SparseVector& b) {
    double dot = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i].first < b[j].first)
            ++i;
        else if (a[i].first > b[j].first)
            ++j;
        else
            dot += a[i++].second * b[j++].second;
    }
    return dot;
}

}  // namespace detail

inline TfidfIndex fit_tfidf(const corpus::PatentCorpus& docs, const TfidfConfig& config = {}) {
    if (docs.empty()) throw EmptyCorpus("fit_tfidf: empty corpus");
    if (config.ngram_lo > config.ngram_hi || config.ngram_lo == 0)
        throw ConfigError("fit_tfidf: bad ngram range");

    std::vector<std::map<std::string, std::size_t>> doc_counts(docs.size());
    std::map<std::string, std::size_t> df;
    std::map<std::string, std::size_t> total_counts;
    for (std::size_t d = 0; d < docs.size(); ++d) {
        auto grams = detail::ngrams(detail::tokenize(corpus::document_text(docs.records[d])),
                                    config.ngram_lo, config.ngram_hi);
        for (auto& g : grams) doc_counts[d][g]++;
        for (const auto& [g, n] : doc_counts[d]) {
            df[g]++;
            total_counts[g] += n;
        }
    }

    // min_df filter, then keep max_features terms by total count (ties by term)
    std::vector<std::pair<std::string, std::size_t>> surviving;
    for (const auto& [g, d] : df)
        if (d >= config.min_df) surviving.emplace_back(g, total_counts[g]);
    if (surviving.empty()) throw EmptyVocabulary("fit_tfidf: no term reaches min_df");
    if (surviving.size() > config.max_features) {
        std::sort(surviving.begin(), surviving.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        surviving.resize(config.max_features);
    }
    std::sort(surviving.begin(), surviving.end());

    TfidfIndex index;
    index.config = config;
    double n_docs = static_cast<double>(docs.size());
    index.idf.reserve(surviving.size());
    for (std::size_t i = 0; i < surviving.size(); ++i) {
        const auto& term = surviving[i].first;
        index.vocabulary.emplace(term, i);
        index.idf.push_back(std::log((1.0 + n_docs) / (1.0 + static_cast<double>(df[term]))) + 1.0);
    }

    index.rows.resize(docs.size());
    for (std::size_t d = 0; d < docs.size(); ++d) {
        SparseVector& row = index.rows[d];
        for (const auto& [g, n] : doc_counts[d]) {
            auto it = index.vocabulary.find(g);
            if (it == index.vocabulary.end()) continue;
            row.emplace_back(it->second, static_cast<double>(n) * index.idf[it->second]);
        }
        detail::l2_normalize(row);
        index.row_ids.push_back(docs.records[d].id);
    }
    return index;
}

inline SparseVector vectorize_query(const TfidfIndex& index, const std::string& text) {
    std::map<std::string, std::size_t> counts;
    for (auto& g : detail::ngrams(detail::tokenize(text), index.config.ngram_lo,
                                  index.config.ngram_hi))
        counts[g]++;
    SparseVector v;
    for (const auto& [g, n] : counts) {
        auto it = index.vocabulary.find(g);
        if (it == index.vocabulary.end()) continue;
        v.emplace_back(it->second, static_cast<double>(n) * index.idf[it->second]);
    }
    detail::l2_normalize(v);
    return v;
}

struct ScoredDoc {
    std::string id;
    std::size_t row = 0;
    double score = 0.0;
};

// Cosine top-k (dot product of normalized vectors); ties by ascending row index.
inline std::vector<ScoredDoc> tfidf_topk(const TfidfIndex& index, const std::string& query_text,
                                         std::size_t k,
                                         const std::set<std::string>& exclude_ids = {}) {
    if (k == 0) throw ConfigError("tfidf_topk: k must be >= 1");
    SparseVector q = vectorize_query(index, query_text);
    std::vector<ScoredDoc> scored;
    scored.reserve(index.rows.size());
    for (std::size_t r = 0; r < index.rows.size(); ++r) {
        if (exclude_ids.count(index.row_ids[r])) continue;
        scored.push_back({index.row_ids[r], r, detail::sparse_dot(q, index.rows[r])});
    }
    std::stable_sort(scored.begin(), scored.end(), [](const ScoredDoc& a, const ScoredDoc& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.row < b.row;
    });
    if (scored.size() > k) scored.resize(k);
    return scored;
}

// ---------------------------------------------------------------------------
// Dense cosine retrieval over CPC-definition embeddings (allowed-set
// construction). Vectors are ingested precomputed and L2-normalized on load.
// ---------------------------------------------------------------------------

struct EmbeddingMatrix {
    std::vector<std::string> codes;           // row -> CPC code
    std::vector<std::vector<double>> rows;    // L2-normalized
    std::map<std::string, std::size_t> code_to_row;
    std::size_t dim = 0;
};

namespace detail {

inline void normalize_dense(std::vector<double>& v, const std::string& what) {
    double norm2 = 0.0;
    for (double x : v) norm2 += x * x;
    if (norm2 <= 0.0) throw ZeroVector("zero embedding vector for " + what);
    double inv = 1.0 / std::sqrt(norm2);
    for (double& x : v) x *= inv;
}

}  // namespace detail

// JSONL rows: {"code": str, "vector": [float,...]}
inline EmbeddingMatrix load_embeddings(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open embeddings file: " + path);
    EmbeddingMatrix m;
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
        std::string code = taxonomy::normalize_code(j.at("code").get<std::string>());
        std::vector<double> vec = j.at("vector").get<std::vector<double>>();
        if (m.dim == 0) m.dim = vec.size();
        if (vec.size() != m.dim || vec.empty())
            throw DimensionMismatch(path + ":" + std::to_string(lineno) + ": expected dim " +
                                    std::to_string(m.dim));
        detail::normalize_dense(vec, code);
        if (!m.code_to_row.emplace(code, m.rows.size()).second)
            throw DuplicateCode(path + ": duplicate embedding for " + code);
        m.codes.push_back(code);
        m.rows.push_back(std::move(vec));
    }
    if (m.rows.empty()) throw ParseError(path + ": no embeddings");
    return m;
}

struct AllowedLabelSet {
    std::string patent_id;
    std::vector<std::pair<std::string, double>> ranked;  // (code, score), nonincreasing

    bool contains(const std::string& code) const {
        for (const auto& [c, _] : ranked)
            if (c == code) return true;
        return false;
    }
    std::set<std::string> codes() const {
        std::set<std::string> out;
        for (const auto& [c, _] : ranked) out.insert(c);
        return out;
    }
};

// Top-k codes by dot product against a normalized query; ties lexicographic.
inline AllowedLabelSet allowed_set(const std::vector<double>& query_vec,
                                   const EmbeddingMatrix& matrix, std::size_t k = 20,
                                   const std::string& patent_id = {}) {
    if (k == 0) throw ConfigError("allowed_set: k must be >= 1");
    if (query_vec.size() != matrix.dim)
        throw DimensionMismatch("allowed_set: query dim " + std::to_string(query_vec.size()) +
                                " vs matrix dim " + std::to_string(matrix.dim));
    std::vector<double> q = query_vec;
    detail::normalize_dense(q, "query " + patent_id);

    std::vector<std::pair<std::string, double>> scored;
    scored.reserve(matrix.rows.size());
    for (std::size_t r = 0; r < matrix.rows.size(); ++r) {
        double dot = 0.0;
        for (std::size_t i = 0; i < matrix.dim; ++i) dot += q[i] * matrix.rows[r][i];
        scored.emplace_back(matrix.codes[r], dot);
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (scored.size() > k) scored.resize(k);
    AllowedLabelSet out;
    out.patent_id = patent_id;
    out.ranked = std::move(scored);
    return out;
}

// Query vectors keyed by patent id, same JSONL schema with "id" instead of "code".
inline std::map<std::string, std::vector<double>> load_query_vectors(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open query vectors file: " + path);
    std::map<std::string, std::vector<double>> out;
    std::size_t dim = 0;
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
        std::string id = j.at("id").get<std::string>();
        std::vector<double> vec = j.at("vector").get<std::vector<double>>();
        if (dim == 0) dim = vec.size();
        if (vec.size() != dim || vec.empty())
            throw DimensionMismatch(path + ":" + std::to_string(lineno) + ": expected dim " +
                                    std::to_string(dim));
        if (!out.emplace(id, std::move(vec)).second)
            throw DuplicateKey(path + ": duplicate query vector for " + id);
    }
    if (out.empty()) throw ParseError(path + ": no query vectors");
    return out;
}

}  // namespace patentcls::retrieval

#endif
