#ifndef PATENTCLS_POSTPARSE_HPP
#define PATENTCLS_POSTPARSE_HPP

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "patentcls/error.hpp"
#include "patentcls/retrieval.hpp"
#include "patentcls/taxonomy.hpp"

// Parsing ladder for raw LLM generations: strict JSON, then first balanced
// JSON-like substring, then CPC-token scan, then top-1 allowed fallback.

namespace patentcls::postparse {

enum class ParsePath { StrictJson, RegexJson, TokenFallback, Top1Fallback, Empty };

inline std::string parse_path_name(ParsePath p) {
    switch (p) {
        case ParsePath::StrictJson: return "strict_json";
        case ParsePath::RegexJson: return "regex_json";
        case ParsePath::TokenFallback: return "token_fallback";
        case ParsePath::Top1Fallback: return "top1_fallback";
        case ParsePath::Empty: return "empty";
    }
    return "?";
}

struct ParseOutcome {
    std::vector<std::string> labels;  // model output order, unique, <= cap
    ParsePath path = ParsePath::Empty;
    std::vector<std::pair<std::string, std::string>> dropped;  // (raw token, reason)
};

namespace detail {

inline std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// Extracts the "labels" string list from a JSON object, or nullopt.
inline std::optional<std::vector<std::string>> labels_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("labels")) return std::nullopt;
    const auto& l = j["labels"];
    if (!l.is_array()) return std::nullopt;
    std::vector<std::string> out;
    for (const auto& item : l) {
        if (!item.is_string()) return std::nullopt;
        out.push_back(item.get<std::string>());
    }
    return out;
}

// First balanced {...} span, scanned left to right; nesting- and
// string-literal-aware.
inline std::optional<std::string> first_balanced_braces(const std::string& text) {
    for (std::size_t start = 0; start < text.size(); ++start) {
        if (text[start] != '{') continue;
        int depth = 0;
        bool in_string = false;
        for (std::size_t i = start; i < text.size(); ++i) {
            char c = text[i];
            if (in_string) {
                if (c == '\\')
                    ++i;
                else if (c == '"')
                    in_string = false;
            } else if (c == '"') {
                in_string = true;
            } else if (c == '{') {
                ++depth;
            } else if (c == '}') {
                if (--depth == 0) return text.substr(start, i - start + 1);
            }
        }
        // unbalanced from this '{'; try a later one (an inner span may balance)
    }
    return std::nullopt;
}

// CPC-like tokens at word boundaries: section letter + 2 digits + uppercase letter.
inline std::vector<std::string> scan_cpc_tokens(const std::string& text) {
    std::vector<std::string> tokens;
    auto is_word = [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    };
    for (std::size_t i = 0; i + 4 <= text.size(); ++i) {
        if (i > 0 && is_word(text[i - 1])) continue;
        if (i + 4 < text.size() && is_word(text[i + 4])) continue;
        std::string cand = text.substr(i, 4);
        if (taxonomy::is_canonical(cand)) tokens.push_back(cand);
    }
    return tokens;
}

}  // namespace detail

// Allowed-filter then first-`cap` truncation, order preserved.
inline std::vector<std::string> enforce_constraints(
    const std::vector<std::string>& labels,
    const std::optional<retrieval::AllowedLabelSet>& allowed, std::size_t cap,
    std::vector<std::pair<std::string, std::string>>* dropped = nullptr) {
    std::vector<std::string> out;
    for (const auto& l : labels) {
        if (allowed && !allowed->contains(l)) {
            if (dropped) dropped->emplace_back(l, "not_allowed");
            continue;
        }
        out.push_back(l);
    }
    if (out.size() > cap) out.resize(cap);
    return out;
}

inline ParseOutcome parse_output(const std::string& raw,
                                 const std::optional<retrieval::AllowedLabelSet>& allowed =
                                     std::nullopt,
                                 bool enforce_nonempty = false, std::size_t cap = 7) {
    if (cap == 0) throw ConfigError("parse_output: cap must be >= 1");
    ParseOutcome outcome;
    std::string text = detail::trim(raw);

    std::optional<std::vector<std::string>> raw_labels = detail::labels_from_json(text);
    if (raw_labels) {
        outcome.path = ParsePath::StrictJson;
    } else if (auto span = detail::first_balanced_braces(text)) {
        raw_labels = detail::labels_from_json(*span);
        if (raw_labels) outcome.path = ParsePath::RegexJson;
    }

    if (raw_labels) {
        std::set<std::string> seen;
        std::vector<std::string> normalized;
        for (const auto& tok : *raw_labels) {
            std::string code;
            if (!taxonomy::try_normalize_code(tok, code)) {
                outcome.dropped.emplace_back(tok, "invalid");
                continue;
            }
            if (!seen.insert(code).second) continue;  // dedup, first occurrence wins
            normalized.push_back(code);
        }
        outcome.labels = enforce_constraints(normalized, allowed, cap, &outcome.dropped);
    }

    if (outcome.labels.empty()) {
        if (!raw_labels) outcome.path = ParsePath::Empty;
        if (enforce_nonempty) {
            for (const auto& tok : detail::scan_cpc_tokens(raw)) {
                std::string code;
                if (!taxonomy::try_normalize_code(tok, code)) continue;
                if (allowed && !allowed->contains(code)) continue;
                outcome.labels = {code};
                outcome.path = ParsePath::TokenFallback;
                break;
            }
            if (outcome.labels.empty() && allowed && !allowed->ranked.empty()) {
                outcome.labels = {allowed->ranked.front().first};
                outcome.path = ParsePath::Top1Fallback;
            }
        }
        if (outcome.labels.empty()) outcome.path = ParsePath::Empty;
    }
    return outcome;
}

}  // namespace patentcls::postparse

#endif
