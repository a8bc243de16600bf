#ifndef PATENTCLS_PROMPTING_HPP
#define PATENTCLS_PROMPTING_HPP

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "patentcls/corpus.hpp"
#include "patentcls/error.hpp"
#include "patentcls/retrieval.hpp"
#include "patentcls/taxonomy.hpp"

namespace patentcls::prompting {

enum class Regime { ZeroShot, FewShot, ZeroShotRag, FewShotRag };

inline std::string regime_name(Regime r) {
    switch (r) {
        case Regime::ZeroShot: return "zero_shot";
        case Regime::FewShot: return "few_shot";
        case Regime::ZeroShotRag: return "zero_shot_rag";
        case Regime::FewShotRag: return "few_shot_rag";
    }
    return "?";
}

inline Regime regime_from_name(const std::string& s) {
    if (s == "zero_shot") return Regime::ZeroShot;
    if (s == "few_shot") return Regime::FewShot;
    if (s == "zero_shot_rag") return Regime::ZeroShotRag;
    if (s == "few_shot_rag") return Regime::FewShotRag;
    throw ConfigError("unknown prompting regime: " + s);
}

inline bool regime_uses_fewshot(Regime r) {
    return r == Regime::FewShot || r == Regime::FewShotRag;
}
inline bool regime_uses_rag(Regime r) {
    return r == Regime::ZeroShotRag || r == Regime::FewShotRag;
}

// ---------------------------------------------------------------------------
// Canonical prompt templates. These strings are data: they must stay
// byte-identical across releases (see the checksum test). Placeholders
// {patent_text}, {fewshot_block}, {allowed_labels} are substituted at render
// time; the literal JSON braces in the OUTPUT FORMAT lines are not placeholders.
// ---------------------------------------------------------------------------

namespace templates {

inline constexpr const char* kZeroShotSystem =
    R"(You are an expert patent examiner for the Cooperative Patent Classification (CPC) system.
Your goal is HIGH RECALL classification: it is worse to miss a relevant CPC subclass
than to include a marginally relevant one.
You assign MULTIPLE CPC subclasses (multi-label) to each patent.
Return ONLY a strict JSON object with a single key "labels",
whose value is a list of CPC subclass codes (e.g. ["G06Q", "Y02D"]).
Return JSON ONLY (no extra text).)";

inline constexpr const char* kZeroShotUser =
    R"(Classify the following patent into CPC subclasses (4-character level like A01B, G06F, Y02D).

PATENT TEXT:
----------------------------------------
{patent_text}
----------------------------------------

TASK:
- Assign ALL relevant CPC subclasses (multi-label).
- Output between 1 and 7 CPC subclass codes.
- Do NOT invent codes that are not real CPC subclasses.

OUTPUT FORMAT (STRICT):
{"labels": ["G06F", "H04L"]})";

inline constexpr const char* kFewShotSystem =
    R"(You are an expert patent examiner for the Cooperative Patent Classification (CPC) system.
Your goal is HIGH RECALL classification: it is worse to miss a relevant CPC subclass
than to include a marginally relevant one.
You assign MULTIPLE CPC subclasses (multi-label) to each patent.
Return ONLY a strict JSON object with a single key "labels".
Return JSON ONLY (no extra text).)";

inline constexpr const char* kFewShotUser =
    R"(You will see some labeled examples first.

FEW-SHOT EXAMPLES:
{fewshot_block}

NOW CLASSIFY THIS PATENT:
----------------------------------------
{patent_text}
----------------------------------------

TASK:
- Assign ALL relevant CPC subclasses (4-character level).
- Output between 1 and 7 CPC subclass codes.

OUTPUT FORMAT (STRICT):
{"labels": ["G06F", "H04L"]})";

inline constexpr const char* kZeroShotRagSystem =
    R"(You are an expert patent examiner for the Cooperative Patent Classification (CPC) system.
Your goal is HIGH RECALL classification.
You assign MULTIPLE CPC subclasses to each patent.
You MUST only choose labels from the provided allowed set.
If a CPC subclass is plausibly relevant, you SHOULD include it; do NOT be overly conservative.
Reason hierarchically (Section -> Class -> Subclass), but output ONLY CPC subclass codes.
Return ONLY a strict JSON object with key "labels".)";

inline constexpr const char* kZeroShotRagUser =
    R"(PATENT TEXT:
----------------------------------------
{patent_text}
----------------------------------------

ALLOWED CPC SUBCLASSES (grouped hierarchically):
{allowed_labels}

TASK:
- Assign ALL relevant CPC subclasses.
- Use ONLY codes from the allowed list.
- Return at least one and at most 7 subclasses.

OUTPUT FORMAT (STRICT):
{"labels": ["G06F", "G06Q", "Y02D"]})";

inline constexpr const char* kFewShotRagSystem = kZeroShotRagSystem;

inline constexpr const char* kFewShotRagUser =
    R"(BELOW ARE SOME EXAMPLES OF HOW TO ASSIGN MULTIPLE CPC SUBCLASSES:
{fewshot_block}
END OF EXAMPLES.

NOW CLASSIFY THE FOLLOWING PATENT:

PATENT TEXT:
----------------------------------------
{patent_text}
----------------------------------------

ALLOWED CPC SUBCLASSES (grouped hierarchically):
{allowed_labels}

INSTRUCTIONS:
- Assign ALL CPC subclasses that are reasonably relevant.
- Prefer OVER-INCLUSION to under-inclusion.
- Use ONLY codes from the allowed list.
- Return at least one and at most 7 subclasses.

OUTPUT FORMAT (STRICT JSON ONLY):
{"labels": ["G06F", "G06Q", "Y02D"]})";

inline const char* system_template(Regime r) {
    switch (r) {
        case Regime::ZeroShot: return kZeroShotSystem;
        case Regime::FewShot: return kFewShotSystem;
        case Regime::ZeroShotRag: return kZeroShotRagSystem;
        case Regime::FewShotRag: return kFewShotRagSystem;
    }
    return "";
}

inline const char* user_template(Regime r) {
    switch (r) {
        case Regime::ZeroShot: return kZeroShotUser;
        case Regime::FewShot: return kFewShotUser;
        case Regime::ZeroShotRag: return kZeroShotRagUser;
        case Regime::FewShotRag: return kFewShotRagUser;
    }
    return "";
}

// FNV-1a over all eight template strings; frozen by the checksum test.
inline std::uint64_t checksum() {
    std::uint64_t h = 1469598103934665603ULL;
    for (Regime r : {Regime::ZeroShot, Regime::FewShot, Regime::ZeroShotRag, Regime::FewShotRag}) {
        for (const char* t : {system_template(r), user_template(r)}) {
            for (const char* p = t; *p; ++p) {
                h ^= static_cast<unsigned char>(*p);
                h *= 1099511628211ULL;
            }
        }
    }
    return h;
}

}  // namespace templates

struct FewShotConfig {
    std::vector<std::size_t> static_indices = {2, 27};
    std::size_t dynamic_count = 3;  // main-text default; the 2-example variant is configurable
};

struct PromptBundle {
    Regime regime = Regime::ZeroShot;
    std::string system_text;
    std::string user_text;
    std::string patent_id;
    std::vector<std::string> fewshot_ids;  // static first, then dynamic in rank order
    std::vector<std::string> allowed_codes;
};

// One few-shot example: the training text followed by its gold label JSON,
// labels in lexicographic order.
inline std::string render_example(const corpus::PatentRecord& rec) {
    std::string out = "PATENT TEXT:\n";
    out += corpus::document_text(rec);
    out += "\n{\"labels\": [";
    bool first = true;
    for (const auto& c : rec.gold_labels) {
        if (!first) out += ", ";
        out += '"' + c + '"';
        first = false;
    }
    out += "]}";
    return out;
}

struct FewShotBlock {
    std::string text;
    std::vector<std::string> example_ids;
};

inline FewShotBlock build_fewshot_block(const corpus::PatentCorpus& training,
                                        const FewShotConfig& config,
                                        const retrieval::TfidfIndex& tfidf,
                                        const std::string& target_text) {
    FewShotBlock block;
    std::set<std::string> exclude;
    std::vector<const corpus::PatentRecord*> examples;
    for (std::size_t idx : config.static_indices) {
        if (idx >= training.size())
            throw IndexOutOfRange("static few-shot index " + std::to_string(idx) +
                                  " out of range for corpus of size " +
                                  std::to_string(training.size()));
        examples.push_back(&training.records[idx]);
        exclude.insert(training.records[idx].id);
    }
    if (config.dynamic_count > 0) {
        std::map<std::string, std::size_t> id_to_row;
        for (std::size_t r = 0; r < training.size(); ++r) id_to_row[training.records[r].id] = r;
        for (const auto& hit : retrieval::tfidf_topk(tfidf, target_text, config.dynamic_count, exclude))
            examples.push_back(&training.records[id_to_row.at(hit.id)]);
    }
    for (std::size_t i = 0; i < examples.size(); ++i) {
        if (i > 0) block.text += "\n\n";
        block.text += render_example(*examples[i]);
        block.example_ids.push_back(examples[i]->id);
    }
    return block;
}

// Allowed codes grouped by section then class, codes ascending within a class;
// one `- CODE --- definition` line per code, definitions truncated to 220 chars.
inline std::string format_allowed_block(const retrieval::AllowedLabelSet& allowed,
                                        const taxonomy::DefinitionCatalog& catalog,
                                        std::vector<std::string>* missing_codes = nullptr) {
    std::map<std::string, std::map<std::string, std::set<std::string>>> grouped;
    for (const auto& [code, _] : allowed.ranked)
        grouped[code.substr(0, 1)][code.substr(0, 3)].insert(code);

    std::string out;
    bool first_section = true;
    for (const auto& [section, classes] : grouped) {
        if (!first_section) out += '\n';
        out += "SECTION " + section + ":";
        first_section = false;
        for (const auto& [cls, codes] : classes) {
            out += "\nCLASS " + cls + ":";
            for (const auto& code : codes) {
                const std::string* def = catalog.find(code);
                if (!def && missing_codes) missing_codes->push_back(code);
                std::string text = def ? *def : std::string{};
                if (text.size() > 220) text.resize(220);
                out += "\n- " + code + " --- " + text;
            }
        }
    }
    return out;
}

namespace detail {

inline void substitute(std::string& text, const std::string& placeholder,
                       const std::string& value) {
    auto pos = text.find(placeholder);
    while (pos != std::string::npos) {
        text.replace(pos, placeholder.size(), value);
        pos = text.find(placeholder, pos + value.size());
    }
}

}  // namespace detail

inline PromptBundle render_prompt(Regime regime, const corpus::PatentRecord& patent,
                                  const std::optional<FewShotBlock>& fewshot = std::nullopt,
                                  const std::optional<retrieval::AllowedLabelSet>& allowed = std::nullopt,
                                  const taxonomy::DefinitionCatalog* catalog = nullptr) {
    if (regime_uses_fewshot(regime) && (!fewshot || fewshot->text.empty()))
        throw MissingComponent("regime " + regime_name(regime) + " requires a few-shot block");
    if (!regime_uses_fewshot(regime) && fewshot)
        throw MissingComponent("regime " + regime_name(regime) + " does not take a few-shot block");
    if (regime_uses_rag(regime) && (!allowed || allowed->ranked.empty()))
        throw MissingComponent("regime " + regime_name(regime) + " requires an allowed set");
    if (!regime_uses_rag(regime) && allowed)
        throw MissingComponent("regime " + regime_name(regime) + " does not take an allowed set");
    if (regime_uses_rag(regime) && !catalog)
        throw MissingComponent("regime " + regime_name(regime) + " requires a definition catalog");

    PromptBundle bundle;
    bundle.regime = regime;
    bundle.patent_id = patent.id;
    bundle.system_text = templates::system_template(regime);
    bundle.user_text = templates::user_template(regime);

    detail::substitute(bundle.user_text, "{patent_text}", corpus::document_text(patent));
    if (fewshot) {
        detail::substitute(bundle.user_text, "{fewshot_block}", fewshot->text);
        bundle.fewshot_ids = fewshot->example_ids;
    }
    if (allowed) {
        detail::substitute(bundle.user_text, "{allowed_labels}",
                           format_allowed_block(*allowed, *catalog));
        for (const auto& [code, _] : allowed->ranked) bundle.allowed_codes.push_back(code);
    }
    return bundle;
}

}  // namespace patentcls::prompting

#endif
