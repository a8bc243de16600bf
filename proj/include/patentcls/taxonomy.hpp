#ifndef PATENTCLS_TAXONOMY_HPP
#define PATENTCLS_TAXONOMY_HPP

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "patentcls/error.hpp"

// CPC codes at the three levels used throughout: section (1 char),
// class (3 chars), subclass (4 chars, e.g. G06F).

namespace patentcls::taxonomy {

enum class Level { Section, Class, Subclass };

inline bool valid_section(char c) {
    return (c >= 'A' && c <= 'H') || c == 'Y';
}

inline bool is_canonical(const std::string& code) {
    return code.size() == 4 && valid_section(code[0]) &&
           std::isdigit(static_cast<unsigned char>(code[1])) &&
           std::isdigit(static_cast<unsigned char>(code[2])) &&
           code[3] >= 'A' && code[3] <= 'Z';
}

// Normalize a raw label to the 4-character subclass level:
// uppercase, drop any "/" suffix, truncate to 4 chars, validate.
inline std::string normalize_code(const std::string& raw) {
    std::string s;
    s.reserve(raw.size());
    for (char c : raw) {
        if (c == '/') break;
        s.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    }
    // a "/" may be preceded by group digits and whitespace; strip trailing junk
    // only via the 4-char truncation below
    if (s.size() > 4) s.resize(4);
    if (!is_canonical(s))
        throw InvalidCode("not a valid CPC subclass code: '" + raw + "'");
    return s;
}

inline bool try_normalize_code(const std::string& raw, std::string& out) {
    try {
        out = normalize_code(raw);
        return true;
    } catch (const InvalidCode&) {
        return false;
    }
}

inline std::string prefix_at(const std::string& code, Level level) {
    switch (level) {
        case Level::Section: return code.substr(0, 1);
        case Level::Class: return code.substr(0, 3);
        case Level::Subclass: return code;
    }
    return code;
}

// anc(c) = {c, class prefix, section prefix}
inline std::set<std::string> ancestors(const std::string& code) {
    return {code, code.substr(0, 3), code.substr(0, 1)};
}

inline std::set<std::string> expand_label_set(const std::set<std::string>& labels,
                                              Level level) {
    std::set<std::string> out;
    for (const auto& c : labels) out.insert(prefix_at(c, level));
    return out;
}

struct DefinitionCatalog {
    std::map<std::string, std::string> entries;  // canonical code -> definition
    std::string source_path;

    bool contains(const std::string& code) const { return entries.count(code) > 0; }
    const std::string* find(const std::string& code) const {
        auto it = entries.find(code);
        return it == entries.end() ? nullptr : &it->second;
    }
    std::size_t size() const { return entries.size(); }
};

inline std::string collapse_whitespace(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    bool in_ws = true;  // trims leading whitespace
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!in_ws) out.push_back(' ');
            in_ws = true;
        } else {
            out.push_back(c);
            in_ws = false;
        }
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
}

// Definitions file: one `CODE<TAB>definition` per line, '#' lines ignored.
inline DefinitionCatalog load_definitions(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open definitions file: " + path);
    DefinitionCatalog cat;
    cat.source_path = path;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw ParseError(path + ":" + std::to_string(lineno) + ": expected CODE<TAB>definition");
        std::string code;
        try {
            code = normalize_code(line.substr(0, tab));
        } catch (const InvalidCode& e) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
        std::string def = collapse_whitespace(line.substr(tab + 1));
        if (def.empty())
            throw ParseError(path + ":" + std::to_string(lineno) + ": empty definition for " + code);
        if (!cat.entries.emplace(code, def).second)
            throw DuplicateCode(path + ":" + std::to_string(lineno) + ": duplicate code " + code);
    }
    return cat;
}

}  // namespace patentcls::taxonomy

#endif
