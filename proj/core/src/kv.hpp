#pragma once

// Internal flat key=value file helpers shared by manifest and config parsing.

#include <string>
#include <utility>
#include <vector>

#include "gasca/errors.hpp"

namespace gasca::detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

/// Parses "key=value" lines; '#' starts a comment, blank lines are skipped.
inline std::vector<std::pair<std::string, std::string>> parse_kv_text(const std::string& text,
                                                                      const std::string& origin) {
    std::vector<std::pair<std::string, std::string>> out;
    std::size_t pos = 0;
    int line_no = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string line = text.substr(pos, eol == std::string::npos ? std::string::npos : eol - pos);
        pos = eol == std::string::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected key=value, got '" + line + "'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
        out.emplace_back(std::move(key), std::move(value));
    }
    return out;
}

long long parse_int(const std::string& value, const std::string& key);
unsigned long long parse_uint(const std::string& value, const std::string& key);
double parse_double(const std::string& value, const std::string& key);
bool parse_bool(const std::string& value, const std::string& key);

std::string read_text_file(const std::string& path);

}  // namespace gasca::detail
