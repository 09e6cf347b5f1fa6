#pragma once

// Minimal TOML-subset reader: [section] headers, key = value with numbers,
// booleans, "strings" and flat [arrays]; # comments. Parsed into JSON so the
// same schema serves config files and run manifests.

#include <cctype>
#include <fstream>
#include <sstream>
#include <string>

#include "cqed/common.hpp"
#include "json.hpp"

namespace cqed {

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::string strip_comment(const std::string& line) {
    char quote = 0;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quote) {
            if (ch == quote) quote = 0;
        } else if (ch == '"' || ch == '\'') {
            quote = ch;
        } else if (ch == '#') {
            return line.substr(0, i);
        }
    }
    return line;
}

inline nlohmann::json parse_scalar(const std::string& raw, int lineno) {
    const std::string v = trim(raw);
    auto fail = [&] { return UsageError("config line " + std::to_string(lineno) + ": cannot parse value '" + v + "'"); };
    if (v.empty()) throw fail();
    if (v.front() == '"' || v.front() == '\'') {
        if (v.size() < 2 || v.back() != v.front()) throw fail();
        return v.substr(1, v.size() - 2);
    }
    if (v == "true") return true;
    if (v == "false") return false;
    if (v == "inf" || v == "+inf") return kInf;
    const bool integral = v.find_first_of(".eE") == std::string::npos;
    try {
        std::size_t pos = 0;
        if (integral) {
            const long long x = std::stoll(v, &pos);
            if (pos == v.size()) return x;
        } else {
            const double x = std::stod(v, &pos);
            if (pos == v.size()) return x;
        }
    } catch (const std::exception&) {
    }
    throw fail();
}

}  // namespace detail

inline nlohmann::json parse_toml(std::istream& in) {
    nlohmann::json root = nlohmann::json::object();
    nlohmann::json* section = &root;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = detail::trim(detail::strip_comment(line));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw UsageError("config line " + std::to_string(lineno) + ": bad section header");
            const std::string name = detail::trim(line.substr(1, line.size() - 2));
            if (name.empty()) throw UsageError("config line " + std::to_string(lineno) + ": empty section name");
            if (!root.contains(name)) root[name] = nlohmann::json::object();
            section = &root[name];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw UsageError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string val = detail::trim(line.substr(eq + 1));
        if (key.empty()) throw UsageError("config line " + std::to_string(lineno) + ": empty key");
        if (!val.empty() && val.front() == '[') {
            if (val.back() != ']') throw UsageError("config line " + std::to_string(lineno) + ": unterminated array");
            nlohmann::json arr = nlohmann::json::array();
            std::stringstream items(val.substr(1, val.size() - 2));
            std::string item;
            while (std::getline(items, item, ',')) {
                if (!detail::trim(item).empty()) arr.push_back(detail::parse_scalar(item, lineno));
            }
            (*section)[key] = arr;
        } else {
            (*section)[key] = detail::parse_scalar(val, lineno);
        }
    }
    return root;
}

inline nlohmann::json load_toml(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file '" + path + "'");
    return parse_toml(in);
}

}  // namespace cqed
