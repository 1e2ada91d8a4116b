#pragma once

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace qca {

using json = nlohmann::json;

// Minimal TOML-subset reader for experiment configs: [tables], [[arrays of
// tables]], key = value with strings, numbers, booleans and flat arrays.
// Errors carry the offending line number.

class ConfigError : public std::runtime_error {
  public:
    ConfigError(int line, const std::string& what)
        : std::runtime_error("config line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

  private:
    int line_;
};

namespace detail {

inline std::string strip(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline json parse_scalar(const std::string& tok, int line) {
    std::string t = strip(tok);
    if (t.empty()) throw ConfigError(line, "empty value");
    if (t.front() == '"') {
        if (t.size() < 2 || t.back() != '"') throw ConfigError(line, "unterminated string");
        return json(t.substr(1, t.size() - 2));
    }
    if (t == "true") return json(true);
    if (t == "false") return json(false);
    // number: integer when it looks like one
    try {
        std::size_t pos = 0;
        if (t.find_first_of(".eE") == std::string::npos &&
            t.find_first_not_of("+-0123456789_") == std::string::npos) {
            long long v = std::stoll(t, &pos);
            if (pos == t.size()) return json(v);
        }
        double d = std::stod(t, &pos);
        if (pos == t.size()) return json(d);
    } catch (const std::exception&) {
    }
    throw ConfigError(line, "cannot parse value '" + t + "'");
}

inline json parse_value(const std::string& tok, int line) {
    std::string t = strip(tok);
    if (!t.empty() && t.front() == '[') {
        if (t.back() != ']') throw ConfigError(line, "unterminated array");
        json arr = json::array();
        std::string inner = t.substr(1, t.size() - 2);
        std::string cur;
        int depth = 0;
        bool instr = false;
        for (char c : inner) {
            if (c == '"') instr = !instr;
            if (!instr && c == '[') ++depth;
            if (!instr && c == ']') --depth;
            if (!instr && depth == 0 && c == ',') {
                if (!strip(cur).empty()) arr.push_back(parse_value(cur, line));
                cur.clear();
            } else {
                cur += c;
            }
        }
        if (!strip(cur).empty()) arr.push_back(parse_value(cur, line));
        return arr;
    }
    return parse_scalar(t, line);
}

inline std::string strip_comment(const std::string& s) {
    bool instr = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') instr = !instr;
        if (s[i] == '#' && !instr) return s.substr(0, i);
    }
    return s;
}

} // namespace detail

inline json parse_config_text(const std::string& text) {
    json root = json::object();
    json* scope = &root;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = detail::strip(detail::strip_comment(raw));
        if (s.empty()) continue;
        if (s.rfind("[[", 0) == 0) {
            if (s.size() < 5 || s.substr(s.size() - 2) != "]]")
                throw ConfigError(line, "malformed [[table]] header");
            std::string name = detail::strip(s.substr(2, s.size() - 4));
            if (name.empty()) throw ConfigError(line, "empty table name");
            if (!root.contains(name)) root[name] = json::array();
            if (!root[name].is_array()) throw ConfigError(line, "'" + name + "' is not an array");
            root[name].push_back(json::object());
            scope = &root[name].back();
            continue;
        }
        if (s.front() == '[') {
            if (s.back() != ']') throw ConfigError(line, "malformed [table] header");
            std::string name = detail::strip(s.substr(1, s.size() - 2));
            if (name.empty()) throw ConfigError(line, "empty table name");
            json* node = &root;
            std::size_t start = 0;
            while (true) {
                std::size_t dot = name.find('.', start);
                std::string part = name.substr(start, dot - start);
                if (part.empty()) throw ConfigError(line, "empty table path component");
                if (!node->contains(part)) (*node)[part] = json::object();
                node = &(*node)[part];
                if (dot == std::string::npos) break;
                start = dot + 1;
            }
            scope = node;
            continue;
        }
        std::size_t eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError(line, "expected key = value");
        std::string key = detail::strip(s.substr(0, eq));
        if (key.empty()) throw ConfigError(line, "empty key");
        (*scope)[key] = detail::parse_value(s.substr(eq + 1), line);
    }
    return root;
}

inline json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

} // namespace qca
