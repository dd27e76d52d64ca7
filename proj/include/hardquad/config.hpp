#pragma once

// Plain-text experiment configuration: `[section]` headers with
// `key = value` lines, UTF-8, `#` comments.  One section per experiment.
// Parsing validates sections, keys and value types against a fixed schema;
// unknown keys are rejected.  Serialization is canonical (fixed section and
// key order, normalized number rendering), so parse -> serialize -> parse
// is idempotent.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace hardquad {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::string format_double17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace config_detail {

enum class ValueType { Int, U64, Double, Bool, String, IntList };

struct KeySpec {
    const char* key;
    ValueType type;
};

inline const std::map<std::string, std::vector<KeySpec>>& schema() {
    static const std::map<std::string, std::vector<KeySpec>> s = {
        {"verify",
         {{"quad_tol", ValueType::Double}, {"grid_points", ValueType::Int}}},
        {"oracle",
         {{"samples", ValueType::Int},
          {"seed", ValueType::U64},
          {"quad_tol", ValueType::Double}}},
        {"euler",
         {{"steps", ValueType::IntList},
          {"replications", ValueType::Int},
          {"instance", ValueType::String},
          {"seed", ValueType::U64},
          {"quad_tol", ValueType::Double},
          {"u", ValueType::String},
          {"delta", ValueType::Double},
          {"x_delta", ValueType::Double}}},
        {"fool-sde",
         {{"n", ValueType::IntList},
          {"rule", ValueType::String},
          {"v", ValueType::String},
          {"quad_tol", ValueType::Double},
          {"u", ValueType::String},
          {"delta", ValueType::Double},
          {"x_delta", ValueType::Double}}},
        {"fool-quad",
         {{"n", ValueType::IntList},
          {"rule", ValueType::String},
          {"u", ValueType::String},
          {"quad_tol", ValueType::Double}}},
        {"bounds",
         {{"n", ValueType::IntList},
          {"u", ValueType::String},
          {"delta", ValueType::Double},
          {"x_delta", ValueType::Double},
          {"proof_constant", ValueType::Bool},
          {"quad_tol", ValueType::Double}}},
    };
    return s;
}

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            out.push_back(trim(s.substr(start, i - start)));
            start = i + 1;
        }
    }
    return out;
}

// canonical re-rendering also doubles as the type check
inline std::string canonicalize(const std::string& section, const std::string& key,
                                const std::string& raw) {
    const auto& spec = schema().at(section);
    const auto it = std::find_if(spec.begin(), spec.end(),
                                 [&](const KeySpec& k) { return key == k.key; });
    if (it == spec.end())
        throw ConfigError("unknown key '" + key + "' in section [" + section + "]");
    try {
        switch (it->type) {
            case ValueType::Int: {
                std::size_t pos = 0;
                const long long v = std::stoll(raw, &pos);
                if (pos != raw.size()) throw std::invalid_argument(raw);
                return std::to_string(v);
            }
            case ValueType::U64: {
                std::size_t pos = 0;
                const unsigned long long v = std::stoull(raw, &pos);
                if (pos != raw.size()) throw std::invalid_argument(raw);
                return std::to_string(v);
            }
            case ValueType::Double: {
                std::size_t pos = 0;
                const double v = std::stod(raw, &pos);
                if (pos != raw.size()) throw std::invalid_argument(raw);
                return format_double17(v);
            }
            case ValueType::Bool: {
                if (raw == "true" || raw == "1") return "true";
                if (raw == "false" || raw == "0") return "false";
                throw std::invalid_argument(raw);
            }
            case ValueType::String:
                if (raw.empty()) throw std::invalid_argument("empty");
                return raw;
            case ValueType::IntList: {
                std::string out;
                for (const auto& part : split(raw, ',')) {
                    std::size_t pos = 0;
                    const long long v = std::stoll(part, &pos);
                    if (pos != part.size()) throw std::invalid_argument(part);
                    if (!out.empty()) out += ',';
                    out += std::to_string(v);
                }
                if (out.empty()) throw std::invalid_argument("empty list");
                return out;
            }
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        throw ConfigError("bad value '" + raw + "' for key '" + key + "' in section [" +
                          section + "]");
    }
    throw ConfigError("unreachable");
}

}  // namespace config_detail

struct ParsedConfig {
    // section -> key -> canonical value
    std::map<std::string, std::map<std::string, std::string>> sections;

    bool operator==(const ParsedConfig&) const = default;

    std::string get(const std::string& section, const std::string& key,
                    const std::string& fallback) const {
        const auto s = sections.find(section);
        if (s == sections.end()) return fallback;
        const auto k = s->second.find(key);
        return k == s->second.end() ? fallback : k->second;
    }
    double get_double(const std::string& section, const std::string& key, double fallback) const {
        const auto s = sections.find(section);
        if (s == sections.end()) return fallback;
        const auto k = s->second.find(key);
        return k == s->second.end() ? fallback : std::stod(k->second);
    }
    long long get_int(const std::string& section, const std::string& key,
                      long long fallback) const {
        const auto s = sections.find(section);
        if (s == sections.end()) return fallback;
        const auto k = s->second.find(key);
        return k == s->second.end() ? fallback : std::stoll(k->second);
    }
    std::uint64_t get_u64(const std::string& section, const std::string& key,
                          std::uint64_t fallback) const {
        const auto s = sections.find(section);
        if (s == sections.end()) return fallback;
        const auto k = s->second.find(key);
        return k == s->second.end() ? fallback : std::stoull(k->second);
    }
    bool get_bool(const std::string& section, const std::string& key, bool fallback) const {
        const auto s = sections.find(section);
        if (s == sections.end()) return fallback;
        const auto k = s->second.find(key);
        return k == s->second.end() ? fallback : (k->second == "true");
    }
    std::vector<int> get_int_list(const std::string& section, const std::string& key,
                                  std::vector<int> fallback) const {
        const auto s = sections.find(section);
        if (s == sections.end()) return fallback;
        const auto k = s->second.find(key);
        if (k == s->second.end()) return fallback;
        std::vector<int> out;
        for (const auto& part : config_detail::split(k->second, ','))
            out.push_back(static_cast<int>(std::stoll(part)));
        return out;
    }
};

inline ParsedConfig parse_config(const std::string& text) {
    ParsedConfig cfg;
    std::string section;
    int line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t end = text.find('\n', start);
        std::string line =
            end == std::string::npos ? text.substr(start) : text.substr(start, end - start);
        start = end == std::string::npos ? text.size() + 1 : end + 1;
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = config_detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(line_no) + ": malformed section header");
            section = config_detail::trim(line.substr(1, line.size() - 2));
            if (config_detail::schema().find(section) == config_detail::schema().end())
                throw ConfigError("line " + std::to_string(line_no) + ": unknown section [" +
                                  section + "]");
            cfg.sections[section];  // record even if empty
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        if (section.empty())
            throw ConfigError("line " + std::to_string(line_no) + ": key outside any section");
        const std::string key = config_detail::trim(line.substr(0, eq));
        const std::string raw = config_detail::trim(line.substr(eq + 1));
        cfg.sections[section][key] = config_detail::canonicalize(section, key, raw);
    }
    return cfg;
}

inline std::string serialize_config(const ParsedConfig& cfg) {
    std::string out;
    for (const auto& [section, keys] : config_detail::schema()) {
        const auto s = cfg.sections.find(section);
        if (s == cfg.sections.end()) continue;
        out += "[" + section + "]\n";
        for (const auto& spec : keys) {
            const auto k = s->second.find(spec.key);
            if (k != s->second.end()) out += std::string(spec.key) + " = " + k->second + "\n";
        }
        out += "\n";
    }
    return out;
}

}  // namespace hardquad
