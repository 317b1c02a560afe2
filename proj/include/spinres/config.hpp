// config.hpp: flat "key = value" configuration files with command-line
// overrides. '#' starts a comment. Power values accept an explicit "mW" or
// "dBm" suffix.

#pragma once

#include "spinres/errors.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace spinres {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// P(mW) = 10^(dBm/10)
inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
inline double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }

inline double parse_number(const std::string& text, const std::string& what) {
    const std::string s = trim(text);
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) throw ArgumentError(what + ": not a number: '" + text + "'");
    return v;
}

// "22.4 mW", "13.5dBm" or a bare number (mW).
inline double parse_power_mw(const std::string& text, const std::string& what = "power") {
    std::string s = trim(text);
    auto ends_with = [&](const std::string& suf) {
        return s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
    };
    if (ends_with("dBm")) return dbm_to_mw(parse_number(s.substr(0, s.size() - 3), what));
    if (ends_with("mW")) return parse_number(s.substr(0, s.size() - 2), what);
    return parse_number(s, what);
}

class Config {
public:
    static Config parse(std::istream& is, const std::string& source = "<config>") {
        Config c;
        std::string line;
        int lineno = 0;
        while (std::getline(is, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            line = trim(line);
            if (line.empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                throw ArgumentError(source + ":" + std::to_string(lineno) + ": expected key = value");
            }
            const std::string key = trim(line.substr(0, eq));
            if (key.empty()) throw ArgumentError(source + ":" + std::to_string(lineno) + ": empty key");
            c.values_[key] = trim(line.substr(eq + 1));
        }
        return c;
    }

    static Config parse_string(const std::string& text) {
        std::istringstream is(text);
        return parse(is);
    }

    static Config load(const std::string& path) {
        std::ifstream is(path);
        if (!is) throw IoError("cannot open config '" + path + "'");
        return parse(is, path);
    }

    // "key=value"
    void apply_override(const std::string& kv) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || trim(kv.substr(0, eq)).empty()) {
            throw ArgumentError("override must look like key=value: '" + kv + "'");
        }
        values_[trim(kv.substr(0, eq))] = trim(kv.substr(eq + 1));
    }

    void set(const std::string& key, const std::string& value) { values_[key] = value; }

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    std::optional<std::string> get(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) return std::nullopt;
        return it->second;
    }

    std::string text(const std::string& key, const std::string& fallback) const { return get(key).value_or(fallback); }

    std::string require_text(const std::string& key) const {
        auto v = get(key);
        if (!v) throw ArgumentError("missing config key '" + key + "'");
        return *v;
    }

    double number(const std::string& key, double fallback) const {
        auto v = get(key);
        return v ? parse_number(*v, key) : fallback;
    }

    double require_number(const std::string& key) const { return parse_number(require_text(key), key); }

    std::optional<double> optional_number(const std::string& key) const {
        auto v = get(key);
        if (!v) return std::nullopt;
        return parse_number(*v, key);
    }

    double power_mw(const std::string& key, double fallback_mw) const {
        auto v = get(key);
        return v ? parse_power_mw(*v, key) : fallback_mw;
    }

    std::size_t count(const std::string& key, std::size_t fallback) const {
        auto v = get(key);
        if (!v) return fallback;
        const double d = parse_number(*v, key);
        if (!(d >= 0.0) || d != std::floor(d)) throw ArgumentError(key + ": expected a non-negative integer");
        return static_cast<std::size_t>(d);
    }

    bool flag(const std::string& key, bool fallback) const {
        auto v = get(key);
        if (!v) return fallback;
        if (*v == "true" || *v == "1" || *v == "yes") return true;
        if (*v == "false" || *v == "0" || *v == "no") return false;
        throw ArgumentError(key + ": expected true or false");
    }

    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

} // namespace spinres
