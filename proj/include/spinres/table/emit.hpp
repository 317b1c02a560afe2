// emit.hpp: result tables and their CSV / JSON / SVG renderings.
//
// CSV layout: '#'-prefixed "key: value" metadata lines, one header line, then
// rows. Doubles are written with %.17g so they round-trip exactly; NaN is
// written as "nan" in CSV and null in JSON.

#pragma once

#include "spinres/errors.hpp"

#include <json.hpp>  // nlohmann::json, vendored

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace spinres {

inline constexpr const char* kVersion = "1.0.0";

using Cell = std::variant<double, std::string>;

struct Table {
    std::string kind;  // e.g. "rd-steady"; used in the JSON schema tag
    std::vector<std::pair<std::string, std::string>> metadata;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    std::size_t column_index(const std::string& name) const {
        auto it = std::find(columns.begin(), columns.end(), name);
        if (it == columns.end()) throw ArgumentError("Table: no column '" + name + "'");
        return static_cast<std::size_t>(it - columns.begin());
    }

    double number(std::size_t row, const std::string& col) const {
        const Cell& c = rows.at(row).at(column_index(col));
        if (const double* d = std::get_if<double>(&c)) return *d;
        return std::numeric_limits<double>::quiet_NaN();
    }

    std::string text(std::size_t row, const std::string& col) const {
        const Cell& c = rows.at(row).at(column_index(col));
        if (const std::string* s = std::get_if<std::string>(&c)) return *s;
        return {};
    }

    void add_meta(std::string key, std::string value) { metadata.emplace_back(std::move(key), std::move(value)); }

    void add_meta(std::string key, double value) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", value);
        metadata.emplace_back(std::move(key), buf);
    }
};

enum class Format { csv, json, svg };

inline Format parse_format(const std::string& s) {
    if (s == "csv") return Format::csv;
    if (s == "json") return Format::json;
    if (s == "svg") return Format::svg;
    throw ArgumentError("unknown format '" + s + "' (expected csv, json or svg)");
}

// ----- CSV -----

inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

inline void write_csv(std::ostream& os, const Table& t) {
    for (const auto& [k, v] : t.metadata) os << "# " << k << ": " << v << '\n';
    for (std::size_t c = 0; c < t.columns.size(); ++c) os << (c ? "," : "") << csv_escape(t.columns[c]);
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) os << ',';
            if (const double* d = std::get_if<double>(&row[c])) os << format_double(*d);
            else os << csv_escape(std::get<std::string>(row[c]));
        }
        os << '\n';
    }
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                cur += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

inline Cell parse_cell(const std::string& s) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s.empty()) return s;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() + s.size()) return v;
    return s;
}

} // namespace detail

inline Table read_csv(std::istream& is) {
    Table t;
    std::string line;
    bool header = false;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!header && line.rfind("#", 0) == 0) {
            const auto body = line.substr(line.size() > 1 && line[1] == ' ' ? 2 : 1);
            const auto colon = body.find(": ");
            if (colon == std::string::npos) t.metadata.emplace_back(body, "");
            else t.metadata.emplace_back(body.substr(0, colon), body.substr(colon + 2));
            continue;
        }
        if (!header) {
            t.columns = detail::split_csv_line(line);
            header = true;
            continue;
        }
        if (line.empty()) continue;
        std::vector<Cell> row;
        for (const auto& f : detail::split_csv_line(line)) row.push_back(detail::parse_cell(f));
        if (row.size() != t.columns.size()) throw IoError("read_csv: row width differs from header");
        t.rows.push_back(std::move(row));
    }
    if (!header) throw IoError("read_csv: missing header line");
    return t;
}

// ----- JSON -----

inline nlohmann::ordered_json to_json(const Table& t) {
    nlohmann::ordered_json j;
    j["schema"] = "spinres." + (t.kind.empty() ? std::string("table") : t.kind) + "/1";
    j["version"] = kVersion;
    nlohmann::ordered_json meta = nlohmann::ordered_json::object();
    for (const auto& [k, v] : t.metadata) meta[k] = v;
    j["metadata"] = meta;
    j["columns"] = t.columns;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
        nlohmann::ordered_json r = nlohmann::ordered_json::array();
        for (const auto& c : row) {
            if (const double* d = std::get_if<double>(&c)) {
                if (std::isfinite(*d)) r.push_back(*d);
                else r.push_back(nullptr);
            } else {
                r.push_back(std::get<std::string>(c));
            }
        }
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    return j;
}

inline void write_json(std::ostream& os, const Table& t) { os << to_json(t).dump(2) << '\n'; }

// ----- SVG -----

struct PlotSpec {
    std::string x;
    std::vector<std::string> y;  // empty: every other numeric column
    std::string title;
};

inline std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

// Line plot of y columns against x; rows with non-finite values break lines.
inline void write_svg(std::ostream& os, const Table& t, PlotSpec spec) {
    const double W = 640, H = 420, ml = 70, mr = 20, mt = 30, mb = 50;
    if (spec.x.empty() && !t.columns.empty()) spec.x = t.columns.front();
    if (spec.y.empty()) {
        for (const auto& c : t.columns) {
            if (c == spec.x) continue;
            const bool numeric = std::any_of(t.rows.begin(), t.rows.end(), [&](const auto& r) {
                const Cell& cell = r[t.column_index(c)];
                return std::holds_alternative<double>(cell) && std::isfinite(std::get<double>(cell));
            });
            if (numeric) spec.y.push_back(c);
        }
    }
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    auto value = [&](std::size_t r, const std::string& c) { return t.number(r, c); };
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const double x = spec.x.empty() ? 0.0 : value(r, spec.x);
        if (!std::isfinite(x)) continue;
        for (const auto& c : spec.y) {
            const double y = value(r, c);
            if (!std::isfinite(y)) continue;
            x0 = std::min(x0, x);
            x1 = std::max(x1, x);
            y0 = std::min(y0, y);
            y1 = std::max(y1, y);
        }
    }
    if (!(x1 > x0)) { x0 -= 0.5; x1 += 0.5; }
    if (!(y1 > y0)) { y0 -= 0.5; y1 += 0.5; }
    if (!std::isfinite(x0)) { x0 = 0; x1 = 1; y0 = 0; y1 = 1; }
    auto px = [&](double x) { return ml + (x - x0) / (x1 - x0) * (W - ml - mr); };
    auto py = [&](double y) { return H - mb - (y - y0) / (y1 - y0) * (H - mt - mb); };

    os << std::setprecision(6);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
       << ' ' << H << "\">\n";
    os << "  <title>" << xml_escape(spec.title.empty() ? t.kind : spec.title) << "</title>\n";
    os << "  <rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    os << "  <line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr << "\" y2=\"" << H - mb
       << "\" stroke=\"black\"/>\n";
    os << "  <line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << H - mb << "\" stroke=\"black\"/>\n";
    os << "  <text x=\"" << (W + ml) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << xml_escape(spec.x)
       << "</text>\n";
    std::string ylabel;
    for (const auto& c : spec.y) ylabel += (ylabel.empty() ? "" : ", ") + c;
    os << "  <text x=\"16\" y=\"" << (H - mb + mt) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
       << (H - mb + mt) / 2 << ")\">" << xml_escape(ylabel) << "</text>\n";
    os << "  <text x=\"" << ml << "\" y=\"" << H - mb + 16 << "\" text-anchor=\"middle\">" << x0 << "</text>\n";
    os << "  <text x=\"" << W - mr << "\" y=\"" << H - mb + 16 << "\" text-anchor=\"middle\">" << x1 << "</text>\n";
    os << "  <text x=\"" << ml - 6 << "\" y=\"" << H - mb << "\" text-anchor=\"end\">" << y0 << "</text>\n";
    os << "  <text x=\"" << ml - 6 << "\" y=\"" << mt + 4 << "\" text-anchor=\"end\">" << y1 << "</text>\n";
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    for (std::size_t k = 0; k < spec.y.size(); ++k) {
        std::string pts;
        auto flush = [&] {
            if (pts.empty()) return;
            os << "  <polyline fill=\"none\" stroke=\"" << palette[k % 6] << "\" points=\"" << pts << "\"/>\n";
            pts.clear();
        };
        for (std::size_t r = 0; r < t.rows.size(); ++r) {
            const double x = value(r, spec.x), y = value(r, spec.y[k]);
            if (!std::isfinite(x) || !std::isfinite(y)) {
                flush();
                continue;
            }
            std::ostringstream p;
            p << std::setprecision(6) << px(x) << ',' << py(y) << ' ';
            pts += p.str();
        }
        flush();
    }
    os << "</svg>\n";
}

// ----- files -----

inline void emit(const Table& t, Format f, const std::string& path, const PlotSpec& plot = {}) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open '" + path + "' for writing");
    switch (f) {
        case Format::csv: write_csv(os, t); break;
        case Format::json: write_json(os, t); break;
        case Format::svg: write_svg(os, t, plot); break;
    }
    os.flush();
    if (!os) throw IoError("write to '" + path + "' failed");
}

inline std::string render(const Table& t, Format f, const PlotSpec& plot = {}) {
    std::ostringstream os;
    switch (f) {
        case Format::csv: write_csv(os, t); break;
        case Format::json: write_json(os, t); break;
        case Format::svg: write_svg(os, t, plot); break;
    }
    return os.str();
}

} // namespace spinres
