#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rmtherm/core.hpp"

namespace rmtherm::io {

using json = nlohmann::ordered_json;

class IoError : public Error {
public:
    using Error::Error;
};

enum class Format { csv, json };

inline std::string_view to_string(Format f) { return f == Format::csv ? "csv" : "json"; }

inline Format parse_format(std::string_view s) {
    if (s == "csv") return Format::csv;
    if (s == "json") return Format::json;
    throw InvalidArgument("unknown output format '" + std::string(s) + "' (expected csv or json)");
}

// 17 significant digits, enough to round-trip a double.
inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Column-major-agnostic table of JSON cells; numbers keep full precision in
// both output formats.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<json>> rows;

    explicit Table(std::vector<std::string> h = {}) : header(std::move(h)) {}

    void add(std::vector<json> row) {
        if (row.size() != header.size())
            throw InvalidArgument("table row has " + std::to_string(row.size()) + " cells, header has " +
                                  std::to_string(header.size()));
        rows.push_back(std::move(row));
    }
};

inline std::string csv_cell(const json& c) {
    if (c.is_number_float()) return format_number(c.get<double>());
    if (c.is_number()) return c.dump();
    if (c.is_boolean()) return c.get<bool>() ? "true" : "false";
    if (c.is_null()) return "nan";
    std::string s = c.is_string() ? c.get<std::string>() : c.dump();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) {
        if (ch == '"') q += '"';
        q += ch;
    }
    return q + "\"";
}

inline std::string to_csv(const Table& t) {
    std::ostringstream os;
    for (std::size_t i = 0; i < t.header.size(); ++i) os << (i ? "," : "") << t.header[i];
    os << '\n';
    for (const auto& r : t.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << csv_cell(r[i]);
        os << '\n';
    }
    return os.str();
}

inline json to_json(const Table& t) {
    json rows = json::array();
    for (const auto& r : t.rows) {
        json o = json::object();
        for (std::size_t i = 0; i < r.size(); ++i) {
            const json& c = r[i];
            // JSON has no inf/nan; keep them readable as strings.
            if (c.is_number_float() && !std::isfinite(c.get<double>()))
                o[t.header[i]] = format_number(c.get<double>());
            else
                o[t.header[i]] = c;
        }
        rows.push_back(std::move(o));
    }
    return json{{"columns", t.header}, {"rows", std::move(rows)}};
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    os << text;
    os.flush();
    if (!os) throw IoError("write to " + path.string() + " failed");
}

// Writes `stem`.csv or `stem`.json and returns the path.
inline std::filesystem::path write_table(const std::filesystem::path& stem, const Table& t, Format f) {
    std::filesystem::path p = stem;
    p += f == Format::csv ? ".csv" : ".json";
    write_text(p, f == Format::csv ? to_csv(t) : to_json(t).dump(2) + "\n");
    return p;
}

inline std::filesystem::path write_json(const std::filesystem::path& stem, const json& j) {
    std::filesystem::path p = stem;
    p += ".json";
    write_text(p, j.dump(2) + "\n");
    return p;
}

inline std::string read_text(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace rmtherm::io
