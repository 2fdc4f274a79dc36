#pragma once

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "loadcast/errors.hpp"
#include "loadcast/series.hpp"
#include "loadcast/time.hpp"

namespace loadcast {

struct RawRow {
    HourStamp stamp;  // UTC when the timestamp carried an offset, naive otherwise
    double value;
    bool has_value;
    std::size_t row;  // 1-based data-row index (header not counted)
};

struct ParsedLoad {
    LoadSeries series;               // dense hourly index, keep-first values
    std::vector<RawRow> rows;        // every parseable row in file order
    std::vector<RawRow> duplicate_rows;  // all rows whose stamp occurs more than once
};

namespace detail {

inline std::string trim(std::string s) {
    auto notspace = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), notspace));
    s.erase(std::find_if(s.rbegin(), s.rend(), notspace).base(), s.end());
    return s;
}

inline double parse_value(const std::string& field, std::size_t row) {
    std::string t = trim(field);
    if (t.empty()) throw DataError("empty value");  // caller treats separately
    char* end = nullptr;
    double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size())
        throw DataError("unparseable value '" + t + "' in row " + std::to_string(row));
    return v;
}

}  // namespace detail

// Reads a `timestamp,load_mw` file into a canonical dense series plus the raw
// row list, leaving duplicate resolution to the wrangling stage (the series
// itself applies keep-first so it is usable stand-alone).
inline ParsedLoad parse_load_csv(const std::string& path, const CountryMeta& meta) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open load csv '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty load csv '" + path + "'");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim(line) != "timestamp,load_mw")
        throw DataError("bad header in '" + path + "': expected 'timestamp,load_mw'");

    ParsedLoad out;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (detail::trim(line).empty()) continue;
        ++row;
        auto comma = line.find(',');
        if (comma == std::string::npos)
            throw DataError("missing comma in row " + std::to_string(row) + " of '" + path + "'");
        std::string ts = detail::trim(line.substr(0, comma));
        std::string val = detail::trim(line.substr(comma + 1));
        ParsedTime pt;
        try {
            pt = parse_timestamp(ts);
        } catch (const DataError& e) {
            throw DataError(std::string(e.what()) + " in row " + std::to_string(row) + " of '" + path + "'");
        }
        RawRow r;
        r.stamp = pt.hour;
        r.row = row;
        if (val.empty()) {
            r.value = 0.0;
            r.has_value = false;
        } else {
            r.value = detail::parse_value(val, row);
            r.has_value = true;
        }
        out.rows.push_back(r);
    }
    if (out.rows.empty()) throw DataError("no data rows in '" + path + "'");

    HourStamp lo = out.rows.front().stamp, hi = out.rows.front().stamp;
    for (const auto& r : out.rows) {
        lo = std::min(lo, r.stamp);
        hi = std::max(hi, r.stamp);
    }
    auto n = static_cast<std::size_t>(hi - lo + 1);

    LoadSeries& s = out.series;
    s.country_code = meta.code;
    s.timezone_id = meta.timezone_id;
    s.start = lo;
    s.local_time = false;
    s.values.assign(n, 0.0);
    s.missing.assign(n, 1);

    std::vector<std::uint8_t> seen(n, 0);
    for (const auto& r : out.rows) {
        auto i = static_cast<std::size_t>(r.stamp - lo);
        if (seen[i]) continue;
        seen[i] = 1;
        if (r.has_value) {
            s.values[i] = r.value;
            s.missing[i] = 0;
        }
    }
    std::map<HourStamp, std::size_t> counts;
    for (const auto& r : out.rows) ++counts[r.stamp];
    for (const auto& r : out.rows)
        if (counts[r.stamp] > 1) out.duplicate_rows.push_back(r);
    validate_series(s);
    return out;
}

// Writes the dense series back out; missing hours keep their row with an
// empty value so the index stays explicit. UTC series get a 'Z' suffix,
// localized series are written as naive wall-clock stamps.
inline void write_load_csv(const LoadSeries& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << "timestamp,load_mw\n";
    char buf[64];
    for (std::size_t i = 0; i < s.size(); ++i) {
        std::string ts = format_hour(s.stamp_at(i));
        if (!s.local_time) ts += "Z";
        if (s.is_missing(i)) {
            out << ts << ",\n";
        } else {
            std::snprintf(buf, sizeof buf, "%.6f", s.values[i]);
            out << ts << ',' << buf << '\n';
        }
    }
    if (!out) throw DataError("write failed for '" + path + "'");
}

struct ManifestEntry {
    CountryMeta meta;
    std::string csv_path;
};

// Manifest rows: code,display_name,timezone_id,csv_path. Relative csv paths
// are resolved against the manifest's own directory.
inline std::vector<ManifestEntry> read_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open manifest '" + path + "'");
    std::string dir;
    auto slash = path.find_last_of('/');
    if (slash != std::string::npos) dir = path.substr(0, slash + 1);

    std::vector<ManifestEntry> entries;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (first && t == "code,display_name,timezone_id,csv_path") {
            first = false;
            continue;
        }
        first = false;
        std::vector<std::string> fields;
        std::size_t pos = 0;
        for (int f = 0; f < 3; ++f) {
            auto comma = t.find(',', pos);
            if (comma == std::string::npos)
                throw ConfigError("manifest row needs 4 fields: '" + t + "'");
            fields.push_back(detail::trim(t.substr(pos, comma - pos)));
            pos = comma + 1;
        }
        fields.push_back(detail::trim(t.substr(pos)));
        ManifestEntry e;
        e.meta.code = fields[0];
        e.meta.display_name = fields[1];
        e.meta.timezone_id = fields[2];
        e.csv_path = fields[3];
        if (e.meta.code.size() != 2)
            throw ConfigError("country code must be 2 characters: '" + e.meta.code + "'");
        if (!e.csv_path.empty() && e.csv_path[0] != '/') e.csv_path = dir + e.csv_path;
        entries.push_back(std::move(e));
    }
    if (entries.empty()) throw ConfigError("manifest '" + path + "' lists no countries");
    return entries;
}

inline void write_manifest(const std::vector<ManifestEntry>& entries, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << "code,display_name,timezone_id,csv_path\n";
    for (const auto& e : entries)
        out << e.meta.code << ',' << e.meta.display_name << ',' << e.meta.timezone_id << ','
            << e.csv_path << '\n';
}

}  // namespace loadcast
