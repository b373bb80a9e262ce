#ifndef QKDLM_CSV_HPP
#define QKDLM_CSV_HPP

#include "qkdlm/errors.hpp"
#include "qkdlm/optimizer.hpp"

#include <cstdio>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace qkdlm {

inline constexpr const char* kCsvHeader =
    "distance_km,scheme,mu_opt,nu_opt,rate,raw_rate,flags";

/// One parsed CSV row; numeric fields keep their emitted textual form so a
/// parse/emit round trip is byte-identical.
struct CsvRow {
    std::string distance_km;
    std::string scheme;
    std::string mu_opt;
    std::string nu_opt;   ///< empty when the scheme has no decoy intensity
    std::string rate;
    std::string raw_rate;
    std::string flags;
};

namespace detail {

inline std::string sci10(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9e", x);
    return buf;
}

inline std::string plain(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

} // namespace detail

inline CsvRow csv_row_from_point(const SweepPoint& p) {
    CsvRow row;
    row.distance_km = detail::plain(p.distance_km);
    row.scheme = to_string(p.scheme);
    row.mu_opt = detail::sci10(p.mu_opt);
    if (p.nu_opt) row.nu_opt = detail::sci10(*p.nu_opt);
    row.rate = detail::sci10(p.rate);
    row.raw_rate = detail::sci10(p.raw_rate);
    row.flags = p.clamp_flags.to_string();
    return row;
}

inline std::string emit_csv(const std::vector<CsvRow>& rows) {
    std::string out = kCsvHeader;
    out += '\n';
    for (const auto& r : rows) {
        out += r.distance_km;
        out += ',';
        out += r.scheme;
        out += ',';
        out += r.mu_opt;
        out += ',';
        out += r.nu_opt;
        out += ',';
        out += r.rate;
        out += ',';
        out += r.raw_rate;
        out += ',';
        out += r.flags;
        out += '\n';
    }
    return out;
}

inline std::string emit_csv(const std::vector<SweepPoint>& points) {
    std::vector<CsvRow> rows;
    rows.reserve(points.size());
    for (const auto& p : points) rows.push_back(csv_row_from_point(p));
    return emit_csv(rows);
}

inline std::vector<CsvRow> parse_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader)
        throw usage_error("csv: missing or unexpected header row");
    std::vector<CsvRow> rows;
    while (std::getline(in, line)) {
        std::vector<std::string> fields;
        std::string field;
        std::istringstream ls(line);
        while (std::getline(ls, field, ',')) fields.push_back(field);
        while (fields.size() < 7) fields.emplace_back();  // trailing empties
        if (fields.size() != 7)
            throw usage_error("csv: expected 7 fields, got row '" + line + "'");
        rows.push_back({fields[0], fields[1], fields[2], fields[3], fields[4],
                        fields[5], fields[6]});
    }
    return rows;
}

inline std::vector<CsvRow> parse_csv(const std::string& text) {
    std::istringstream in(text);
    return parse_csv(in);
}

} // namespace qkdlm

#endif
