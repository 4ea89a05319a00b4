#pragma once

// Minimal RFC 4180 delimited-text reading and writing, plus the numeric
// formatting used by every table this library emits.

#include <rmkt/error.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace rmkt::csv {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    [[nodiscard]] std::optional<std::size_t> column(std::string_view name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        return std::nullopt;
    }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

}  // namespace detail

/// Parses delimited text. The first record is the header; blank lines are
/// skipped. Quoted fields may contain delimiters, doubled quotes and newlines.
inline Table parse(std::string_view text, char delimiter = ',') {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool field_quoted = false;
    bool record_has_content = false;

    auto end_field = [&] {
        record.push_back(field_quoted ? field : std::string(detail::trim(field)));
        field.clear();
        field_quoted = false;
    };
    auto end_record = [&] {
        end_field();
        if (record_has_content) records.push_back(std::move(record));
        record.clear();
        record_has_content = false;
    };

    // Strip a UTF-8 byte order mark.
    if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

    for (std::size_t i = 0; i < text.size(); ++i) {
        char const c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }
        if (c == '"' && detail::trim(field).empty()) {
            field.clear();
            in_quotes = true;
            field_quoted = true;
            record_has_content = true;
        } else if (c == delimiter) {
            end_field();
            record_has_content = true;
        } else if (c == '\n') {
            end_record();
        } else if (c == '\r') {
            // handled by trim / CRLF
        } else {
            field.push_back(c);
            if (c != ' ' && c != '\t') record_has_content = true;
        }
    }
    if (in_quotes) fail(Errc::ParseError, "unterminated quoted field");
    if (record_has_content || !field.empty()) end_record();

    Table table;
    if (records.empty()) fail(Errc::ParseError, "missing header row");
    table.header = std::move(records.front());
    table.rows.assign(std::make_move_iterator(records.begin() + 1), std::make_move_iterator(records.end()));
    return table;
}

inline Table read_file(std::string const& path, char delimiter = ',') {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Errc::Io, "cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str(), delimiter);
}

inline std::string quote(std::string_view field, char delimiter = ',') {
    bool const needs = field.find_first_of(std::string{delimiter, '"', '\n', '\r'}) != std::string_view::npos ||
                       (!field.empty() && (field.front() == ' ' || field.back() == ' '));
    if (!needs) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

inline void write_row(std::ostream& out, std::vector<std::string> const& fields, char delimiter = ',') {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out << delimiter;
        out << quote(fields[i], delimiter);
    }
    out << '\n';
}

/// Shortest representation that round-trips to the same double.
inline std::string format_double(double value) {
    if (std::isnan(value)) return "NA";
    if (value == 0.0) return "0";
    char buf[64];
    auto const res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

/// Fixed-precision formatting for human-facing tables.
inline std::string format_fixed(double value, int digits) {
    if (std::isnan(value)) return "NA";
    char buf[64];
    auto const res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, digits);
    std::string s(buf, res.ptr);
    if (s.starts_with("-") && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
    return s;
}

inline std::optional<double> parse_double(std::string_view s) {
    s = detail::trim(s);
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    double value = 0.0;
    auto const res = std::from_chars(s.data(), s.data() + s.size(), value);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) return std::nullopt;
    return value;
}

}  // namespace rmkt::csv
