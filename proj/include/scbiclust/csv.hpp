#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "scbiclust/error.hpp"
#include "scbiclust/matrix.hpp"

namespace scb {

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(field);
            field.clear();
        } else {
            field.push_back(c);
        }
    }
    fields.push_back(field);
    return fields;
}

inline bool parse_double(const std::string& field, double& out) {
    const char* begin = field.c_str();
    char* end = nullptr;
    out = std::strtod(begin, &end);
    if (end == begin) return false;
    while (*end == ' ' || *end == '\t') ++end;
    return *end == '\0';
}

}  // namespace detail

/// Reads a comma-delimited numeric matrix. Line numbers in errors are
/// 1-based and include the header line when present. Entries must be
/// finite reals.
inline DataMatrix read_csv(const std::string& path, bool has_header) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);

    std::vector<std::string> names;
    std::vector<std::vector<double>> rows;
    std::size_t expected_fields = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() && rows.empty() && names.empty()) continue;  // leading blanks
        if (line.empty()) break;                                      // trailing blank line

        auto fields = detail::split_csv_line(line);
        if (has_header && names.empty() && rows.empty()) {
            names.assign(fields.begin(), fields.end());
            expected_fields = fields.size();
            continue;
        }
        if (expected_fields == 0) expected_fields = fields.size();
        if (fields.size() != expected_fields) throw RaggedRows(line_no);

        std::vector<double> row(fields.size());
        for (std::size_t f = 0; f < fields.size(); ++f) {
            double v;
            if (!detail::parse_double(fields[f], v) || !std::isfinite(v))
                throw NonNumeric(line_no, f + 1);
            row[f] = v;
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw IoError("no data rows in " + path);

    DataMatrix X(rows.size(), expected_fields);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < expected_fields; ++j) X(i, j) = rows[i][j];
    if (!names.empty()) X.set_feature_names(std::move(names));
    return X;
}

/// Writes the matrix with 17 significant digits, which round-trips doubles
/// exactly through read_csv. A header row is emitted when names are set.
inline void write_csv(const DataMatrix& X, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    if (!X.feature_names().empty()) {
        for (std::size_t j = 0; j < X.p(); ++j) {
            if (j) out << ',';
            out << X.feature_names()[j];
        }
        out << '\n';
    }
    char buf[40];
    for (std::size_t i = 0; i < X.n(); ++i) {
        for (std::size_t j = 0; j < X.p(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", X(i, j));
            if (j) out << ',';
            out << buf;
        }
        out << '\n';
    }
    if (!out) throw IoError("failed writing " + path);
}

}  // namespace scb
