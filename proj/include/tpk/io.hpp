#pragma once

// Text formats:
//   histograms  one per line, comma-separated nonnegative integers, '#' comments
//   weights     header "mode: cost" or "mode: weight", then d lines of d reals
//   gram        m lines of m comma-separated reals

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "tpk/dense.hpp"
#include "tpk/error.hpp"
#include "tpk/histogram.hpp"
#include "tpk/polytope.hpp"

namespace tpk::io {

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split_commas(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(',', start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline Error parse_error(const std::string& source, std::size_t line, const std::string& what) {
    return Error(Errc::parse_error, source + ":" + std::to_string(line) + ": " + what);
}

inline count_t parse_count(std::string_view tok, const std::string& source, std::size_t line) {
    if (tok.empty()) throw parse_error(source, line, "empty field");
    count_t v = 0;
    for (char ch : tok) {
        if (ch < '0' || ch > '9')
            throw parse_error(source, line, "expected a nonnegative integer, got '" + std::string(tok) + "'");
        if (v > (std::numeric_limits<count_t>::max() - (ch - '0')) / 10)
            throw parse_error(source, line, "integer out of range");
        v = v * 10 + (ch - '0');
    }
    return v;
}

inline double parse_real(std::string_view tok, const std::string& source, std::size_t line) {
    const std::string s(tok);
    if (s.empty()) throw parse_error(source, line, "empty field");
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || std::isnan(v))
        throw parse_error(source, line, "expected a real number, got '" + s + "'");
    return v;
}

inline bool skippable(std::string_view line) {
    const auto t = trim(line);
    return t.empty() || t.front() == '#';
}

}  // namespace detail

struct NumberedHistogram {
    Histogram histogram;
    std::size_t line = 0;
};

inline std::vector<NumberedHistogram> read_histograms(std::istream& in, const std::string& source = "<input>") {
    std::vector<NumberedHistogram> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::skippable(line)) continue;
        std::vector<count_t> counts;
        for (auto tok : detail::split_commas(detail::trim(line)))
            counts.push_back(detail::parse_count(tok, source, lineno));
        out.push_back({Histogram(std::move(counts)), lineno});
    }
    return out;
}

inline Histogram parse_histogram(std::string_view text, const std::string& source = "<argument>") {
    std::vector<count_t> counts;
    for (auto tok : detail::split_commas(detail::trim(text))) counts.push_back(detail::parse_count(tok, source, 1));
    return Histogram(std::move(counts));
}

inline std::ifstream open_input(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error(Errc::parse_error, "cannot open '" + path + "'");
    return f;
}

inline std::vector<NumberedHistogram> read_histograms(const std::string& path) {
    auto f = open_input(path);
    return read_histograms(f, path);
}

inline std::optional<WeightOrigin> parse_weight_mode(std::string_view s) {
    if (s == "cost") return WeightOrigin::cost;
    if (s == "weight") return WeightOrigin::weight;
    return std::nullopt;
}

inline const char* weight_mode_name(WeightOrigin o) { return o == WeightOrigin::cost ? "cost" : "weight"; }

// The "mode:" header selects M or K; mode_override fills in for a missing
// header and must agree with a present one.
inline WeightSpec read_weights(std::istream& in, const std::string& source = "<weights>",
                               std::optional<WeightOrigin> mode_override = std::nullopt) {
    std::optional<WeightOrigin> mode;
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::skippable(line)) continue;
        const auto t = detail::trim(line);
        if (t.starts_with("mode:")) {
            if (mode || !rows.empty()) throw detail::parse_error(source, lineno, "misplaced mode header");
            mode = parse_weight_mode(detail::trim(t.substr(5)));
            if (!mode) throw detail::parse_error(source, lineno, "mode must be 'cost' or 'weight'");
            continue;
        }
        std::vector<double> row;
        for (auto tok : detail::split_commas(t)) row.push_back(detail::parse_real(tok, source, lineno));
        if (!rows.empty() && row.size() != rows.front().size())
            throw detail::parse_error(source, lineno, "expected " + std::to_string(rows.front().size()) + " columns");
        rows.push_back(std::move(row));
    }
    if (mode && mode_override && *mode != *mode_override)
        throw Error(Errc::parse_error, source + ": file header says mode '" + weight_mode_name(*mode) +
                                           "' but '" + weight_mode_name(*mode_override) + "' was requested");
    if (!mode) mode = mode_override;
    if (!mode) throw Error(Errc::parse_error, source + ": missing 'mode: cost' or 'mode: weight' header");
    if (rows.empty() || rows.size() != rows.front().size())
        throw Error(Errc::parse_error, source + ": weight matrix must be square with d >= 1");
    Matrix<double> a(rows.size(), rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows.size(); ++j) a(i, j) = rows[i][j];
    return *mode == WeightOrigin::cost ? WeightSpec::from_cost(std::move(a)) : WeightSpec::from_weight(std::move(a));
}

inline WeightSpec read_weights(const std::string& path, std::optional<WeightOrigin> mode_override = std::nullopt) {
    auto f = open_input(path);
    return read_weights(f, path, mode_override);
}

// Shortest-roundtrip is not available everywhere; %.17g always round-trips.
inline std::string format_real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_matrix_csv(std::ostream& out, const Matrix<double>& a) {
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            if (j) out << ',';
            out << format_real(a(i, j));
        }
        out << '\n';
    }
}

inline void write_table(std::ostream& out, const ContingencyTable& x) {
    for (std::size_t i = 0; i < x.dim(); ++i) {
        for (std::size_t j = 0; j < x.dim(); ++j) {
            if (j) out << ',';
            out << x(i, j);
        }
        out << '\n';
    }
}

inline Matrix<double> read_matrix_csv(std::istream& in, const std::string& source = "<gram>") {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::skippable(line)) continue;
        std::vector<double> row;
        for (auto tok : detail::split_commas(detail::trim(line))) row.push_back(detail::parse_real(tok, source, lineno));
        if (!rows.empty() && row.size() != rows.front().size())
            throw detail::parse_error(source, lineno, "expected " + std::to_string(rows.front().size()) + " columns");
        rows.push_back(std::move(row));
    }
    Matrix<double> a(rows.size(), rows.empty() ? 0 : rows.front().size());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) a(i, j) = rows[i][j];
    return a;
}

}  // namespace tpk::io
