#pragma once

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "l1inf/matrix.hpp"

namespace l1inf::io {

/// Unreadable file or malformed content. line and column are 1-based; zero
/// when not applicable.
class IoError : public std::runtime_error {
public:
    IoError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
        : std::runtime_error(format(what, line, column)), line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    static std::string format(const std::string& what, std::size_t line, std::size_t column) {
        if (line == 0) {
            return what;
        }
        std::string out = "line " + std::to_string(line);
        if (column != 0) {
            out += ", column " + std::to_string(column);
        }
        return out + ": " + what;
    }

    std::size_t line_;
    std::size_t column_;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& field, std::size_t line, std::size_t column) {
    const std::string tok = trim(field);
    if (tok.empty()) {
        throw IoError("empty field", line, column);
    }
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size()) {
        throw IoError("not a number: '" + tok + "'", line, column);
    }
    if (errno == ERANGE && std::isinf(v)) {
        throw IoError("value out of range: '" + tok + "'", line, column);
    }
    if (!std::isfinite(v)) {
        throw IoError("non-finite value: '" + tok + "'", line, column);
    }
    return v;
}

} // namespace detail

/// Comma-separated, no header, one matrix row per line. Blank lines are
/// skipped. Every row must have the same number of fields.
inline DenseMatrix read_matrix_csv(std::istream& in) {
    std::vector<double> data;
    std::size_t cols = 0;
    std::size_t rows = 0;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) {
            continue;
        }
        std::size_t count = 0;
        std::size_t start = 0;
        for (;;) {
            const auto comma = line.find(',', start);
            const std::string field =
                line.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
            ++count;
            data.push_back(detail::parse_double(field, lineno, count));
            if (comma == std::string::npos) {
                break;
            }
            start = comma + 1;
        }
        if (rows == 0) {
            cols = count;
        } else if (count != cols) {
            throw IoError("expected " + std::to_string(cols) + " columns but found " +
                              std::to_string(count),
                          lineno, std::min(count, cols) + 1);
        }
        ++rows;
    }
    if (rows == 0) {
        throw IoError("matrix file is empty");
    }
    return DenseMatrix(rows, cols, std::move(data));
}

inline DenseMatrix read_matrix_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path + "' for reading");
    }
    try {
        return read_matrix_csv(in);
    } catch (const IoError& e) {
        throw IoError(path + ": " + e.what());
    }
}

/// 17 significant digits, enough to round-trip any double exactly.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_matrix_csv(std::ostream& out, const DenseMatrix& m) {
    std::string line;
    for (std::size_t r = 0; r < m.rows(); ++r) {
        line.clear();
        for (std::size_t c = 0; c < m.cols(); ++c) {
            if (c) {
                line += ',';
            }
            line += format_double(m(r, c));
        }
        line += '\n';
        out << line;
    }
}

inline void write_matrix_csv(const std::string& path, const DenseMatrix& m) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    write_matrix_csv(out, m);
    if (!out) {
        throw IoError("write to '" + path + "' failed");
    }
}

/// One integer label per non-blank line.
inline std::vector<long long> read_labels(std::istream& in) {
    std::vector<long long> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string tok = detail::trim(line);
        if (tok.empty()) {
            continue;
        }
        errno = 0;
        char* end = nullptr;
        const long long v = std::strtoll(tok.c_str(), &end, 10);
        if (end != tok.c_str() + tok.size() || errno == ERANGE) {
            throw IoError("not an integer label: '" + tok + "'", lineno, 1);
        }
        out.push_back(v);
    }
    if (out.empty()) {
        throw IoError("label file is empty");
    }
    return out;
}

inline std::vector<long long> read_labels(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path + "' for reading");
    }
    try {
        return read_labels(in);
    } catch (const IoError& e) {
        throw IoError(path + ": " + e.what());
    }
}

template <class Range>
void write_lines(const std::string& path, const Range& values) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    for (const auto& v : values) {
        out << v << '\n';
    }
    if (!out) {
        throw IoError("write to '" + path + "' failed");
    }
}

} // namespace l1inf::io
