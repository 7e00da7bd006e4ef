#pragma once

// Text plumbing for the CLI: full-precision number formatting, r/s grids,
// comma lists. Column order of every CSV is fixed by the command emitting it.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <gbs_page/errors.hpp>

namespace gbs_cli {

using gbs_page::ValidationError;

/// 17 significant digits: enough to round-trip any double.
inline std::string fmt(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline double parse_double(const std::string& text, const char* what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size() || !std::isfinite(v)) {
        throw ValidationError(std::string(what) + ": not a finite number: \"" + text + "\"");
    }
    return v;
}

inline std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(text);
    while (std::getline(in, cur, sep)) parts.push_back(cur);
    if (!text.empty() && text.back() == sep) parts.emplace_back();
    return parts;
}

inline std::vector<double> parse_double_list(const std::string& text, const char* what) {
    std::vector<double> out;
    for (const auto& p : split(text, ',')) out.push_back(parse_double(p, what));
    if (out.empty()) throw ValidationError(std::string(what) + ": empty list");
    return out;
}

/// "start:stop:step", both ends included (stop is kept when it lies within
/// step * 1e-9 of a grid point). A bare number is a one-point grid.
inline std::vector<double> parse_grid(const std::string& text, const char* what = "grid") {
    const auto parts = split(text, ':');
    if (parts.size() == 1) return {parse_double(parts[0], what)};
    if (parts.size() != 3) throw ValidationError(std::string(what) + ": expected start:stop:step, got \"" + text + "\"");
    const double start = parse_double(parts[0], what);
    const double stop = parse_double(parts[1], what);
    const double step = parse_double(parts[2], what);
    if (!(step > 0.0)) throw ValidationError(std::string(what) + ": step must be > 0");
    if (stop < start) throw ValidationError(std::string(what) + ": stop must be >= start");
    const double span = (stop - start) / step;
    if (span > 1e6) throw ValidationError(std::string(what) + ": more than a million points");
    const auto count = static_cast<long>(std::floor(span + 1e-9)) + 1;
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(count));
    for (long j = 0; j < count; ++j) out.push_back(start + static_cast<double>(j) * step);
    // Snap the last point onto stop so 0:1:0.1 ends at exactly 1.
    if (std::abs(out.back() - stop) <= 1e-9 * step) out.back() = stop;
    return out;
}

/// Whitespace- or comma-separated numbers from a file.
inline std::vector<double> read_number_file(const std::string& path, const char* what) {
    std::ifstream in(path);
    if (!in) throw ValidationError(std::string(what) + ": cannot open \"" + path + "\"");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    for (char& c : text) {
        if (c == ',' || c == '\n' || c == '\r' || c == '\t') c = ' ';
    }
    std::istringstream tokens(text);
    std::vector<double> out;
    std::string tok;
    while (tokens >> tok) out.push_back(parse_double(tok, what));
    if (out.empty()) throw ValidationError(std::string(what) + ": no numbers in \"" + path + "\"");
    return out;
}

/// Writes `text` to `path` ("-" = the given stream) in one go.
inline void write_text(const std::string& path, const std::string& text, std::ostream& stdout_stream) {
    if (path == "-") {
        stdout_stream << text;
        stdout_stream.flush();
        return;
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw ValidationError("cannot open \"" + path + "\" for writing");
    f << text;
    if (!f) throw ValidationError("write to \"" + path + "\" failed");
}

/// Accumulates CSV rows; the header is fixed at construction.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : columns_(header.size()) { row(header); }

    void row(const std::vector<std::string>& cells) {
        if (cells.size() != columns_) throw std::logic_error("CsvTable: wrong number of cells");
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (c) text_ += ',';
            text_ += cells[c];
        }
        text_ += '\n';
    }

    const std::string& text() const { return text_; }

private:
    std::size_t columns_;
    std::string text_;
};

}  // namespace gbs_cli
