// Copyright 2026 The mrbnn Authors
// SPDX-License-Identifier: Apache-2.0

#include "mrbnn/csv.hpp"

#include "mrbnn/errors.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace mrbnn {

std::string format_sig9(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    int decimals = 8;
    if (v != 0.0) {
        const int e = static_cast<int>(std::floor(std::log10(std::abs(v))));
        decimals = std::max(0, 8 - e);
    }
    const int n = std::snprintf(nullptr, 0, "%.*f", decimals, v);
    std::vector<char> buf(static_cast<std::size_t>(n) + 1);
    std::snprintf(buf.data(), buf.size(), "%.*f", decimals, v);
    std::string out(buf.data(), static_cast<std::size_t>(n));
    if (out == "-0" || out.find_first_not_of("-0.") == std::string::npos) {
        if (out[0] == '-') out.erase(0, 1);
    }
    return out;
}

double parse_double(std::string_view field) {
    const std::string s(field);
    if (s == "nan") return NAN;
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) throw DataError("not a number: '" + s + "'");
    return v;
}

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        fields.emplace_back(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

std::vector<std::string> split_lines(std::string_view text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        const std::size_t nl = text.find('\n', start);
        if (nl == std::string_view::npos) {
            lines.emplace_back(text.substr(start));
            break;
        }
        lines.emplace_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    return lines;
}

} // namespace mrbnn
