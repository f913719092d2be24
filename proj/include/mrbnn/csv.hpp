// Copyright 2026 The mrbnn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace mrbnn {

/// Fixed notation with nine significant digits; "nan"/"inf"/"-inf" otherwise.
std::string format_sig9(double v);

double parse_double(std::string_view field);

std::vector<std::string> split_csv_line(std::string_view line);

/// Splits on '\n'; a trailing empty line is dropped.
std::vector<std::string> split_lines(std::string_view text);

} // namespace mrbnn
