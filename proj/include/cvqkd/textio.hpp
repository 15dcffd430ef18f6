#pragma once

#include <string>
#include <vector>

namespace cvqkd::textio {

// Canonical number formatting for every CSV and report the tools emit:
// 9 significant digits, scientific notation below 1e-4 in magnitude
// (printf %.9g), locale-independent. Golden tests compare bytes.
std::string format_number(double value);

std::string join_csv(const std::vector<std::string>& fields);

// Minimal CSV reader for the tools' own outputs (no quoting or escapes in
// any emitted format).
std::vector<std::string> split_csv(const std::string& line);

}  // namespace cvqkd::textio
