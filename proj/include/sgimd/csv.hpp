#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace sgimd::csv {

/// Shortest round-trippable decimal form ("%.17g").
std::string number(double v);

std::vector<std::string> split(std::string_view line, char sep = ',');

/// Parses a double; throws FormatError with `what` as context.
double to_double(const std::string& s, const std::string& what);

}  // namespace sgimd::csv
