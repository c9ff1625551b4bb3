#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace changedyn::csv {

// RFC-4180: quoted fields may contain commas, doubled quotes, and newlines.
std::vector<std::vector<std::string>> read_all(std::istream& in);

std::string format_row(const std::vector<std::string>& fields);

// 17 significant digits, enough to round-trip a double exactly.
std::string format_double(double v);

}  // namespace changedyn::csv
