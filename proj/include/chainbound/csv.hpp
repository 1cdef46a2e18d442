#pragma once

#include <string>
#include <vector>

namespace chainbound::csv {

// 17 significant digits, locale independent. Used for all report output.
std::string format_double(double v);

// Shortest representation that round-trips bit-exactly. Used when
// serializing chain documents.
std::string format_shortest(double v);

std::string join_row(const std::vector<std::string>& fields);

}  // namespace chainbound::csv
