#include "chainbound/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstring>

namespace chainbound::csv {

namespace {

std::string to_chars_string(double v, std::chars_format fmt, int precision) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::to_chars_result res = precision < 0
                                   ? std::to_chars(buf, buf + sizeof(buf), v)
                                   : std::to_chars(buf, buf + sizeof(buf), v, fmt, precision);
    return std::string(buf, res.ptr);
}

}  // namespace

std::string format_double(double v) { return to_chars_string(v, std::chars_format::general, 17); }

std::string format_shortest(double v) { return to_chars_string(v, std::chars_format::general, -1); }

std::string join_row(const std::vector<std::string>& fields) {
    std::string row;
    for (size_t i = 0; i < fields.size(); ++i) {
        if (i) row += ',';
        row += fields[i];
    }
    return row;
}

}  // namespace chainbound::csv
