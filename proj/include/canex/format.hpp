#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace canex {

/// Shortest round-trip decimal form of x, independent of locale.
inline std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

/// Scientific form with a fixed number of significant digits.
inline std::string format_number(double x, int digits) {
    if (!std::isfinite(x)) return format_number(x);
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::scientific, digits - 1);
    return std::string(buf, res.ptr);
}

}  // namespace canex
