#pragma once

#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace canex {

using Rational = boost::multiprecision::cpp_rational;

/// Parses "p/q", an integer, or a finite decimal such as "0.05" into an exact rational.
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& r);

inline double to_double(const Rational& r) { return r.convert_to<double>(); }
inline double to_double(double x) { return x; }

inline Rational abs_value(const Rational& r) { return r < 0 ? Rational(-r) : r; }
inline double abs_value(double x) { return x < 0 ? -x : x; }

}  // namespace canex
