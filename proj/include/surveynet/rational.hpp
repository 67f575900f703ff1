#pragma once

#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace surveynet {

/// Exact score arithmetic. Band edges are compared with exact <=.
using Rational = boost::multiprecision::cpp_rational;

/// Canonical text form: "7", "-3/4".
std::string to_string(const Rational& value);

/// Accepts "7", "-3/4", "2.5". Throws std::invalid_argument otherwise.
Rational parse_rational(std::string_view text);

/// Decimal rendering for human-facing text; exact when the denominator is 2^a 5^b.
std::string to_decimal(const Rational& value, int max_fraction_digits = 4);

double to_double(const Rational& value);

/// Exact conversion of a finite double.
Rational from_double(double value);

} // namespace surveynet
