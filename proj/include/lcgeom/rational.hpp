#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace lcgeom {

using Rational = mpq_class;

// Nearest double (ties to even). mpq_get_d truncates, which breaks
// eval(parse("0.1")) == 0.1.
double to_double(const Rational& q);

// Exact decimal literal, e.g. "12.5e-3" -> 1/80. Returns false on malformed input.
bool parse_decimal(std::string_view text, Rational& out);

// Shortest exact decimal when the denominator is 2^a 5^b, otherwise "p/q".
std::string to_string(const Rational& q);

bool is_integer(const Rational& q);

}  // namespace lcgeom
