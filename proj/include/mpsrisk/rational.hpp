#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>
#include <string_view>

namespace mpsrisk {

// Unbounded exact rational. Prizes, probabilities and polygon vertices are all
// carried in this type; nothing that must hold as an identity is ever rounded.
using Rational = boost::multiprecision::cpp_rational;

// Parses "7", "-3", "77/2" or a plain decimal such as "38.5" / "0.25".
Rational parse_rational(std::string_view text);

// Canonical form: "num/den" in lowest terms, or just "num" when den == 1.
std::string format_rational(const Rational& value);

double to_double(const Rational& value);

// Exact conversion of a binary64 value (every finite double is a dyadic rational).
Rational from_double(double value);

inline Rational percent(long long p) { return Rational(p, 100); }

}  // namespace mpsrisk
