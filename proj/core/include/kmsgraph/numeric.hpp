#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <string>

namespace kmsgraph {

using Rational = boost::multiprecision::mpq_rational;
using BigInt = boost::multiprecision::mpz_int;

// Parses "p/q" or "p"; throws std::invalid_argument on malformed input.
Rational parse_rational(const std::string& s);

// Renders as "p/q", or "p" when the denominator is 1.
std::string rational_to_string(const Rational& q);

// gcd extended to positive rationals: the largest g with x, y in g*Z.
// Both arguments must be nonzero.
Rational rational_gcd(const Rational& x, const Rational& y);

inline Rational rational_abs(const Rational& x) { return x < 0 ? Rational(-x) : x; }

}  // namespace kmsgraph
