#include "kmsgraph/numeric.hpp"

#include <stdexcept>

namespace kmsgraph {

Rational parse_rational(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  for (char c : s) {
    if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '/' || c == '-' || c == '+')) {
      throw std::invalid_argument("bad rational literal: " + s);
    }
  }
  try {
    Rational q(s);
    return q;
  } catch (const std::exception&) {
    throw std::invalid_argument("bad rational literal: " + s);
  }
}

std::string rational_to_string(const Rational& q) {
  if (denominator(q) == 1) return numerator(q).str();
  return numerator(q).str() + "/" + denominator(q).str();
}

Rational rational_gcd(const Rational& x, const Rational& y) {
  if (x == 0 || y == 0) throw std::invalid_argument("rational_gcd of zero");
  const BigInt nx = abs(numerator(x)), dx = denominator(x);
  const BigInt ny = abs(numerator(y)), dy = denominator(y);
  BigInt num = gcd(BigInt(nx * dy), BigInt(ny * dx));
  return Rational(num, BigInt(dx * dy));
}

}  // namespace kmsgraph
