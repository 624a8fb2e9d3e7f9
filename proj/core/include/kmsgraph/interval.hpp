#pragma once

#include <mpfr.h>

#include <string>

#include "kmsgraph/errors.hpp"
#include "kmsgraph/numeric.hpp"

namespace kmsgraph {

// Working mantissa precision in bits for newly created intervals.
unsigned interval_precision();
void set_interval_precision(unsigned bits);

// RAII scope for a temporary precision change.
struct PrecisionGuard {
  explicit PrecisionGuard(unsigned bits);
  ~PrecisionGuard();
  PrecisionGuard(const PrecisionGuard&) = delete;
  PrecisionGuard& operator=(const PrecisionGuard&) = delete;

 private:
  unsigned saved_;
};

// Closed interval [lo, hi] with mpfr endpoints under directed rounding.
// Every operation returns an interval containing the exact result.
class Interval {
 public:
  Interval();  // [0, 0]
  Interval(long v);  // NOLINT: implicit by design, exact
  explicit Interval(const Rational& q);
  explicit Interval(const BigInt& z);
  Interval(const Interval& o);
  Interval(Interval&& o) noexcept;
  Interval& operator=(const Interval& o);
  Interval& operator=(Interval&& o) noexcept;
  ~Interval();

  // Point value from a decimal literal, outward rounded by one ulp.
  static Interval from_decimal(const std::string& s);
  static Interval from_endpoints(const Rational& lo, const Rational& hi);
  static Interval hull(const Interval& a, const Interval& b);
  // enclosure of max(x, y): [max(a.lo, b.lo), max(a.hi, b.hi)]
  static Interval max_of(const Interval& a, const Interval& b);
  // [lower_source.lo, upper_source.hi]; endpoints must be ordered.
  static Interval combine(const Interval& lower_source, const Interval& upper_source);
  static Interval pos_infinity();

  friend Interval operator+(const Interval& a, const Interval& b);
  friend Interval operator-(const Interval& a, const Interval& b);
  friend Interval operator*(const Interval& a, const Interval& b);
  // Division requires 0 outside b; throws PrecisionExhausted otherwise.
  friend Interval operator/(const Interval& a, const Interval& b);
  Interval operator-() const;
  Interval& operator+=(const Interval& o);
  Interval& operator-=(const Interval& o);
  Interval& operator*=(const Interval& o);

  static Interval exp_of(const Interval& x);
  static Interval log_of(const Interval& x);  // requires x.lo > 0
  static Interval sqrt_of(const Interval& x);
  // x^(1/n) for x > 0, n >= 1.
  static Interval nth_root(const Interval& x, unsigned long n);

  bool contains_zero() const;
  bool contains(const Rational& q) const;
  bool contains(const Interval& o) const;  // o subset of *this
  bool certainly_positive() const;  // lo > 0
  bool certainly_negative() const;  // hi < 0
  bool certainly_less(const Interval& o) const;  // hi < o.lo
  bool certainly_less(const Rational& q) const;
  bool certainly_greater(const Rational& q) const;
  bool is_finite() const;

  double lo_double() const;  // rounded down
  double hi_double() const;  // rounded up
  double mid_double() const;
  double width_double() const;  // rounded up

  // Decimal endpoint strings under directed rounding (lo down, hi up).
  std::string lo_string(int significant_digits = 21) const;
  std::string hi_string(int significant_digits = 21) const;
  std::string to_string(int significant_digits = 12) const;

  const mpfr_t& lo_raw() const { return lo_; }
  const mpfr_t& hi_raw() const { return hi_; }

 private:
  mpfr_t lo_, hi_;
  void init_here(unsigned bits);
};

// Upper bound for s * r / (1 - r) with s >= 0, valid when r.hi < 1.
// Returns [0, bound]; throws PrecisionExhausted when r.hi >= 1.
Interval geometric_tail(const Interval& block, const Interval& ratio);

}  // namespace kmsgraph
