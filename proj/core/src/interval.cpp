#include "kmsgraph/interval.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <vector>

#include "kmsgraph/errors.hpp"

namespace kmsgraph {

namespace {
thread_local unsigned g_precision = 128;
}

unsigned interval_precision() { return g_precision; }

void set_interval_precision(unsigned bits) {
  if (bits < 24 || bits > 65536) throw std::invalid_argument("precision out of range [24, 65536]");
  g_precision = bits;
}

PrecisionGuard::PrecisionGuard(unsigned bits) : saved_(g_precision) { set_interval_precision(bits); }
PrecisionGuard::~PrecisionGuard() { g_precision = saved_; }

void Interval::init_here(unsigned bits) {
  mpfr_init2(lo_, bits);
  mpfr_init2(hi_, bits);
}

Interval::Interval() {
  init_here(g_precision);
  mpfr_set_zero(lo_, 1);
  mpfr_set_zero(hi_, 1);
}

Interval::Interval(long v) {
  init_here(g_precision);
  mpfr_set_si(lo_, v, MPFR_RNDD);
  mpfr_set_si(hi_, v, MPFR_RNDU);
}

Interval::Interval(const Rational& q) {
  init_here(g_precision);
  mpfr_set_q(lo_, q.backend().data(), MPFR_RNDD);
  mpfr_set_q(hi_, q.backend().data(), MPFR_RNDU);
}

Interval::Interval(const BigInt& z) {
  init_here(g_precision);
  mpfr_set_z(lo_, z.backend().data(), MPFR_RNDD);
  mpfr_set_z(hi_, z.backend().data(), MPFR_RNDU);
}

Interval::Interval(const Interval& o) {
  init_here(mpfr_get_prec(o.lo_));
  mpfr_set(lo_, o.lo_, MPFR_RNDD);
  mpfr_set(hi_, o.hi_, MPFR_RNDU);
}

Interval::Interval(Interval&& o) noexcept {
  init_here(mpfr_get_prec(o.lo_));
  mpfr_swap(lo_, o.lo_);
  mpfr_swap(hi_, o.hi_);
}

Interval& Interval::operator=(const Interval& o) {
  if (this == &o) return *this;
  mpfr_set_prec(lo_, mpfr_get_prec(o.lo_));
  mpfr_set_prec(hi_, mpfr_get_prec(o.hi_));
  mpfr_set(lo_, o.lo_, MPFR_RNDD);
  mpfr_set(hi_, o.hi_, MPFR_RNDU);
  return *this;
}

Interval& Interval::operator=(Interval&& o) noexcept {
  mpfr_swap(lo_, o.lo_);
  mpfr_swap(hi_, o.hi_);
  return *this;
}

Interval::~Interval() {
  mpfr_clear(lo_);
  mpfr_clear(hi_);
}

Interval Interval::from_decimal(const std::string& s) {
  Interval r;
  if (mpfr_set_str(r.lo_, s.c_str(), 10, MPFR_RNDD) != 0) {
    throw std::invalid_argument("bad decimal literal: " + s);
  }
  mpfr_set_str(r.hi_, s.c_str(), 10, MPFR_RNDU);
  return r;
}

Interval Interval::from_endpoints(const Rational& lo, const Rational& hi) {
  if (lo > hi) throw std::invalid_argument("interval endpoints reversed");
  Interval r;
  mpfr_set_q(r.lo_, lo.backend().data(), MPFR_RNDD);
  mpfr_set_q(r.hi_, hi.backend().data(), MPFR_RNDU);
  return r;
}

Interval Interval::hull(const Interval& a, const Interval& b) {
  Interval r;
  mpfr_min(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
  mpfr_max(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
  return r;
}

Interval Interval::max_of(const Interval& a, const Interval& b) {
  Interval r;
  mpfr_max(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
  mpfr_max(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
  return r;
}

Interval Interval::combine(const Interval& lower_source, const Interval& upper_source) {
  if (mpfr_cmp(lower_source.lo_, upper_source.hi_) > 0) {
    throw std::invalid_argument("combine: endpoints reversed");
  }
  Interval r;
  mpfr_set(r.lo_, lower_source.lo_, MPFR_RNDD);
  mpfr_set(r.hi_, upper_source.hi_, MPFR_RNDU);
  return r;
}

Interval Interval::pos_infinity() {
  Interval r;
  mpfr_set_inf(r.lo_, 1);
  mpfr_set_inf(r.hi_, 1);
  return r;
}

Interval operator+(const Interval& a, const Interval& b) {
  Interval r;
  mpfr_add(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
  mpfr_add(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
  return r;
}

Interval operator-(const Interval& a, const Interval& b) {
  Interval r;
  mpfr_sub(r.lo_, a.lo_, b.hi_, MPFR_RNDD);
  mpfr_sub(r.hi_, a.hi_, b.lo_, MPFR_RNDU);
  return r;
}

Interval Interval::operator-() const {
  Interval r;
  mpfr_neg(r.lo_, hi_, MPFR_RNDD);
  mpfr_neg(r.hi_, lo_, MPFR_RNDU);
  return r;
}

Interval operator*(const Interval& a, const Interval& b) {
  Interval r;
  const int al = mpfr_sgn(a.lo_), ah = mpfr_sgn(a.hi_);
  const int bl = mpfr_sgn(b.lo_), bh = mpfr_sgn(b.hi_);
  if (al >= 0) {
    if (bl >= 0) {
      mpfr_mul(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
      mpfr_mul(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
    } else if (bh <= 0) {
      mpfr_mul(r.lo_, a.hi_, b.lo_, MPFR_RNDD);
      mpfr_mul(r.hi_, a.lo_, b.hi_, MPFR_RNDU);
    } else {
      mpfr_mul(r.lo_, a.hi_, b.lo_, MPFR_RNDD);
      mpfr_mul(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
    }
  } else if (ah <= 0) {
    if (bl >= 0) {
      mpfr_mul(r.lo_, a.lo_, b.hi_, MPFR_RNDD);
      mpfr_mul(r.hi_, a.hi_, b.lo_, MPFR_RNDU);
    } else if (bh <= 0) {
      mpfr_mul(r.lo_, a.hi_, b.hi_, MPFR_RNDD);
      mpfr_mul(r.hi_, a.lo_, b.lo_, MPFR_RNDU);
    } else {
      mpfr_mul(r.lo_, a.lo_, b.hi_, MPFR_RNDD);
      mpfr_mul(r.hi_, a.lo_, b.lo_, MPFR_RNDU);
    }
  } else {
    if (bl >= 0) {
      mpfr_mul(r.lo_, a.lo_, b.hi_, MPFR_RNDD);
      mpfr_mul(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
    } else if (bh <= 0) {
      mpfr_mul(r.lo_, a.hi_, b.lo_, MPFR_RNDD);
      mpfr_mul(r.hi_, a.lo_, b.lo_, MPFR_RNDU);
    } else {
      mpfr_t t1, t2;
      mpfr_init2(t1, interval_precision());
      mpfr_init2(t2, interval_precision());
      mpfr_mul(t1, a.lo_, b.hi_, MPFR_RNDD);
      mpfr_mul(t2, a.hi_, b.lo_, MPFR_RNDD);
      mpfr_min(r.lo_, t1, t2, MPFR_RNDD);
      mpfr_mul(t1, a.lo_, b.lo_, MPFR_RNDU);
      mpfr_mul(t2, a.hi_, b.hi_, MPFR_RNDU);
      mpfr_max(r.hi_, t1, t2, MPFR_RNDU);
      mpfr_clear(t1);
      mpfr_clear(t2);
    }
  }
  return r;
}

Interval operator/(const Interval& a, const Interval& b) {
  if (b.contains_zero()) throw PrecisionExhausted("division by interval containing zero");
  // 1/b is monotone decreasing on intervals of constant sign.
  Interval inv;
  mpfr_ui_div(inv.lo_, 1, b.hi_, MPFR_RNDD);
  mpfr_ui_div(inv.hi_, 1, b.lo_, MPFR_RNDU);
  return a * inv;
}

Interval& Interval::operator+=(const Interval& o) { return *this = *this + o; }
Interval& Interval::operator-=(const Interval& o) { return *this = *this - o; }
Interval& Interval::operator*=(const Interval& o) { return *this = *this * o; }

Interval Interval::exp_of(const Interval& x) {
  Interval r;
  mpfr_exp(r.lo_, x.lo_, MPFR_RNDD);
  mpfr_exp(r.hi_, x.hi_, MPFR_RNDU);
  return r;
}

Interval Interval::log_of(const Interval& x) {
  if (mpfr_sgn(x.lo_) <= 0) throw PrecisionExhausted("log of interval reaching zero");
  Interval r;
  mpfr_log(r.lo_, x.lo_, MPFR_RNDD);
  mpfr_log(r.hi_, x.hi_, MPFR_RNDU);
  return r;
}

Interval Interval::sqrt_of(const Interval& x) {
  if (mpfr_sgn(x.lo_) < 0) throw PrecisionExhausted("sqrt of interval below zero");
  Interval r;
  mpfr_sqrt(r.lo_, x.lo_, MPFR_RNDD);
  mpfr_sqrt(r.hi_, x.hi_, MPFR_RNDU);
  return r;
}

Interval Interval::nth_root(const Interval& x, unsigned long n) {
  if (mpfr_sgn(x.lo_) <= 0) throw PrecisionExhausted("nth_root of interval reaching zero");
  Interval r;
#if MPFR_VERSION_MAJOR >= 4
  mpfr_rootn_ui(r.lo_, x.lo_, n, MPFR_RNDD);
  mpfr_rootn_ui(r.hi_, x.hi_, n, MPFR_RNDU);
#else
  mpfr_root(r.lo_, x.lo_, n, MPFR_RNDD);
  mpfr_root(r.hi_, x.hi_, n, MPFR_RNDU);
#endif
  return r;
}

bool Interval::contains_zero() const { return mpfr_sgn(lo_) <= 0 && mpfr_sgn(hi_) >= 0; }

bool Interval::contains(const Rational& q) const {
  return mpfr_cmp_q(lo_, q.backend().data()) <= 0 && mpfr_cmp_q(hi_, q.backend().data()) >= 0;
}

bool Interval::contains(const Interval& o) const {
  return mpfr_cmp(lo_, o.lo_) <= 0 && mpfr_cmp(hi_, o.hi_) >= 0;
}

bool Interval::certainly_positive() const { return mpfr_sgn(lo_) > 0; }
bool Interval::certainly_negative() const { return mpfr_sgn(hi_) < 0; }
bool Interval::certainly_less(const Interval& o) const { return mpfr_cmp(hi_, o.lo_) < 0; }
bool Interval::certainly_less(const Rational& q) const { return mpfr_cmp_q(hi_, q.backend().data()) < 0; }
bool Interval::certainly_greater(const Rational& q) const { return mpfr_cmp_q(lo_, q.backend().data()) > 0; }
bool Interval::is_finite() const { return mpfr_number_p(lo_) && mpfr_number_p(hi_); }

double Interval::lo_double() const { return mpfr_get_d(lo_, MPFR_RNDD); }
double Interval::hi_double() const { return mpfr_get_d(hi_, MPFR_RNDU); }
double Interval::mid_double() const { return 0.5 * (lo_double() + hi_double()); }

double Interval::width_double() const {
  mpfr_t w;
  mpfr_init2(w, 64);
  mpfr_sub(w, hi_, lo_, MPFR_RNDU);
  double d = mpfr_get_d(w, MPFR_RNDU);
  mpfr_clear(w);
  return d;
}

namespace {
std::string format_endpoint(const mpfr_t& x, int digits, mpfr_rnd_t rnd) {
  char buf[128];
  if (digits > 60) digits = 60;
  mpfr_snprintf(buf, sizeof buf, rnd == MPFR_RNDD ? "%.*RDe" : "%.*RUe", digits - 1, x);
  return std::string(buf);
}
}  // namespace

std::string Interval::lo_string(int significant_digits) const {
  return format_endpoint(lo_, significant_digits, MPFR_RNDD);
}

std::string Interval::hi_string(int significant_digits) const {
  return format_endpoint(hi_, significant_digits, MPFR_RNDU);
}

std::string Interval::to_string(int significant_digits) const {
  return "[" + lo_string(significant_digits) + ", " + hi_string(significant_digits) + "]";
}

Interval geometric_tail(const Interval& block, const Interval& ratio) {
  if (!(ratio.certainly_less(Rational(1)))) {
    throw PrecisionExhausted("geometric tail requires certified ratio < 1");
  }
  Interval one(1);
  Interval bound = block * ratio / (one - ratio);
  Interval r = Interval::hull(Interval(0), bound);
  return r;
}

}  // namespace kmsgraph
