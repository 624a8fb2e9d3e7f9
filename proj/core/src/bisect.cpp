#include "kmsgraph/bisect.hpp"

#include "kmsgraph/errors.hpp"

namespace kmsgraph {

BracketResult bisect_sign_change(const std::function<Interval(const Rational&)>& f,
                                 const Rational& lo, const Rational& hi,
                                 const Rational& tol, int max_iterations) {
  if (!(lo < hi)) throw BracketInvalid("bracket endpoints not ordered");
  BracketResult r;
  r.lo = lo;
  r.hi = hi;

  Interval flo = f(lo);
  Interval fhi = f(hi);
  r.evaluations = 2;
  int sign_lo;
  if (flo.certainly_negative() && fhi.certainly_positive()) {
    sign_lo = -1;
  } else if (flo.certainly_positive() && fhi.certainly_negative()) {
    sign_lo = +1;
  } else {
    throw BracketInvalid("no certified sign change over bracket");
  }

  for (int it = 0; it < max_iterations; ++it) {
    if (r.hi - r.lo <= tol) {
      r.decided = true;
      return r;
    }
    Rational mid = (r.lo + r.hi) / 2;
    Interval fm = f(mid);
    ++r.evaluations;
    if (fm.certainly_negative()) {
      (sign_lo < 0 ? r.lo : r.hi) = mid;
    } else if (fm.certainly_positive()) {
      (sign_lo < 0 ? r.hi : r.lo) = mid;
    } else {
      return r;  // sign not decidable at this precision; bracket still valid
    }
  }
  r.decided = (r.hi - r.lo <= tol);
  return r;
}

}  // namespace kmsgraph
