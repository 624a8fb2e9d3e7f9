#pragma once

#include <functional>

#include "kmsgraph/interval.hpp"
#include "kmsgraph/numeric.hpp"

namespace kmsgraph {

// Certified sign-change bisection.  `f` maps an exact rational point to a
// certified enclosure of f(x).  The bracket endpoints must have certified
// opposite signs; midpoints whose sign cannot be certified stop the
// refinement early (`decided` = false) while the bracket stays valid.
struct BracketResult {
  Rational lo, hi;
  bool decided = false;     // width <= tol reached with certified signs
  int evaluations = 0;
  Interval enclosure() const { return Interval::from_endpoints(lo, hi); }
};

BracketResult bisect_sign_change(const std::function<Interval(const Rational&)>& f,
                                 const Rational& lo, const Rational& hi,
                                 const Rational& tol, int max_iterations = 256);

}  // namespace kmsgraph
