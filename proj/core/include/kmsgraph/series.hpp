#pragma once

#include <string>
#include <vector>

#include "kmsgraph/bisect.hpp"
#include "kmsgraph/graph.hpp"
#include "kmsgraph/interval.hpp"

namespace kmsgraph {

// Certified loop-weight and first-return series of A(beta) at a root vertex.
// L[n] contains A(beta)^n_{vv}; the renewal identity
//   L[n] = sum_{k=1..n} f[k] L[n-k]
// defines the first-return weights f.
struct SeriesTable {
  std::string root;
  Interval beta;
  std::vector<Interval> L;
  std::vector<Interval> f;
  std::vector<BigInt> counts;  // exact closed-walk counts backing the support
  int n_max = 0;
  int exact_radius = 0;  // truncation radius; exact for all n <= 2*exact_radius
  bool has_f = false;
};

SeriesTable loop_weights(const GraphSpec& spec, const std::string& v,
                         const Interval& beta, int n_max);
void first_return_weights(SeriesTable& table);

// Exact closed-walk counts at v and their first-return decomposition.
std::vector<BigInt> loop_counts(const GraphSpec& spec, const std::string& v, int n_max);
std::vector<BigInt> first_return_counts(const std::vector<BigInt>& counts);

struct PeriodReport {
  int d = 0;
  int loops_seen = 0;
  int window = 0;
  bool stabilized = false;  // gcd unchanged over the last half of the window
};

// gcd of all loop lengths <= L_max at v; throws NoLoopFound.
int period(const GraphSpec& spec, const std::string& v, int L_max,
           PeriodReport* report = nullptr);

struct EntropyResult {
  int d_G = 0;
  Interval h;               // final reported enclosure
  Interval lower_certified; // max of supermultiplicative and partial-root bounds
  bool upper_heuristic = true;
  bool pattern_detected = false;
  int pattern_period = 0;
  int n_used = 0;
  std::string note;
};

// Gurevich entropy h = limsup (1/n) log c_n from exact loop counts.
EntropyResult gurevich_entropy(const GraphSpec& spec, const std::string& v, int n_max);

struct RecurrenceVerdict {
  enum class Kind { Transient, Recurrent, Supercritical, Undecided };
  Kind kind = Kind::Undecided;
  Interval partial;        // certified sum_{n<=n_used} f_n(beta)
  Interval total;          // partial plus certified tail; hi may be +inf
  int n_used = 0;
  bool tail_certified = false;
  Interval tail_ratio;     // observed per-period ratio bound backing the tail
};

std::string to_string(RecurrenceVerdict::Kind k);

RecurrenceVerdict classify_recurrence(const GraphSpec& spec, const std::string& v,
                                      const Interval& beta, int n_max,
                                      const Rational& tol = Rational(1, 1000000000));

// Reusable engine: the truncation and edge potentials are beta-independent,
// so bisection loops share them across evaluations.
class ReturnSeriesEngine {
 public:
  ReturnSeriesEngine(const GraphSpec& spec, const std::string& v, int n_max);

  // Certified enclosure of sum_n f_n(beta) with adaptive depth.
  RecurrenceVerdict evaluate(const Interval& beta, const Rational& tol) const;
  SeriesTable table(const Interval& beta, int n) const;
  int period() const { return d_; }
  int n_max() const { return n_max_; }

 private:
  GraphSpec spec_;
  std::string root_name_;
  Truncation tr_;
  int n_max_;
  int d_;
};

struct BetaCriticalResult {
  Rational lo, hi;          // exact bracket endpoints
  Interval bracket;         // enclosure of the critical inverse temperature
  bool achieved_tol = false;
  int evaluations = 0;
  std::string note;
};

// Bisection for the unique beta with sum_n f_n(beta) = 1.  Requires F >= 0
// with no zero-value cycle found by validation (monotone window), and a
// bracket whose left side is supercritical and right side transient.
BetaCriticalResult beta_critical(const GraphSpec& spec, const std::string& v,
                                 const Rational& bracket_lo, const Rational& bracket_hi,
                                 const Rational& tol, int n_max);

// Grid scan fallback for potentials where monotonicity is not guaranteed.
std::vector<RecurrenceVerdict> recurrence_scan(const GraphSpec& spec, const std::string& v,
                                               const std::vector<Interval>& betas, int n_max,
                                               const Rational& tol = Rational(1, 1000000000));

}  // namespace kmsgraph
