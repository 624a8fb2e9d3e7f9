#pragma once

#include <string>
#include <vector>

#include "kmsgraph/exits.hpp"
#include "kmsgraph/graph.hpp"
#include "kmsgraph/interval.hpp"
#include "kmsgraph/symbolic.hpp"

namespace kmsgraph {

// Closed subgroup of R generated by beta-scaled cycle-value differences.
struct ClosedSubgroup {
  enum class Kind { Zero, Cyclic, Dense };
  Kind kind = Kind::Zero;
  SymbolicReal generator_value;  // exact F-value generator (Cyclic)
  Interval generator;            // |beta| * generator_value, numeric
  bool independence_certified = true;
  bool stabilized = false;  // verdict unchanged over the final half of the window
  int window = 0;
  std::vector<std::string> provenance;
  std::string to_text(const SymbolTable& table) const;
};

// Reduction of {beta F(mu) - beta F(mu')} over closed walks at v of length
// <= L_max.  Exact over SymbolicReal; throws NoLoopFound.
ClosedSubgroup cycle_value_group(const GraphSpec& spec, const std::string& v,
                                 const Interval& beta, int L_max);

// Closed subgroup generated by beta-scaled exponent differences over the
// stages that recur infinitely often.
ClosedSubgroup stage_ratio_group(const StageStates& states, const SymbolTable& table,
                                 const Interval& beta);

struct FactorType {
  enum class Kind { I_finite, I_inf, II_1, II_inf, III_0, III_lambda, III_1 };
  Kind kind = Kind::I_inf;
  int n = 0;            // I_finite only
  Interval lambda;      // III_lambda only, inside (0, 1)
  std::string rule;     // decision-rule identifier
  std::vector<std::string> caveats;
  std::string to_text() const;
};

// Boundary weights: type I_inf; requires declared sinks/infinite emitters.
FactorType classify_factor_boundary(const GraphSpec& spec);

// Conservative weight at beta != 0 under the no-zero-value-cycle hypothesis:
// the type is read off the cycle-value subgroup.
FactorType classify_factor_conservative(const GraphSpec& spec, const std::string& v,
                                        const Interval& beta, int L_max,
                                        int recurrence_n_max = 200);

// Exit weight: the type of the associated infinite tensor product factor,
// read off slimness and the stage-ratio subgroup.
FactorType classify_factor_exit(const GraphSpec& spec, const ExitPath& t,
                                const Interval& beta);

}  // namespace kmsgraph
