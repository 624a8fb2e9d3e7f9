#pragma once

#include <string>
#include <vector>

#include "kmsgraph/graph.hpp"
#include "kmsgraph/harmonic.hpp"
#include "kmsgraph/interval.hpp"
#include "kmsgraph/series.hpp"

namespace kmsgraph {

// A canonical exit: the vertex ray tracing one simple cycle of the
// slot-ascent graph of the template, optionally entered from a base vertex.
// Step i joins vertex(i) to vertex(i+1); step lists repeat with the cycle.
struct ExitPath {
  std::string name;                // slot-cycle label, e.g. "t" or "a"
  std::vector<int> cycle;          // template slot ids along one period
  std::string base_entry;          // base vertex opening the ray ("" if none)
  std::vector<SymbolicReal> entry_exponents;                // attach-edge F values
  std::vector<std::vector<SymbolicReal>> step_exponents;    // per cycle position

  // 1-indexed ray vertices: with a base entry, vertex(1) is the base vertex.
  std::string vertex(const GraphSpec& spec, int i) const;
  int stage_of_vertex(int i) const;  // materialization stage; 0 = base
  // edge multiplicity of step i (paper's k_i)
  int k(int i) const;
  const std::vector<SymbolicReal>& exponents_of_step(int i) const;
  // t^beta(i) = prod_{j<i} A(beta)_{t_j t_{j+1}}
  Interval t_beta(const GraphSpec& spec, const Interval& beta, int i) const;
};

// One exit per simple cycle of the slot-ascent graph (period-1 templates).
std::vector<ExitPath> canonical_exits(const GraphSpec& spec);

// k_i = 1 for all large i; decidable exactly from the periodic step lists.
bool is_slim(const ExitPath& t);

struct StageState {
  std::vector<SymbolicReal> exponents;
  std::vector<Interval> probabilities;  // exp(-beta F)/Z, summing to 1
};

// Per-step normalized Gibbs states; entries repeat with the cycle after the
// prefix.  at(i) is the state of step i >= 1.
struct StageStates {
  std::vector<StageState> prefix;
  std::vector<StageState> cycle;
  const StageState& at(int i) const;
};

StageStates stage_states(const GraphSpec& spec, const ExitPath& t, const Interval& beta);

struct ExitMeasureResult {
  enum class Kind { Summable, NotSummable, Undecided };
  Kind kind = Kind::Undecided;
  Interval value;  // m_t(Z(v)) bracket when Summable
  int i_used = 0;
  int n_used = 0;
  std::string note;
};

struct ExitOptions {
  int i_star = 8;     // chain depth at which the limit is read off
  int n_max = 400;    // series depth cap
  Rational tol = Rational(1, 1000000000);
};

// lim_i t^beta(i)^{-1} sum_n A(beta)^n_{v t_i}.  Requires a transient beta;
// Supercritical or Recurrent verdicts yield NotSummable.
ExitMeasureResult summability(const GraphSpec& spec, const ExitPath& t,
                              const Interval& beta, const ExitOptions& opts = {});
ExitMeasureResult exit_measure(const GraphSpec& spec, const ExitPath& t,
                               const Interval& beta, const std::string& v,
                               const ExitOptions& opts = {});

// The whole m_t vector over a materialized window, packaged so cylinder
// measures and additivity checks reuse the harmonic machinery.
struct ExitVectorResult {
  ExitMeasureResult::Kind kind = ExitMeasureResult::Kind::Undecided;
  HarmonicVector vector;
  int certified_stage_cap = -1;  // values certified for stages <= cap
  std::string note;
};
ExitVectorResult exit_vector(const GraphSpec& spec, const ExitPath& t,
                             const Interval& beta, const ExitOptions& opts = {});

// Masses of the depth-n ascent cylinders along the exit:
// partial_n = t^beta(n) * m_t(Z(t_n)), n = 1..depth.
std::vector<Interval> normalization_partials(const GraphSpec& spec, const ExitPath& t,
                                             const Interval& beta, int depth,
                                             const ExitOptions& opts = {});

}  // namespace kmsgraph
