#pragma once

#include <json.hpp>
#include <optional>
#include <string>

#include "kmsgraph/classify.hpp"
#include "kmsgraph/geodesics.hpp"
#include "kmsgraph/graph.hpp"
#include "kmsgraph/harmonic.hpp"
#include "kmsgraph/series.hpp"

namespace kmsgraph {

struct ReportOptions {
  unsigned precision = 128;
  int n_max = 400;
  Rational tol = Rational(1, 1000000000);
  int l_max = 12;    // cycle-scan window
  int levels = 10;   // ground-state diagram depth
  std::string vertex;  // analysis root; first base vertex when empty
  bool with_beta_critical = false;
  Rational bracket_lo = Rational(1, 10);
  Rational bracket_hi = Rational(3, 1);
};

nlohmann::json interval_to_json(const Interval& x);
nlohmann::json factor_type_to_json(const FactorType& ft);
nlohmann::json subgroup_to_json(const ClosedSubgroup& g, const SymbolTable& table);
nlohmann::json validation_to_json(const ValidationReport& rep);

// FNV-1a over the canonical document bytes.
std::string spec_digest(const GraphSpec& spec);

// Full analysis: validation, recurrence, subgroup, factor types, exits,
// harmonic existence, ground states.  Deterministic given spec and options.
nlohmann::json analysis_report(const GraphSpec& spec, const Interval& beta,
                               const ReportOptions& opts);

std::string render_text(const nlohmann::json& report);

extern const char* const kToolVersion;

}  // namespace kmsgraph
