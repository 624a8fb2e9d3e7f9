#include "kmsgraph/classify.hpp"

#include <set>
#include <sstream>

#include "kmsgraph/errors.hpp"
#include "kmsgraph/series.hpp"

namespace kmsgraph {

namespace {

// all distinct closed-walk F-values at v, by walk length
std::vector<std::set<SymbolicReal, SymbolicLess>> walk_values(const GraphSpec& spec,
                                                              const std::string& v, int L_max) {
  Truncation tr = truncate(spec, v, L_max / 2 + 1);
  const FiniteGraph& g = tr.g;
  std::vector<std::set<SymbolicReal, SymbolicLess>> vals(g.vertex_count());
  std::vector<std::set<SymbolicReal, SymbolicLess>> at_root(L_max + 1);
  vals[tr.root].insert(spec.zero_value());
  for (int len = 1; len <= L_max; ++len) {
    std::vector<std::set<SymbolicReal, SymbolicLess>> next(g.vertex_count());
    for (size_t u = 0; u < g.vertex_count(); ++u) {
      if (vals[u].empty()) continue;
      for (int ei : g.out_edges[u]) {
        const auto& e = g.edges[ei];
        for (const auto& val : vals[u]) next[e.dst].insert(val + e.f);
      }
    }
    vals.swap(next);
    at_root[len] = vals[tr.root];
  }
  return at_root;
}

ClosedSubgroup reduce_to_subgroup(const std::vector<SymbolicReal>& values,
                                  const GraphSpec& spec, const Interval& beta) {
  ClosedSubgroup out;
  if (values.empty()) return out;
  std::vector<SymbolicReal> gens;
  for (size_t i = 1; i < values.size(); ++i) gens.push_back(values[i] - values[0]);
  SubgroupReduction red = reduce_subgroup(gens, spec.symbols);
  switch (red.kind) {
    case SubgroupReduction::Kind::Zero:
      out.kind = ClosedSubgroup::Kind::Zero;
      break;
    case SubgroupReduction::Kind::Cyclic: {
      out.kind = ClosedSubgroup::Kind::Cyclic;
      out.generator_value = red.generator;
      Interval g = beta * red.generator.eval(spec.symbols);
      if (g.certainly_negative()) g = -g;
      out.generator = g;
      out.provenance.push_back("generator " + red.generator.to_string(spec.symbols));
      break;
    }
    case SubgroupReduction::Kind::Dense:
      out.kind = ClosedSubgroup::Kind::Dense;
      out.independence_certified = red.independence_certified;
      out.provenance.push_back("irrational ratio between " +
                               red.dense_a.to_string(spec.symbols) + " and " +
                               red.dense_b.to_string(spec.symbols));
      break;
  }
  return out;
}

}  // namespace

ClosedSubgroup cycle_value_group(const GraphSpec& spec, const std::string& v,
                                 const Interval& beta, int L_max) {
  auto at_root = walk_values(spec, v, L_max);

  auto collect = [&](int upto) {
    std::set<SymbolicReal, SymbolicLess> s;
    for (int len = 1; len <= upto; ++len) {
      for (const auto& val : at_root[len]) s.insert(val);
    }
    return std::vector<SymbolicReal>(s.begin(), s.end());
  };

  std::vector<SymbolicReal> full = collect(L_max);
  if (full.empty()) throw NoLoopFound("no closed walk at " + v + " within L_max");
  ClosedSubgroup out = reduce_to_subgroup(full, spec, beta);
  out.window = L_max;

  std::vector<SymbolicReal> half = collect(L_max / 2);
  if (!half.empty()) {
    ClosedSubgroup h = reduce_to_subgroup(half, spec, beta);
    out.stabilized = (h.kind == out.kind) &&
                     (out.kind != ClosedSubgroup::Kind::Cyclic ||
                      h.generator_value == out.generator_value);
  }
  return out;
}

ClosedSubgroup stage_ratio_group(const StageStates& states, const SymbolTable& table,
                                 const Interval& beta) {
  if (states.cycle.empty()) {
    throw NotEventuallyPeriodic("no recurring stages in the exit description");
  }
  std::vector<SymbolicReal> gens;
  for (const auto& st : states.cycle) {
    for (size_t i = 0; i + 1 < st.exponents.size(); ++i) {
      for (size_t j = i + 1; j < st.exponents.size(); ++j) {
        gens.push_back(st.exponents[i] - st.exponents[j]);
      }
    }
  }
  ClosedSubgroup out;
  SubgroupReduction red = reduce_subgroup(gens, table);
  switch (red.kind) {
    case SubgroupReduction::Kind::Zero:
      out.kind = ClosedSubgroup::Kind::Zero;
      break;
    case SubgroupReduction::Kind::Cyclic: {
      out.kind = ClosedSubgroup::Kind::Cyclic;
      out.generator_value = red.generator;
      Interval g = beta * red.generator.eval(table);
      if (g.certainly_negative()) g = -g;
      out.generator = g;
      break;
    }
    case SubgroupReduction::Kind::Dense:
      out.kind = ClosedSubgroup::Kind::Dense;
      out.independence_certified = red.independence_certified;
      break;
  }
  out.stabilized = true;  // the cycle is the full recurring pattern
  out.window = static_cast<int>(states.cycle.size());
  return out;
}

std::string ClosedSubgroup::to_text(const SymbolTable& table) const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Zero:
      os << "{0}";
      break;
    case Kind::Cyclic:
      os << "cyclic, generator beta*(" << generator_value.to_string(table) << ") = "
         << generator.to_string(10);
      break;
    case Kind::Dense:
      os << "dense" << (independence_certified ? "" : " (assuming declared independence)");
      break;
  }
  if (!stabilized) os << " [provisional: not stabilized over the window]";
  return os.str();
}

std::string FactorType::to_text() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::I_finite: os << "I_" << n; break;
    case Kind::I_inf: os << "I_inf"; break;
    case Kind::II_1: os << "II_1"; break;
    case Kind::II_inf: os << "II_inf"; break;
    case Kind::III_0: os << "III_0"; break;
    case Kind::III_lambda: os << "III_lambda, lambda = " << lambda.to_string(10); break;
    case Kind::III_1: os << "III_1"; break;
  }
  os << "  [rule: " << rule << "]";
  for (const auto& c : caveats) os << "\n  caveat: " << c;
  return os.str();
}

FactorType classify_factor_boundary(const GraphSpec& spec) {
  if (spec.v_inf.empty()) {
    throw InvalidHypothesis("boundary weights require declared sinks or infinite emitters");
  }
  FactorType ft;
  ft.kind = FactorType::Kind::I_inf;
  ft.rule = "boundary-weight -> I_inf";
  return ft;
}

namespace {

FactorType type_from_subgroup(const ClosedSubgroup& g, const char* zero_rule_i_inf_or_ii_inf,
                              bool slim, bool exit_kind) {
  FactorType ft;
  if (g.kind == ClosedSubgroup::Kind::Dense) {
    ft.kind = FactorType::Kind::III_1;
    ft.rule = exit_kind ? "exit: dense ratio subgroup -> III_1"
                        : "conservative: dense cycle-value subgroup -> III_1";
    if (!g.independence_certified) {
      ft.caveats.push_back("density relies on declared symbol independence");
    }
  } else if (g.kind == ClosedSubgroup::Kind::Cyclic) {
    ft.kind = FactorType::Kind::III_lambda;
    ft.lambda = Interval::exp_of(-g.generator);
    ft.rule = exit_kind ? "exit: cyclic ratio subgroup d*Z -> III_{e^-d}"
                        : "conservative: cyclic cycle-value subgroup d*Z -> III_{e^-d}";
  } else {
    // trivial subgroup
    if (!exit_kind) {
      throw InvalidHypothesis(
          "cycle-value subgroup is {0}: impossible when no cycle has value zero");
    }
    ft.kind = slim ? FactorType::Kind::I_inf : FactorType::Kind::II_inf;
    ft.rule = zero_rule_i_inf_or_ii_inf;
  }
  if (!g.stabilized) ft.caveats.push_back("subgroup verdict provisional: scan did not stabilize");
  return ft;
}

}  // namespace

FactorType classify_factor_conservative(const GraphSpec& spec, const std::string& v,
                                        const Interval& beta, int L_max,
                                        int recurrence_n_max) {
  if (beta.contains_zero()) {
    throw InvalidHypothesis("conservative classification requires beta != 0");
  }
  ValidationReport rep = validate(spec, L_max);
  std::vector<std::string> caveats;
  if (rep.zero_f_cycle_detected == Tri::Yes) {
    throw InvalidHypothesis("a zero-value cycle violates the classification hypothesis: " +
                            rep.zero_cycle_witness);
  }
  caveats.push_back("no zero-value cycle found up to length " + std::to_string(L_max) +
                    "; the hypothesis is open beyond");

  ClosedSubgroup g = cycle_value_group(spec, v, beta, L_max);
  FactorType ft = type_from_subgroup(g, "", false, false);

  if (recurrence_n_max > 0) {
    RecurrenceVerdict rv = classify_recurrence(spec, v, beta, recurrence_n_max);
    caveats.push_back("conservativity assumed; recurrence verdict at beta: " +
                      to_string(rv.kind));
  }
  for (auto& c : caveats) ft.caveats.push_back(std::move(c));
  return ft;
}

FactorType classify_factor_exit(const GraphSpec& spec, const ExitPath& t,
                                const Interval& beta) {
  StageStates states = stage_states(spec, t, beta);
  ClosedSubgroup g = stage_ratio_group(states, spec.symbols, beta);
  const bool slim = is_slim(t);
  const char* zero_rule = slim ? "exit: slim, trivial ratio subgroup -> I_inf"
                               : "exit: non-slim, trivial ratio subgroup -> II_inf";
  return type_from_subgroup(g, zero_rule, slim, true);
}

}  // namespace kmsgraph
