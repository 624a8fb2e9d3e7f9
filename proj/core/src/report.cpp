#include "kmsgraph/report.hpp"

#include <sstream>

#include "kmsgraph/exits.hpp"

namespace kmsgraph {

using nlohmann::json;

const char* const kToolVersion = "kmsgraph 0.1.0";

json interval_to_json(const Interval& x) {
  return json::array({x.lo_string(), x.hi_string()});
}

json factor_type_to_json(const FactorType& ft) {
  json j;
  switch (ft.kind) {
    case FactorType::Kind::I_finite:
      j["type"] = "I_finite";
      j["n"] = ft.n;
      break;
    case FactorType::Kind::I_inf: j["type"] = "I_inf"; break;
    case FactorType::Kind::II_1: j["type"] = "II_1"; break;
    case FactorType::Kind::II_inf: j["type"] = "II_inf"; break;
    case FactorType::Kind::III_0: j["type"] = "III_0"; break;
    case FactorType::Kind::III_lambda:
      j["type"] = "III_lambda";
      j["lambda"] = interval_to_json(ft.lambda);
      break;
    case FactorType::Kind::III_1: j["type"] = "III_1"; break;
  }
  j["rule"] = ft.rule;
  if (!ft.caveats.empty()) j["caveats"] = ft.caveats;
  return j;
}

json subgroup_to_json(const ClosedSubgroup& g, const SymbolTable& table) {
  json j;
  switch (g.kind) {
    case ClosedSubgroup::Kind::Zero: j["kind"] = "zero"; break;
    case ClosedSubgroup::Kind::Cyclic:
      j["kind"] = "cyclic";
      j["generator_value"] = g.generator_value.to_string(table);
      j["generator"] = interval_to_json(g.generator);
      break;
    case ClosedSubgroup::Kind::Dense:
      j["kind"] = "dense";
      j["independence_certified"] = g.independence_certified;
      break;
  }
  j["stabilized"] = g.stabilized;
  j["window"] = g.window;
  return j;
}

json validation_to_json(const ValidationReport& rep) {
  json j;
  j["strongly_connected"] = tri_to_string(rep.strongly_connected);
  j["row_finite"] = rep.row_finite;
  j["potential_nonneg"] = tri_to_string(rep.potential_nonneg);
  j["zero_f_cycle_detected"] = tri_to_string(rep.zero_f_cycle_detected);
  j["zero_cycle_note"] = rep.zero_cycle_witness;
  j["scan_length"] = rep.zero_cycle_scan_length;
  j["exit_condition"] = rep.exit_condition;
  return j;
}

std::string spec_digest(const GraphSpec& spec) {
  const std::string doc = spec.serialize();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : doc) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

namespace {

const char* harmonic_kind(HarmonicResult::Kind k) {
  switch (k) {
    case HarmonicResult::Kind::Exists: return "exists";
    case HarmonicResult::Kind::NoSolution: return "no_solution";
    default: return "undecided";
  }
}

}  // namespace

json analysis_report(const GraphSpec& spec, const Interval& beta, const ReportOptions& opts) {
  PrecisionGuard guard(opts.precision);
  json rep;
  rep["tool"] = kToolVersion;
  rep["spec"] = spec.name;
  rep["digest"] = spec_digest(spec);
  rep["precision_bits"] = opts.precision;
  rep["n_max"] = opts.n_max;
  rep["beta"] = interval_to_json(beta);

  const std::string v = opts.vertex.empty() ? spec.base_vertices.at(0) : opts.vertex;
  rep["vertex"] = v;

  ValidationReport val = validate(spec, opts.l_max);
  rep["validation"] = validation_to_json(val);

  if (val.row_finite) {
    RecurrenceVerdict rv = classify_recurrence(spec, v, beta, opts.n_max, opts.tol);
    json jr;
    jr["verdict"] = to_string(rv.kind);
    jr["partial_sum"] = interval_to_json(rv.partial);
    jr["total"] = rv.total.is_finite() ? interval_to_json(rv.total)
                                       : json::array({rv.total.lo_string(), "inf"});
    jr["n_used"] = rv.n_used;
    jr["tail_certified"] = rv.tail_certified;
    rep["recurrence"] = jr;

    PeriodReport pr;
    int d = period(spec, v, std::max(12, opts.l_max), &pr);
    rep["period"] = {{"d", d}, {"stabilized", pr.stabilized}, {"window", pr.window}};

    ClosedSubgroup gamma = cycle_value_group(spec, v, beta, opts.l_max);
    rep["cycle_value_group"] = subgroup_to_json(gamma, spec.symbols);

    try {
      FactorType ft = classify_factor_conservative(spec, v, beta, opts.l_max,
                                                   std::min(opts.n_max, 200));
      rep["factor_types"]["conservative"] = factor_type_to_json(ft);
    } catch (const InvalidHypothesis& ex) {
      rep["factor_types"]["conservative"] = {{"error", ex.what()}};
    }

    if (!spec.is_finite()) {
      json jexits = json::array();
      for (const auto& ex : canonical_exits(spec)) {
        json je;
        je["name"] = ex.name;
        je["slim"] = is_slim(ex);
        json ks = json::array();
        for (int i = 1; i <= 4; ++i) ks.push_back(ex.k(i));
        je["k_pattern_head"] = ks;
        StageStates ss = stage_states(spec, ex, beta);
        je["stage_ratio_group"] = subgroup_to_json(stage_ratio_group(ss, spec.symbols, beta),
                                                   spec.symbols);
        je["factor_type"] = factor_type_to_json(classify_factor_exit(spec, ex, beta));
        ExitOptions eo;
        eo.n_max = opts.n_max;
        eo.tol = opts.tol;
        ExitMeasureResult m = summability(spec, ex, beta, eo);
        switch (m.kind) {
          case ExitMeasureResult::Kind::Summable:
            je["summability"] = {{"kind", "summable"},
                                 {"measure_at_root", interval_to_json(m.value)}};
            break;
          case ExitMeasureResult::Kind::NotSummable:
            je["summability"] = {{"kind", "not_summable"}, {"note", m.note}};
            break;
          default:
            je["summability"] = {{"kind", "undecided"}, {"note", m.note}};
        }
        jexits.push_back(je);
      }
      rep["exits"] = jexits;

      HarmonicResult hr = solve_ray(spec, beta, v);
      rep["harmonic"] = {{"kind", harmonic_kind(hr.kind)}, {"note", hr.note}};
    } else {
      HarmonicResult hr = solve_finite(spec, beta, v, opts.tol);
      json jh;
      jh["kind"] = harmonic_kind(hr.kind);
      jh["spectral_radius"] = interval_to_json(hr.spectral_radius);
      rep["harmonic"] = jh;
    }

    if (opts.with_beta_critical) {
      try {
        BetaCriticalResult bc =
            beta_critical(spec, v, opts.bracket_lo, opts.bracket_hi, opts.tol, opts.n_max);
        rep["beta_critical"] = {{"bracket", interval_to_json(bc.bracket)},
                                {"achieved_tol", bc.achieved_tol},
                                {"evaluations", bc.evaluations}};
      } catch (const Error& ex) {
        rep["beta_critical"] = {{"error", ex.what()}};
      }
    }
  } else {
    rep["recurrence"] = {{"verdict", "not_row_finite"}};
    try {
      rep["factor_types"]["boundary"] = factor_type_to_json(classify_factor_boundary(spec));
    } catch (const InvalidHypothesis& ex) {
      rep["factor_types"]["boundary"] = {{"error", ex.what()}};
    }
  }

  if (!spec.has_declared_infinite_emitter() && val.potential_nonneg == Tri::Yes) {
    try {
      BratteliDiagram d = bratteli(spec, v, opts.levels);
      GroundStateSummary gs = ground_state_summary(d);
      json jg;
      jg["summary"] = gs.text;
      jg["model_note"] = gs.model_note;
      jg["caveats"] = gs.caveats;
      json jl = json::array();
      for (const auto& lvl : d.levels) {
        json jc = json::array();
        for (const auto& c : lvl.classes) {
          jc.push_back({{"endpoint", c.endpoint},
                        {"f_value", c.f_value.to_string(spec.symbols)},
                        {"mult", c.multiplicity}});
        }
        jl.push_back({{"classes", jc}});
      }
      jg["levels"] = jl;
      rep["ground_states"] = jg;
    } catch (const Error& ex) {
      rep["ground_states"] = {{"error", ex.what()}};
    }
  }

  return rep;
}

namespace {

void render_node(const json& j, int indent, std::ostringstream& os) {
  const std::string pad(indent, ' ');
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (it.value().is_object() || it.value().is_array()) {
        os << pad << it.key() << ":\n";
        render_node(it.value(), indent + 2, os);
      } else {
        os << pad << it.key() << ": " << it.value().dump() << "\n";
      }
    }
  } else if (j.is_array()) {
    bool scalar = true;
    for (const auto& e : j) {
      if (e.is_object() || e.is_array()) scalar = false;
    }
    if (scalar) {
      os << pad << j.dump() << "\n";
    } else {
      int idx = 0;
      for (const auto& e : j) {
        os << pad << "- [" << idx++ << "]\n";
        render_node(e, indent + 2, os);
      }
    }
  } else {
    os << pad << j.dump() << "\n";
  }
}

}  // namespace

std::string render_text(const json& report) {
  std::ostringstream os;
  render_node(report, 0, os);
  return os.str();
}

}  // namespace kmsgraph
