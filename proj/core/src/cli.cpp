#include "kmsgraph/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "kmsgraph/report.hpp"

namespace kmsgraph {

namespace {

constexpr int kOk = 0;
constexpr int kInputError = 2;
constexpr int kUndecided = 3;

struct CommonArgs {
  std::string format = "text";
  unsigned precision = 128;
  int n_max = 400;
  std::string tol = "1/1000000000";
  std::string potential = "";
};

Rational parse_tol(const std::string& s) {
  if (s.find('/') != std::string::npos || s.find('.') == std::string::npos) {
    return parse_rational(s);
  }
  // decimal like 1e-9 or 0.000001: go through a rational power of ten
  std::istringstream is(s);
  double d;
  is >> d;
  if (!is || d <= 0) throw std::invalid_argument("bad tolerance: " + s);
  return Rational(d);
}

GraphSpec load_spec(const std::string& ref, const std::string& potential) {
  for (const auto& name : builtin_names()) {
    if (ref == name) {
      if (potential.empty()) return builtin_graph(name);
      if (potential == "gauge") return builtin_graph(name, PotentialKind::Gauge);
      if (potential == "ab-symbolic") return builtin_graph(name, PotentialKind::SymbolicAB);
      if (potential.rfind("ab:", 0) == 0) {
        auto comma = potential.find(',');
        if (comma == std::string::npos) throw std::invalid_argument("--potential ab:A1,A2");
        Rational a1 = parse_rational(potential.substr(3, comma - 3));
        Rational a2 = parse_rational(potential.substr(comma + 1));
        return builtin_graph(name, PotentialKind::RationalAB, a1, a2);
      }
      throw std::invalid_argument("unknown potential: " + potential +
                                  " (expected gauge, ab:A1,A2 or ab-symbolic)");
    }
  }
  if (!potential.empty() && potential != "file") {
    throw std::invalid_argument("--potential applies to built-in graphs only");
  }
  std::ifstream in(ref);
  if (!in) throw std::invalid_argument("cannot open spec file: " + ref);
  std::stringstream buf;
  buf << in.rdbuf();
  return GraphSpec::parse_document(buf.str());
}

void emit(std::ostream& out, const nlohmann::json& j, const std::string& format) {
  if (format == "json") {
    out << j.dump(2) << "\n";
  } else {
    out << render_text(j);
  }
}

void add_common(CLI::App* cmd, CommonArgs& c) {
  cmd->add_option("--format", c.format, "output format: text or json")
      ->check(CLI::IsMember({"text", "json"}));
  cmd->add_option("--precision", c.precision, "mantissa bits for interval arithmetic");
  cmd->add_option("--nmax", c.n_max, "series depth cap");
  cmd->add_option("--tol", c.tol, "tolerance (rational p/q or decimal)");
  cmd->add_option("--potential", c.potential,
                  "built-in potential: gauge, ab:A1,A2, ab-symbolic");
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"KMS-weight landscape of generalized gauge actions on graph algebras"};
  app.require_subcommand(1);

  CommonArgs c;
  if (const char* env = std::getenv("KMSGRAPH_PRECISION")) {
    c.precision = static_cast<unsigned>(std::strtoul(env, nullptr, 10));
  }

  // validate <spec>
  auto* cmd_validate = app.add_subcommand("validate", "structural validation report");
  std::string spec_ref;
  int l_max = 12;
  cmd_validate->add_option("spec", spec_ref, "built-in name or document path")->required();
  cmd_validate->add_option("--lmax", l_max, "zero-value-cycle scan length");
  add_common(cmd_validate, c);

  // analyze <spec> --beta B
  auto* cmd_analyze = app.add_subcommand("analyze", "full analysis at one temperature");
  std::string beta_str;
  std::string vertex;
  bool with_bc = false;
  std::string bracket = "1/10,3";
  int levels = 10;
  cmd_analyze->add_option("spec", spec_ref, "built-in name or document path")->required();
  cmd_analyze->add_option("--beta", beta_str, "inverse temperature (decimal)")->required();
  cmd_analyze->add_option("--vertex", vertex, "analysis root vertex");
  cmd_analyze->add_flag("--with-beta-critical", with_bc, "include the critical bracket");
  cmd_analyze->add_option("--bracket", bracket, "beta_c bracket lo,hi (rationals)");
  cmd_analyze->add_option("--levels", levels, "ground-state diagram depth");
  cmd_analyze->add_option("--lmax", l_max, "cycle scan length");
  add_common(cmd_analyze, c);

  // beta-critical <spec>
  auto* cmd_bc = app.add_subcommand("beta-critical", "certified bracket for beta_c");
  cmd_bc->add_option("spec", spec_ref, "built-in name or document path")->required();
  cmd_bc->add_option("--bracket", bracket, "search bracket lo,hi (rationals)");
  cmd_bc->add_option("--vertex", vertex, "root vertex");
  add_common(cmd_bc, c);

  // factor-type <spec> --beta B --kind ...
  auto* cmd_ft = app.add_subcommand("factor-type", "factor type of a designated weight");
  std::string kind;
  std::string exit_name;
  cmd_ft->add_option("spec", spec_ref, "built-in name or document path")->required();
  cmd_ft->add_option("--beta", beta_str, "inverse temperature (decimal)");
  cmd_ft->add_option("--kind", kind, "conservative | exit | boundary")
      ->required()
      ->check(CLI::IsMember({"conservative", "exit", "boundary"}));
  cmd_ft->add_option("--exit", exit_name, "exit name (see analyze output)");
  cmd_ft->add_option("--vertex", vertex, "root vertex (conservative)");
  cmd_ft->add_option("--lmax", l_max, "cycle scan length");
  add_common(cmd_ft, c);

  // ground-states <spec> --vertex V
  auto* cmd_gs = app.add_subcommand("ground-states", "geodesic class diagram and summary");
  cmd_gs->add_option("spec", spec_ref, "built-in name or document path")->required();
  cmd_gs->add_option("--vertex", vertex, "corner vertex")->required();
  cmd_gs->add_option("--levels", levels, "diagram depth");
  add_common(cmd_gs, c);

  // examples [list|export NAME]
  auto* cmd_ex = app.add_subcommand("examples", "list or export built-in graphs");
  std::string ex_action = "list";
  std::string ex_name;
  cmd_ex->add_option("action", ex_action, "list or export")
      ->check(CLI::IsMember({"list", "export"}));
  cmd_ex->add_option("name", ex_name, "built-in name for export");
  add_common(cmd_ex, c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kOk;
    }
    err << "error: " << e.what() << "\n";
    return kInputError;
  }

  try {
    PrecisionGuard guard(c.precision);
    ReportOptions opts;
    opts.precision = c.precision;
    opts.n_max = c.n_max;
    opts.tol = parse_tol(c.tol);
    opts.l_max = l_max;
    opts.levels = levels;
    opts.vertex = vertex;

    auto parse_bracket = [&](Rational& lo, Rational& hi) {
      auto comma = bracket.find(',');
      if (comma == std::string::npos) throw std::invalid_argument("--bracket lo,hi");
      lo = parse_rational(bracket.substr(0, comma));
      hi = parse_rational(bracket.substr(comma + 1));
    };

    if (*cmd_validate) {
      GraphSpec spec = load_spec(spec_ref, c.potential);
      ValidationReport rep = validate(spec, l_max);
      nlohmann::json j = validation_to_json(rep);
      j["spec"] = spec.name;
      j["digest"] = spec_digest(spec);
      j["tool"] = kToolVersion;
      emit(out, j, c.format);
      return kOk;
    }

    if (*cmd_analyze) {
      GraphSpec spec = load_spec(spec_ref, c.potential);
      opts.with_beta_critical = with_bc;
      if (with_bc) parse_bracket(opts.bracket_lo, opts.bracket_hi);
      nlohmann::json j = analysis_report(spec, Interval::from_decimal(beta_str), opts);
      emit(out, j, c.format);
      const bool undecided =
          j.contains("recurrence") && j["recurrence"].contains("verdict") &&
          j["recurrence"]["verdict"] == "undecided";
      return undecided ? kUndecided : kOk;
    }

    if (*cmd_bc) {
      GraphSpec spec = load_spec(spec_ref, c.potential);
      Rational lo, hi;
      parse_bracket(lo, hi);
      const std::string v = vertex.empty() ? spec.base_vertices.at(0) : vertex;
      BetaCriticalResult bc = beta_critical(spec, v, lo, hi, opts.tol, opts.n_max);
      nlohmann::json j;
      j["tool"] = kToolVersion;
      j["spec"] = spec.name;
      j["digest"] = spec_digest(spec);
      j["vertex"] = v;
      j["bracket"] = interval_to_json(bc.bracket);
      j["bracket_exact"] = {rational_to_string(bc.lo), rational_to_string(bc.hi)};
      j["achieved_tol"] = bc.achieved_tol;
      j["evaluations"] = bc.evaluations;
      if (!bc.note.empty()) j["note"] = bc.note;
      emit(out, j, c.format);
      return bc.achieved_tol ? kOk : kUndecided;
    }

    if (*cmd_ft) {
      GraphSpec spec = load_spec(spec_ref, c.potential);
      nlohmann::json j;
      j["tool"] = kToolVersion;
      j["spec"] = spec.name;
      j["digest"] = spec_digest(spec);
      j["kind"] = kind;
      if (kind == "boundary") {
        j["factor_type"] = factor_type_to_json(classify_factor_boundary(spec));
      } else {
        if (beta_str.empty()) throw std::invalid_argument("--beta required for this kind");
        Interval beta = Interval::from_decimal(beta_str);
        j["beta"] = interval_to_json(beta);
        if (kind == "conservative") {
          const std::string v = vertex.empty() ? spec.base_vertices.at(0) : vertex;
          j["vertex"] = v;
          j["factor_type"] =
              factor_type_to_json(classify_factor_conservative(spec, v, beta, l_max));
        } else {
          auto exits = canonical_exits(spec);
          if (exits.empty()) throw InvalidHypothesis("no canonical exits on this graph");
          const ExitPath* chosen = &exits.front();
          if (!exit_name.empty()) {
            chosen = nullptr;
            for (const auto& ex : exits) {
              if (ex.name == exit_name) chosen = &ex;
            }
            if (!chosen) throw std::invalid_argument("unknown exit: " + exit_name);
          }
          j["exit"] = chosen->name;
          j["slim"] = is_slim(*chosen);
          j["factor_type"] = factor_type_to_json(classify_factor_exit(spec, *chosen, beta));
        }
      }
      emit(out, j, c.format);
      return kOk;
    }

    if (*cmd_gs) {
      GraphSpec spec = load_spec(spec_ref, c.potential);
      BratteliDiagram d = bratteli(spec, vertex, levels);
      GroundStateSummary gs = ground_state_summary(d);
      nlohmann::json j;
      j["tool"] = kToolVersion;
      j["spec"] = spec.name;
      j["digest"] = spec_digest(spec);
      j["vertex"] = vertex;
      nlohmann::json jl = nlohmann::json::array();
      for (const auto& lvl : d.levels) {
        nlohmann::json jc = nlohmann::json::array();
        for (const auto& cls : lvl.classes) {
          jc.push_back({{"endpoint", cls.endpoint},
                        {"f_value", cls.f_value.to_string(spec.symbols)},
                        {"mult", cls.multiplicity},
                        {"terminal", cls.terminal}});
        }
        jl.push_back({{"classes", jc}});
      }
      j["levels"] = jl;
      j["summary"] = gs.text;
      j["model_note"] = gs.model_note;
      j["caveats"] = gs.caveats;
      if (!d.warnings.empty()) j["warnings"] = d.warnings;
      emit(out, j, c.format);
      return kOk;
    }

    if (*cmd_ex) {
      if (ex_action == "list") {
        nlohmann::json j;
        j["examples"] = builtin_names();
        emit(out, j, c.format);
        return kOk;
      }
      if (ex_name.empty()) throw std::invalid_argument("examples export NAME");
      GraphSpec spec = load_spec(ex_name, c.potential);
      out << spec.serialize();
      return kOk;
    }

    err << "error: no subcommand\n";
    return kInputError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInputError;
  }
}

}  // namespace kmsgraph
