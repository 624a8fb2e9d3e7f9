#include "kmsgraph/exits.hpp"

#include <algorithm>
#include <map>

#include "kmsgraph/errors.hpp"

namespace kmsgraph {

namespace {

bool exact_zero(const Interval& x) {
  return !x.certainly_positive() && !x.certainly_negative() && x.width_double() == 0.0;
}

Interval step_weight(const std::vector<SymbolicReal>& exps, const SymbolTable& table,
                     const Interval& beta) {
  Interval sum(0);
  for (const auto& f : exps) sum += Interval::exp_of(-(beta * f.eval(table)));
  return sum;
}

}  // namespace

std::string ExitPath::vertex(const GraphSpec& spec, int i) const {
  if (i < 1) throw std::invalid_argument("exit vertices are 1-indexed");
  if (!base_entry.empty()) {
    if (i == 1) return base_entry;
    const int stage = i - 1;
    return spec.ray->instance_name(cycle[(stage - 1) % cycle.size()], stage);
  }
  return spec.ray->instance_name(cycle[(i - 1) % cycle.size()], i);
}

int ExitPath::stage_of_vertex(int i) const {
  if (!base_entry.empty()) return i - 1;
  return i;
}

const std::vector<SymbolicReal>& ExitPath::exponents_of_step(int i) const {
  if (!base_entry.empty()) {
    if (i == 1) return entry_exponents;
    return step_exponents[(i - 2) % step_exponents.size()];
  }
  return step_exponents[(i - 1) % step_exponents.size()];
}

int ExitPath::k(int i) const { return static_cast<int>(exponents_of_step(i).size()); }

Interval ExitPath::t_beta(const GraphSpec& spec, const Interval& beta, int i) const {
  Interval prod(1);
  for (int j = 1; j < i; ++j) {
    prod *= step_weight(exponents_of_step(j), spec.symbols, beta);
  }
  return prod;
}

std::vector<ExitPath> canonical_exits(const GraphSpec& spec) {
  if (spec.is_finite()) return {};
  const RayTemplate& t = *spec.ray;
  if (t.period != 1) {
    throw NotEventuallyPeriodic("canonical exits are derived for period-1 templates");
  }
  const int m = static_cast<int>(t.slots.size());

  // slot-ascent graph: u -> v per cross edge with delta +1
  std::vector<std::vector<int>> ascent(m);
  for (const auto& e : t.cross_edges) {
    if (e.delta != 1) continue;
    ascent[t.slot_index(e.src_slot)].push_back(t.slot_index(e.dst_slot));
  }
  for (auto& a : ascent) {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }

  // simple cycles with their minimal slot as root (m is small)
  std::vector<std::vector<int>> cycles;
  for (int root = 0; root < m; ++root) {
    std::vector<int> path{root};
    std::vector<char> on_path(m, 0);
    on_path[root] = 1;
    auto dfs = [&](auto&& self, int u) -> void {
      for (int v : ascent[u]) {
        if (v == root) {
          cycles.push_back(path);
        } else if (v > root && !on_path[v]) {
          on_path[v] = 1;
          path.push_back(v);
          self(self, v);
          path.pop_back();
          on_path[v] = 0;
        }
      }
    };
    dfs(dfs, root);
  }

  std::vector<ExitPath> exits;
  for (const auto& cyc : cycles) {
    ExitPath ex;
    ex.cycle = cyc;
    for (int s : cyc) ex.name += (ex.name.empty() ? "" : "-") + t.slots[s].name;
    for (size_t j = 0; j < cyc.size(); ++j) {
      const std::string& from = t.slots[cyc[j]].name;
      const std::string& to = t.slots[cyc[(j + 1) % cyc.size()]].name;
      std::vector<SymbolicReal> exps;
      for (const auto& e : t.cross_edges) {
        if (e.delta == 1 && e.src_slot == from && e.dst_slot == to) exps.push_back(e.f);
      }
      if (exps.empty()) throw NotEventuallyPeriodic("ascent cycle lost an edge");
      ex.step_exponents.push_back(std::move(exps));
    }
    // unique base entry point, when one exists
    std::string stage1 = t.instance_name(cyc[0], 1);
    std::string entry;
    bool unique = true;
    std::vector<SymbolicReal> entry_exps;
    for (const auto& e : t.attach_edges) {
      if (e.dst != stage1) continue;
      if (entry.empty()) entry = e.src;
      else if (entry != e.src) unique = false;
      entry_exps.push_back(e.f);
    }
    if (!entry.empty() && unique) {
      ex.base_entry = entry;
      ex.entry_exponents = std::move(entry_exps);
    }
    exits.push_back(std::move(ex));
  }
  std::sort(exits.begin(), exits.end(),
            [](const ExitPath& a, const ExitPath& b) { return a.name < b.name; });
  return exits;
}

bool is_slim(const ExitPath& t) {
  for (const auto& exps : t.step_exponents) {
    if (exps.size() != 1) return false;
  }
  return true;
}

const StageState& StageStates::at(int i) const {
  if (i < 1) throw std::invalid_argument("steps are 1-indexed");
  const size_t idx = static_cast<size_t>(i - 1);
  if (idx < prefix.size()) return prefix[idx];
  return cycle[(idx - prefix.size()) % cycle.size()];
}

StageStates stage_states(const GraphSpec& spec, const ExitPath& t, const Interval& beta) {
  StageStates out;
  auto make = [&](const std::vector<SymbolicReal>& exps) {
    StageState st;
    st.exponents = exps;
    Interval z = step_weight(exps, spec.symbols, beta);
    for (const auto& f : exps) {
      st.probabilities.push_back(Interval::exp_of(-(beta * f.eval(spec.symbols))) / z);
    }
    return st;
  };
  if (!t.base_entry.empty()) out.prefix.push_back(make(t.entry_exponents));
  for (const auto& exps : t.step_exponents) out.cycle.push_back(make(exps));
  return out;
}

// --- exit measures ---------------------------------------------------------------

namespace {

// True when, deep in the template, the only edges into the cycle slots come
// from the previous chain vertex.  Then every walk ending at t_{i+1} factors
// through t_i, so q_i = t^beta(i)^{-1} sum_n A^n_{v t_i} is constant in i.
bool chain_in_only(const RayTemplate& t, const std::vector<int>& cycle) {
  for (size_t j = 0; j < cycle.size(); ++j) {
    const std::string& slot = t.slots[cycle[j]].name;
    const std::string& prev = t.slots[cycle[(j + cycle.size() - 1) % cycle.size()]].name;
    for (const auto& e : t.stage_edges) {
      if (e.dst_slot == slot) return false;
    }
    for (const auto& e : t.cross_edges) {
      if (e.dst_slot != slot) continue;
      if (e.delta == -1) return false;
      if (e.src_slot != prev) return false;
    }
  }
  return true;
}

struct ColumnSums {
  FiniteGraph g;
  std::vector<Interval> total;    // per vertex; trustworthy where certified
  std::vector<char> certified;    // per vertex
  bool all_certified = false;
  int n_used = 0;
  std::string note;
};

// Backward accumulation of sum_n A(beta)^n e_target.  Each wanted component
// gets its own observed-ratio geometric tail over its trailing increments;
// a global norm would never decay here (constant-weight pulses travel along
// zero-potential chains), so certification is per component.
ColumnSums column_sums(const GraphSpec& spec, const Interval& beta,
                       const std::string& target, int target_stage, int n_max,
                       int want_stage_cap, double eps_abs) {
  ColumnSums out;
  const int stages = target_stage + n_max / 2 + 2;
  out.g = materialize(spec, stages);
  const FiniteGraph& g = out.g;
  VertexId tv = g.id_of(target);

  std::map<SymbolicReal, Interval, SymbolicLess> cache;
  std::vector<Interval> w(g.edges.size(), Interval(0));
  for (size_t i = 0; i < g.edges.size(); ++i) {
    const SymbolicReal& f = g.edges[i].f;
    auto it = cache.find(f);
    if (it == cache.end()) it = cache.emplace(f, Interval::exp_of(-(beta * f.eval(spec.symbols)))).first;
    w[i] = it->second;
  }

  const size_t V = g.vertex_count();
  std::vector<Interval> delta(V, Interval(0)), next(V, Interval(0));
  std::vector<Interval> sum(V, Interval(0));
  out.certified.assign(V, 0);
  delta[tv] = Interval(1);
  sum[tv] = Interval(1);
  const Interval zero(0);

  std::vector<VertexId> want;
  for (size_t v = 0; v < V; ++v) {
    if (g.stage[v] <= want_stage_cap) want.push_back(static_cast<VertexId>(v));
  }
  size_t open = want.size();

  // ring of trailing increments per vertex
  constexpr int kHistory = 48;
  std::vector<std::vector<Interval>> hist(kHistory, std::vector<Interval>(V, Interval(0)));

  int n = 0;
  for (n = 1; n <= n_max && open > 0; ++n) {
    for (auto& x : next) x = zero;
    for (size_t v = 0; v < V; ++v) {
      for (int ei : g.out_edges[v]) {
        const auto& e = g.edges[ei];
        if (exact_zero(delta[e.dst])) continue;
        next[e.src] += w[ei] * delta[e.dst];
      }
    }
    delta.swap(next);
    for (size_t v = 0; v < V; ++v) {
      if (!out.certified[v]) sum[v] += delta[v];
    }
    hist[n % kHistory] = delta;

    if (n >= kHistory && n % 16 == 0) {
      for (VertexId v : want) {
        if (out.certified[v]) continue;
        for (int q = 1; q <= 8 && !out.certified[v]; ++q) {
          const int nblocks = std::min(4, kHistory / (2 * q));
          if (nblocks < 3) continue;
          std::vector<Interval> blocks(nblocks, Interval(0));
          for (int b = 0; b < nblocks; ++b) {
            for (int i = 0; i < q; ++i) {
              const int idx = n - (nblocks - 1 - b) * q - i;
              blocks[b] += hist[idx % kHistory][v];
            }
          }
          // the trailing block must be alive: a window that catches a pulse
          // followed by silence (support gap wider than q) must stay open
          if (!blocks.back().certainly_positive()) continue;
          bool ok = true;
          Interval ratio(0);
          bool have = false;
          for (int b = 0; b + 1 < nblocks && ok; ++b) {
            if (!blocks[b].certainly_positive()) {
              ok = false;
              break;
            }
            Interval r = blocks[b + 1] / blocks[b];
            ratio = have ? Interval::hull(ratio, r) : r;
            have = true;
          }
          if (!ok || !have) continue;
          if (!ratio.certainly_less(Rational(1))) continue;
          Interval tail = geometric_tail(blocks.back(), Interval::hull(Interval(0), ratio));
          if (eps_abs > 0 && tail.hi_double() > eps_abs && n + 16 <= n_max) continue;
          sum[v] = Interval::combine(sum[v], sum[v] + tail);
          out.certified[v] = 1;
          --open;
        }
      }
    }
  }
  out.n_used = n - 1;
  out.total = std::move(sum);
  out.all_certified = (open == 0);
  if (!out.all_certified) out.note = "no certified per-component increment ratio below 1";
  return out;
}

}  // namespace

ExitMeasureResult exit_measure(const GraphSpec& spec, const ExitPath& t,
                               const Interval& beta, const std::string& v,
                               const ExitOptions& opts) {
  ExitMeasureResult res;
  RecurrenceVerdict rv = classify_recurrence(spec, t.base_entry.empty()
                                                       ? t.vertex(spec, 1)
                                                       : t.base_entry,
                                             beta, opts.n_max, opts.tol);
  if (rv.kind == RecurrenceVerdict::Kind::Supercritical ||
      rv.kind == RecurrenceVerdict::Kind::Recurrent) {
    res.kind = ExitMeasureResult::Kind::NotSummable;
    res.note = "recurrence verdict at beta: " + to_string(rv.kind);
    return res;
  }
  if (rv.kind == RecurrenceVerdict::Kind::Undecided) {
    res.kind = ExitMeasureResult::Kind::Undecided;
    res.note = "recurrence undecided at beta";
    return res;
  }
  if (!chain_in_only(*spec.ray, t.cycle)) {
    res.kind = ExitMeasureResult::Kind::Undecided;
    res.note = "exit chain admits side entries; the constant-ratio shortcut does not apply";
    return res;
  }

  // q_i is constant in i once i exceeds stage(v)+1; read it at one deep index
  FiniteGraph probe = materialize(spec, 1);
  int v_stage = 0;
  if (probe.vertex_index.count(v)) {
    v_stage = probe.stage[probe.id_of(v)];
  } else {
    Truncation tr = truncate(spec, v, 1);
    v_stage = tr.g.stage[tr.g.id_of(v)];
  }
  int i_star = std::max(opts.i_star, v_stage + 3);
  if (!t.base_entry.empty()) i_star = std::max(i_star, 3);
  const std::string target = t.vertex(spec, i_star);

  Interval tb_star = t.t_beta(spec, beta, i_star);
  const double eps_abs = 0.25 * opts.tol.convert_to<double>() * tb_star.lo_double();
  ColumnSums cs = column_sums(spec, beta, target, t.stage_of_vertex(i_star), opts.n_max, v_stage,
                              eps_abs);
  VertexId vid = cs.g.id_of(v);
  if (!cs.certified[vid]) {
    res.kind = ExitMeasureResult::Kind::Undecided;
    res.note = cs.note;
    return res;
  }
  res.kind = ExitMeasureResult::Kind::Summable;
  res.value = cs.total[vid] / tb_star;
  res.i_used = i_star;
  res.n_used = cs.n_used;
  return res;
}

ExitMeasureResult summability(const GraphSpec& spec, const ExitPath& t,
                              const Interval& beta, const ExitOptions& opts) {
  return exit_measure(spec, t, beta, t.vertex(spec, 1), opts);
}

ExitVectorResult exit_vector(const GraphSpec& spec, const ExitPath& t,
                             const Interval& beta, const ExitOptions& opts) {
  ExitVectorResult out;
  ExitMeasureResult gate = summability(spec, t, beta, opts);
  out.kind = gate.kind;
  if (gate.kind != ExitMeasureResult::Kind::Summable) {
    out.note = gate.note;
    return out;
  }
  const int i_star = std::max(opts.i_star, 3);
  const std::string target = t.vertex(spec, i_star);
  const int cap = t.stage_of_vertex(i_star) - 1;
  Interval tb_star = t.t_beta(spec, beta, i_star);
  const double eps_abs = 0.25 * opts.tol.convert_to<double>() * tb_star.lo_double();
  ColumnSums cs = column_sums(spec, beta, target, t.stage_of_vertex(i_star), opts.n_max, cap,
                              eps_abs);
  if (!cs.all_certified) {
    out.kind = ExitMeasureResult::Kind::Undecided;
    out.note = cs.note;
    return out;
  }
  const Interval& tb = tb_star;
  HarmonicVector& h = out.vector;
  h.normalization_vertex = t.vertex(spec, 1);
  h.beta = beta;
  h.window = std::move(cs.g);
  h.values.resize(h.window.vertex_count(), Interval(0));
  for (size_t v = 0; v < h.window.vertex_count(); ++v) {
    h.values[v] = cs.total[v] / tb;
  }
  out.certified_stage_cap = cap;
  out.note = "m_t certified for stages <= " + std::to_string(cap);
  return out;
}

std::vector<Interval> normalization_partials(const GraphSpec& spec, const ExitPath& t,
                                             const Interval& beta, int depth,
                                             const ExitOptions& opts) {
  ExitOptions deep = opts;
  deep.i_star = std::max(opts.i_star, depth + 3);
  ExitVectorResult ev = exit_vector(spec, t, beta, deep);
  if (ev.kind != ExitMeasureResult::Kind::Summable) {
    throw PrecisionExhausted("normalization partials require a summable exit: " + ev.note);
  }
  std::vector<Interval> out;
  for (int n = 1; n <= depth; ++n) {
    Interval mt = ev.vector.values[ev.vector.window.id_of(t.vertex(spec, n))];
    out.push_back(t.t_beta(spec, beta, n) * mt);
  }
  return out;
}

}  // namespace kmsgraph
