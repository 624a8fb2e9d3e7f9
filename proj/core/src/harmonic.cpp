#include "kmsgraph/harmonic.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>

#include "kmsgraph/errors.hpp"

namespace kmsgraph {

namespace {

struct Coef {
  Interval num;
  RateTag tag;  // exact only when the value is a single monomial in the weights
};

Coef coef_exact(const Interval& v, const Rational& scalar, const SymbolicReal& expo) {
  Coef c;
  c.num = v;
  c.tag.scalar = scalar;
  c.tag.expo = expo;
  c.tag.exact = true;
  return c;
}

Coef coef_add(const Coef& a, const Coef& b) {
  Coef c;
  c.num = a.num + b.num;
  if (a.tag.exact && b.tag.exact && a.tag.expo == b.tag.expo) {
    c.tag.exact = true;
    c.tag.expo = a.tag.expo;
    c.tag.scalar = a.tag.scalar + b.tag.scalar;
  }
  return c;
}

Coef coef_mul(const Coef& a, const Coef& b) {
  Coef c;
  c.num = a.num * b.num;
  if (a.tag.exact && b.tag.exact) {
    c.tag.exact = true;
    c.tag.scalar = a.tag.scalar * b.tag.scalar;
    c.tag.expo = a.tag.expo + b.tag.expo;
  }
  return c;
}

Coef coef_div(const Coef& a, const Coef& b) {
  Coef c;
  c.num = a.num / b.num;
  if (a.tag.exact && b.tag.exact && b.tag.scalar != 0) {
    c.tag.exact = true;
    c.tag.scalar = a.tag.scalar / b.tag.scalar;
    c.tag.expo = a.tag.expo - b.tag.expo;
  }
  return c;
}

Coef coef_neg(const Coef& a) {
  Coef c = a;
  c.num = -a.num;
  c.tag.scalar = -a.tag.scalar;
  return c;
}

bool is_exact_zero(const Interval& x) {
  return !x.certainly_positive() && !x.certainly_negative() && x.width_double() == 0.0;
}

// --- forward elimination over a materialized window ---------------------------

struct Elimination {
  std::vector<Interval> psi;
  std::vector<char> known;
  std::vector<std::pair<int, VertexId>> order;  // (equation vertex, solved vertex)
  bool negative = false;                        // a forced value is certainly negative
  bool inconsistent = false;                    // leftover equation misses zero
  VertexId negative_at = -1;
};

// Vertices whose full out-edge set is present in the window.  Only those
// carry usable harmonicity equations.
std::vector<char> complete_equations(const GraphSpec& spec, const FiniteGraph& g, int K) {
  std::vector<char> complete(g.vertex_count(), 1);
  if (!spec.ray) return complete;
  const RayTemplate& t = *spec.ray;
  for (size_t v = 0; v < g.vertex_count(); ++v) {
    if (g.stage[v] != K) continue;
    const int phase = (K - 1) % t.period;
    for (const auto& e : t.cross_edges) {
      if (e.delta == 1 && e.phase == phase && t.slot_index(e.src_slot) == g.slot[v]) {
        complete[v] = 0;
        break;
      }
    }
  }
  return complete;
}

Elimination eliminate(const FiniteGraph& g, const std::vector<Interval>& w,
                      const std::vector<char>& complete, VertexId v0) {
  const size_t V = g.vertex_count();
  Elimination el;
  el.psi.assign(V, Interval(0));
  el.known.assign(V, 0);
  el.psi[v0] = Interval(1);
  el.known[v0] = 1;

  // equation at v references v and its out-neighbours
  std::vector<std::vector<VertexId>> refs(V);
  std::vector<int> unknown_count(V, -1);
  std::vector<char> used(V, 0);
  for (size_t v = 0; v < V; ++v) {
    if (!complete[v] || g.out_edges[v].empty()) continue;
    std::vector<VertexId> r{static_cast<VertexId>(v)};
    for (int ei : g.out_edges[v]) {
      if (std::find(r.begin(), r.end(), g.edges[ei].dst) == r.end()) r.push_back(g.edges[ei].dst);
    }
    refs[v] = std::move(r);
    unknown_count[v] = 0;
    for (VertexId x : refs[v]) unknown_count[v] += !el.known[x];
  }

  auto solve_one = [&](VertexId eq) -> bool {
    VertexId x = -1;
    for (VertexId y : refs[eq]) {
      if (!el.known[y]) x = y;
    }
    if (x < 0) return false;
    // 0 = -psi_eq + sum_e w_e psi_{dst}; isolate psi_x
    Interval cx(0);
    Interval rhs(0);
    if (static_cast<VertexId>(eq) == x) cx -= Interval(1);
    else rhs += el.psi[eq];
    for (int ei : g.out_edges[eq]) {
      const auto& e = g.edges[ei];
      if (e.dst == x) cx += w[ei];
      else rhs -= w[ei] * el.psi[e.dst];
    }
    if (cx.contains_zero()) return false;
    el.psi[x] = rhs / cx;
    el.known[x] = 1;
    el.order.emplace_back(eq, x);
    if (el.psi[x].certainly_negative()) {
      el.negative = true;
      el.negative_at = x;
    }
    return true;
  };

  bool progress = true;
  while (progress && !el.negative) {
    progress = false;
    for (size_t v = 0; v < V; ++v) {
      if (unknown_count[v] != 1 || used[v]) continue;
      if (solve_one(static_cast<VertexId>(v))) {
        used[v] = 1;
        progress = true;
        VertexId x = el.order.back().second;
        for (size_t u = 0; u < V; ++u) {
          if (unknown_count[u] < 0 || used[u]) continue;
          if (std::find(refs[u].begin(), refs[u].end(), x) != refs[u].end()) --unknown_count[u];
        }
      }
      if (el.negative) break;
    }
  }

  // leftover fully-known equations are consistency constraints
  for (size_t v = 0; v < V && !el.negative; ++v) {
    if (unknown_count[v] != 0 || used[v]) continue;
    Interval res = -el.psi[v];
    for (int ei : g.out_edges[v]) res += w[ei] * el.psi[g.edges[ei].dst];
    if (res.certainly_positive() || res.certainly_negative()) el.inconsistent = true;
  }
  return el;
}

// --- generic stage step -------------------------------------------------------

struct StepMap {
  // expr[s][t]: coefficient of old slot t in the new value of slot s
  std::vector<std::vector<Coef>> expr;
  std::vector<int> topo;  // slot evaluation order by cross-slot dependency
  bool ok = false;
  std::string why;
};

StepMap derive_step_map(const GraphSpec& spec, const FiniteGraph& g,
                        const std::vector<Interval>& w, const std::vector<RateTag>& wtag,
                        const Elimination& el, int from_stage) {
  const RayTemplate& t = *spec.ray;
  const int m = static_cast<int>(t.slots.size());
  StepMap sm;
  sm.expr.assign(m, std::vector<Coef>(m));
  std::vector<char> solved(m, 0);

  // replay the recorded eliminations that produced stage from_stage+1
  for (const auto& [eq, x] : el.order) {
    if (g.stage[x] != from_stage + 1) continue;
    const int sx = g.slot[x];
    const int eq_stage = g.stage[eq];
    if (eq_stage != from_stage && eq_stage != from_stage + 1) {
      sm.why = "stage step uses equations outside two consecutive stages";
      return sm;
    }
    // expression of a referenced vertex in (old, new) slot coordinates
    auto rep = [&](VertexId y, std::vector<Coef>& row, const Coef& factor) -> bool {
      const int stage_y = g.stage[y];
      const int sy = g.slot[y];
      if (stage_y == from_stage) {
        row[sy] = coef_add(row[sy], factor);
        return true;
      }
      if (stage_y == from_stage + 1 && solved[sy]) {
        for (int u = 0; u < m; ++u) {
          if (is_exact_zero(sm.expr[sy][u].num)) continue;
          row[u] = coef_add(row[u], coef_mul(factor, sm.expr[sy][u]));
        }
        return true;
      }
      sm.why = "stage step references an unresolved or out-of-range stage";
      return false;
    };

    std::vector<Coef> rhs(m);
    Coef cx;  // coefficient of the new unknown
    bool cx_set = false;
    auto add_cx = [&](const Coef& c) { cx = cx_set ? coef_add(cx, c) : c; cx_set = true; };

    const Coef minus_one = coef_exact(Interval(-1), Rational(-1), spec.zero_value());
    if (eq == x) {
      add_cx(minus_one);
    } else {
      if (!rep(eq, rhs, coef_neg(minus_one))) return sm;  // +1 * psi_eq ... moved to rhs with sign below
    }
    // 0 = -psi_eq + sum w_e psi_dst  =>  cx * x = psi_eq - sum_{dst != x} w_e psi_dst
    // assemble as cx * x + sum(rhs contributions) = 0 with rhs holding -psi_eq sign flipped later;
    // here: rhs currently holds +psi_eq when eq != x
    for (int ei : g.out_edges[eq]) {
      const auto& e = g.edges[ei];
      Coef we = coef_exact(w[ei], wtag[ei].scalar, wtag[ei].expo);
      if (e.dst == x) {
        add_cx(we);
      } else {
        if (!rep(e.dst, rhs, coef_neg(we))) return sm;
      }
    }
    if (!cx_set || cx.num.contains_zero()) {
      sm.why = "singular pivot in the stage step";
      return sm;
    }
    for (int u = 0; u < m; ++u) {
      if (is_exact_zero(rhs[u].num)) continue;
      sm.expr[sx][u] = coef_div(rhs[u], cx);
    }
    solved[sx] = 1;
  }
  for (int s = 0; s < m; ++s) {
    if (!solved[s]) {
      sm.why = "a slot is not determined by the stage step";
      return sm;
    }
  }

  // cross-slot dependency must be acyclic (triangular step)
  std::vector<int> indeg(m, 0);
  std::vector<std::vector<int>> out(m);
  for (int s = 0; s < m; ++s) {
    for (int u = 0; u < m; ++u) {
      if (s == u || is_exact_zero(sm.expr[s][u].num)) continue;
      out[u].push_back(s);
      ++indeg[s];
    }
  }
  std::deque<int> q;
  for (int s = 0; s < m; ++s) {
    if (indeg[s] == 0) q.push_back(s);
  }
  while (!q.empty()) {
    int s = q.front();
    q.pop_front();
    sm.topo.push_back(s);
    for (int y : out[s]) {
      if (--indeg[y] == 0) q.push_back(y);
    }
  }
  if (static_cast<int>(sm.topo.size()) != m) {
    sm.why = "cross-slot coupling is not triangular";
    return sm;
  }
  sm.ok = true;
  return sm;
}

// --- closed forms ---------------------------------------------------------------

enum class RateOrder { Less, Greater, Equal, Unknown };

RateOrder compare_rates(const GeoTerm& a, const GeoTerm& b) {
  if (a.tag.equals(b.tag)) return RateOrder::Equal;
  if (a.rate.certainly_less(b.rate)) return RateOrder::Less;
  if (b.rate.certainly_less(a.rate)) return RateOrder::Greater;
  // numerically overlapping: exact tags may still decide equality
  return RateOrder::Unknown;
}

bool build_slot_forms(const StepMap& sm, const std::vector<std::vector<Interval>>& anchor,
                      std::vector<SlotForm>& forms, std::string& why) {
  const int m = static_cast<int>(sm.expr.size());
  forms.assign(m, SlotForm{});
  for (int s : sm.topo) {
    const Coef& diag = sm.expr[s][s];
    Interval a = diag.num;
    if (!a.certainly_positive()) {
      why = "stage-step diagonal rate not certainly positive";
      return false;
    }
    GeoTerm self;
    self.rate = a;
    self.tag = diag.tag;

    std::vector<GeoTerm> drives;
    for (int u = 0; u < m; ++u) {
      if (u == s || is_exact_zero(sm.expr[s][u].num)) continue;
      for (const GeoTerm& g : forms[u].terms) {
        GeoTerm d = g;
        d.coef = sm.expr[s][u].num * g.coef;
        drives.push_back(d);
      }
    }

    std::vector<GeoTerm> terms;
    Interval part_at_0(0);
    for (const GeoTerm& d : drives) {
      GeoTerm probe;
      probe.rate = d.rate;
      probe.tag = d.tag;
      RateOrder ord = compare_rates(probe, self);
      if (ord == RateOrder::Unknown) {
        why = "drive rate indistinguishable from the diagonal at this precision";
        return false;
      }
      if (ord != RateOrder::Equal) {
        // nonresonant particular solutions up to quadratic polynomial factors
        if (d.kpow == 0) {
          GeoTerm p = d;
          p.coef = d.coef / (d.rate - a);
          terms.push_back(p);
          part_at_0 += p.coef;
        } else if (d.kpow == 1) {
          Interval alpha = d.coef / (d.rate - a);
          Interval beta = -(d.rate * alpha) / (d.rate - a);
          GeoTerm p1 = d;
          p1.coef = alpha;
          GeoTerm p0 = d;
          p0.kpow = 0;
          p0.coef = beta;
          terms.push_back(p1);
          terms.push_back(p0);
          part_at_0 += beta;
        } else {
          why = "polynomial drive order beyond supported range";
          return false;
        }
      } else {
        // resonant: drive c j^p a^j lifts the polynomial degree
        if (d.kpow == 0) {
          GeoTerm p = d;
          p.kpow = 1;
          p.coef = d.coef / a;
          p.rate = self.rate;
          p.tag = self.tag;
          terms.push_back(p);
        } else if (d.kpow == 1) {
          Interval alpha = d.coef / (Interval(2) * a);
          GeoTerm p2 = d;
          p2.kpow = 2;
          p2.coef = alpha;
          p2.rate = self.rate;
          p2.tag = self.tag;
          GeoTerm p1 = d;
          p1.kpow = 1;
          p1.coef = -alpha;
          p1.rate = self.rate;
          p1.tag = self.tag;
          terms.push_back(p2);
          terms.push_back(p1);
        } else {
          why = "resonant drive order beyond supported range";
          return false;
        }
      }
    }
    self.coef = anchor[0][s] - part_at_0;
    terms.push_back(self);

    // merge terms sharing an exact rate tag and polynomial degree
    std::vector<GeoTerm> merged;
    for (const GeoTerm& t : terms) {
      bool done = false;
      for (GeoTerm& mt : merged) {
        if (mt.kpow == t.kpow && mt.tag.equals(t.tag)) {
          mt.coef += t.coef;
          done = true;
          break;
        }
      }
      if (!done) merged.push_back(t);
    }
    forms[s].terms = std::move(merged);
  }
  return true;
}

Interval eval_form(const SlotForm& form, long j) {
  Interval acc(0);
  for (const GeoTerm& t : form.terms) {
    Interval pw(1);
    {
      // rate^j by binary exponentiation
      Interval base = t.rate;
      long e = j;
      while (e > 0) {
        if (e & 1) pw *= base;
        base *= base;
        e >>= 1;
      }
    }
    Interval poly(1);
    for (int i = 0; i < t.kpow; ++i) poly *= Interval(j);
    acc += t.coef * pw * poly;
  }
  return acc;
}

}  // namespace

// --- HarmonicVector -----------------------------------------------------------

Interval HarmonicVector::value_of(const std::string& vertex) const {
  auto it = window.vertex_index.find(vertex);
  if (it == window.vertex_index.end()) throw OutOfRegion(vertex);
  return values[it->second];
}

Interval HarmonicVector::value_at_stage(int slot, int stage) const {
  if (!has_closed_form) throw OutOfRegion("no closed form on this vector");
  if (stage < k0) throw OutOfRegion("stage below the closed-form anchor");
  return eval_form(slot_forms.at(slot), stage - k0);
}

// --- solve_ray ------------------------------------------------------------------

namespace {

HarmonicResult undecided(const std::string& why) {
  HarmonicResult r;
  r.kind = HarmonicResult::Kind::Undecided;
  r.note = why;
  return r;
}

}  // namespace

HarmonicResult solve_ray(const GraphSpec& spec, const Interval& beta,
                         const std::string& v0, int stages) {
  if (spec.is_finite()) throw std::invalid_argument("solve_ray requires a ray template");
  if (spec.has_declared_infinite_emitter()) throw NotRowFinite("harmonic solve requires row-finite");
  if (spec.ray->period != 1) {
    return undecided("period > 1 stage recursions are not supported; raise precision or use period-1 form");
  }
  const int K = std::max(stages, 12);
  FiniteGraph g = materialize(spec, K);
  VertexId root = g.id_of(v0);

  std::vector<Interval> w(g.edges.size(), Interval(0));
  std::vector<RateTag> wtag(g.edges.size());
  {
    std::map<SymbolicReal, Interval, SymbolicLess> cache;
    for (size_t i = 0; i < g.edges.size(); ++i) {
      const SymbolicReal& f = g.edges[i].f;
      auto it = cache.find(f);
      if (it == cache.end()) it = cache.emplace(f, Interval::exp_of(-(beta * f.eval(spec.symbols)))).first;
      w[i] = it->second;
      wtag[i].scalar = Rational(1);
      wtag[i].expo = f;
      wtag[i].exact = true;
    }
  }

  std::vector<char> complete = complete_equations(spec, g, K);
  Elimination el = eliminate(g, w, complete, root);
  if (el.negative) {
    HarmonicResult r;
    r.kind = HarmonicResult::Kind::NoSolution;
    r.note = "forced value certainly negative at " + g.vertex_names[el.negative_at];
    return r;
  }
  if (el.inconsistent) {
    HarmonicResult r;
    r.kind = HarmonicResult::Kind::NoSolution;
    r.note = "harmonicity equations are inconsistent with the normalization";
    return r;
  }
  for (size_t v = 0; v < g.vertex_count(); ++v) {
    if (!el.known[v] && g.stage[v] < K) {
      return undecided("forward elimination stuck: the harmonic cone is not one-dimensional "
                       "for this template (vertex " + g.vertex_names[v] + ")");
    }
  }

  const int k1 = 4;  // anchor past the attach transient; step uniform from stage 2
  if (K < k1 + 4) return undecided("window too small");
  StepMap sm = derive_step_map(spec, g, w, wtag, el, k1 + 1);
  if (!sm.ok) return undecided(sm.why);

  const int m = static_cast<int>(spec.ray->slots.size());
  std::vector<std::vector<Interval>> anchor(1, std::vector<Interval>(m, Interval(0)));
  for (int s = 0; s < m; ++s) {
    anchor[0][s] = el.psi[g.id_of(spec.ray->instance_name(s, k1))];
  }
  std::vector<SlotForm> forms;
  std::string why;
  if (!build_slot_forms(sm, anchor, forms, why)) return undecided(why);

  // closed form must reproduce the propagated window
  for (int k = k1; k <= K; ++k) {
    for (int s = 0; s < m; ++s) {
      Interval a = eval_form(forms[s], k - k1);
      Interval b = el.psi[g.id_of(spec.ray->instance_name(s, k))];
      if (a.certainly_less(b) || b.certainly_less(a)) {
        return undecided("closed form disagrees with propagation (internal)");
      }
    }
  }

  // dominant-mode sign per slot
  long horizon = 0;
  for (int s = 0; s < m; ++s) {
    std::vector<GeoTerm> ts = forms[s].terms;
    std::sort(ts.begin(), ts.end(), [](const GeoTerm& a, const GeoTerm& b) {
      double am = a.rate.mid_double(), bm = b.rate.mid_double();
      if (am != bm) return am > bm;
      return a.kpow > b.kpow;
    });
    for (size_t i = 0; i + 1 < ts.size(); ++i) {
      RateOrder ord = compare_rates(ts[i], ts[i + 1]);
      if (ord == RateOrder::Unknown) return undecided("rates not separable at this precision");
      if (ord == RateOrder::Less) return undecided("rate order inconsistent (internal)");
    }
    const GeoTerm& dom = ts.front();
    if (!dom.rate.certainly_positive()) return undecided("dominant rate not positive");
    if (dom.coef.certainly_negative()) {
      HarmonicResult r;
      r.kind = HarmonicResult::Kind::NoSolution;
      r.note = "dominant growth mode carries a negative coefficient (slot " +
               spec.ray->slots[s].name + ")";
      return r;
    }
    if (!dom.coef.certainly_positive()) {
      return undecided("dominant mode coefficient straddles zero at this precision");
    }
    // dominance horizon: beyond it the dominant term outweighs all others
    long J = 4;
    bool ok = false;
    for (; J <= (1L << 22); J *= 2) {
      Interval lhs = dom.coef * eval_form(SlotForm{{GeoTerm{Interval(1), dom.rate, dom.tag, dom.kpow}}}, J);
      Interval rhs(0);
      bool ratio_ok = true;
      for (size_t i = 1; i < ts.size(); ++i) {
        Interval mag = Interval::hull(ts[i].coef, -ts[i].coef);
        rhs += mag * eval_form(SlotForm{{GeoTerm{Interval(1), ts[i].rate, ts[i].tag, ts[i].kpow}}}, J);
        if (ts[i].tag.equals(dom.tag) && ts[i].kpow < dom.kpow) {
          continue;  // same rate, lower polynomial degree: the gap only widens
        }
        // growth comparison must keep the dominant term ahead for k > J
        Interval margin = ts[i].rate * Interval(Rational(J + 1, J)) * Interval(Rational(J + 1, J));
        if (!margin.certainly_less(dom.rate)) ratio_ok = false;
      }
      if (ratio_ok && rhs.certainly_less(lhs)) {
        ok = true;
        break;
      }
    }
    if (!ok) return undecided("no certified dominance horizon");
    horizon = std::max(horizon, J);
  }

  if (k1 + horizon > K) {
    if (k1 + horizon > 4096) return undecided("dominance horizon too deep");
    return solve_ray(spec, beta, v0, static_cast<int>(k1 + horizon + 8));
  }

  // strict positivity of the finite window up to the horizon
  for (size_t v = 0; v < g.vertex_count(); ++v) {
    if (g.stage[v] > k1 + horizon || !el.known[v]) continue;
    if (el.psi[v].certainly_negative()) {
      HarmonicResult r;
      r.kind = HarmonicResult::Kind::NoSolution;
      r.note = "value certainly negative at " + g.vertex_names[v];
      return r;
    }
    if (!el.psi[v].certainly_positive()) {
      return undecided("value not certainly positive at " + g.vertex_names[v]);
    }
  }

  HarmonicResult res;
  res.kind = HarmonicResult::Kind::Exists;
  HarmonicVector& h = res.vector;
  h.normalization_vertex = v0;
  h.beta = beta;
  h.window = std::move(g);
  h.values = std::move(el.psi);
  h.has_closed_form = true;
  h.k0 = k1;
  h.slot_forms = std::move(forms);

  // residual bound over interior vertices
  Interval worst(0);
  for (size_t v = 0; v < h.window.vertex_count(); ++v) {
    if (!complete[v]) continue;
    Interval r = -h.values[v];
    for (int ei : h.window.out_edges[v]) r += w[ei] * h.values[h.window.edges[ei].dst];
    worst = Interval::hull(worst, Interval::hull(r, -r));
  }
  h.residual_bound = worst;
  return res;
}

// --- solve_finite ---------------------------------------------------------------

HarmonicResult solve_finite(const GraphSpec& spec, const Interval& beta,
                            const std::string& v0, const Rational& tol,
                            int max_iterations) {
  if (!spec.is_finite()) throw std::invalid_argument("solve_finite requires a finite graph");
  ValidationReport rep = validate(spec, 4);
  if (rep.strongly_connected != Tri::Yes) {
    throw InvalidHypothesis("solve_finite requires a strongly connected finite graph");
  }
  FiniteGraph g = materialize(spec, 0);
  VertexId root = g.id_of(v0);
  const size_t V = g.vertex_count();

  std::vector<Interval> w;
  w.reserve(g.edges.size());
  for (const auto& e : g.edges) w.push_back(Interval::exp_of(-(beta * e.f.eval(spec.symbols))));

  // power iteration on I + A in doubles (primitive, so it converges)
  std::vector<double> wd(w.size());
  for (size_t i = 0; i < w.size(); ++i) wd[i] = w[i].mid_double();
  std::vector<double> u(V, 1.0), nu(V);
  for (int it = 0; it < max_iterations; ++it) {
    double norm = 0;
    for (size_t v = 0; v < V; ++v) nu[v] = u[v];
    for (size_t v = 0; v < V; ++v) {
      for (int ei : g.out_edges[v]) nu[v] += wd[ei] * u[g.edges[ei].dst];
    }
    for (double x : nu) norm = std::max(norm, x);
    for (size_t v = 0; v < V; ++v) u[v] = nu[v] / norm;
  }

  // Collatz-Wielandt bounds from the exact dyadic vector u
  std::vector<Interval> ui(V, Interval(0));
  for (size_t v = 0; v < V; ++v) {
    Rational q(u[v] <= 0 ? Rational(1, BigInt(1) << 40) : Rational(u[v]));
    ui[v] = Interval(q);
  }
  Interval lo = Interval::pos_infinity();
  Interval hi = -Interval::pos_infinity();
  bool first = true;
  for (size_t v = 0; v < V; ++v) {
    Interval av(0);
    for (int ei : g.out_edges[v]) av += w[ei] * ui[g.edges[ei].dst];
    Interval ratio = av / ui[v];
    lo = first ? ratio : (ratio.certainly_less(lo) ? ratio : lo);
    hi = first ? ratio : (hi.certainly_less(ratio) ? ratio : hi);
    first = false;
  }
  Interval radius = Interval::hull(lo, hi);

  HarmonicResult res;
  res.spectral_radius = radius;
  Interval dev_lo = radius - Interval(Rational(1) - tol);
  Interval dev_hi = radius - Interval(Rational(1) + tol);
  if (dev_hi.certainly_positive() || dev_lo.certainly_negative()) {
    res.kind = HarmonicResult::Kind::NoSolution;
    res.note = "spectral radius outside [1 - tol, 1 + tol]";
    return res;
  }
  if (!(radius.certainly_greater(Rational(1) - tol * 2) &&
        radius.certainly_less(Rational(1) + tol * 2))) {
    throw PrecisionExhausted("spectral radius enclosure too wide for the requested tol");
  }

  res.kind = HarmonicResult::Kind::Exists;
  HarmonicVector& h = res.vector;
  h.normalization_vertex = v0;
  h.beta = beta;
  h.values.assign(V, Interval(0));
  for (size_t v = 0; v < V; ++v) h.values[v] = ui[v] / ui[root];
  h.window = std::move(g);
  Interval worst(0);
  for (size_t v = 0; v < V; ++v) {
    Interval r = -h.values[v];
    for (int ei : h.window.out_edges[v]) r += w[ei] * h.values[h.window.edges[ei].dst];
    worst = Interval::hull(worst, Interval::hull(r, -r));
  }
  h.residual_bound = worst;
  return res;
}

// --- existence threshold ---------------------------------------------------------

ExistenceBracket existence_threshold(const GraphSpec& spec, const std::string& v0,
                                     const Rational& lo, const Rational& hi,
                                     const Rational& tol) {
  auto verdict = [&](const Rational& b) {
    return solve_ray(spec, Interval(b), v0).kind;
  };
  if (verdict(lo) != HarmonicResult::Kind::NoSolution ||
      verdict(hi) != HarmonicResult::Kind::Exists) {
    throw BracketInvalid("existence bracket must run NoSolution -> Exists");
  }
  ExistenceBracket out;
  out.lo = lo;
  out.hi = hi;
  out.evaluations = 2;
  while (out.hi - out.lo > tol) {
    Rational mid = (out.lo + out.hi) / 2;
    ++out.evaluations;
    auto k = verdict(mid);
    if (k == HarmonicResult::Kind::Exists) out.hi = mid;
    else if (k == HarmonicResult::Kind::NoSolution) out.lo = mid;
    else return out;  // undecidable at this precision; bracket stays valid
  }
  out.decided = true;
  return out;
}

Interval cylinder_measure(const HarmonicVector& h, const GraphSpec& spec,
                          const PathPrefix& mu) {
  if (!mu.composes(h.window)) throw OutOfRegion("path does not compose in the window");
  VertexId end = mu.endpoint(h.window);
  Interval psi = h.values.at(end);
  Interval fmu = mu.value(h.window, spec).eval(spec.symbols);
  return Interval::exp_of(-(h.beta * fmu)) * psi;
}

}  // namespace kmsgraph
