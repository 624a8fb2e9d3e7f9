#include "kmsgraph/geodesics.hpp"

#include <algorithm>
#include <deque>
#include <queue>
#include <sstream>

#include "kmsgraph/errors.hpp"

namespace kmsgraph {

namespace {

// exact-first comparison; numeric separation otherwise
bool value_less(const SymbolicReal& a, const SymbolicReal& b, const SymbolTable& table) {
  if (a == b) return false;
  if (a.is_rational() && b.is_rational()) return a.coeff(0) < b.coeff(0);
  Interval ia = a.eval(table), ib = b.eval(table);
  if (ia.certainly_less(ib)) return true;
  if (ib.certainly_less(ia)) return false;
  throw PrecisionExhausted("ambiguous minimal-value comparison between " +
                           a.to_string(table) + " and " + b.to_string(table));
}

std::vector<std::optional<SymbolicReal>> dijkstra(const GraphSpec& spec, const FiniteGraph& g,
                                                  VertexId root) {
  const SymbolTable& table = spec.symbols;
  std::vector<std::optional<SymbolicReal>> dist(g.vertex_count());
  std::vector<char> settled(g.vertex_count(), 0);
  using Entry = std::pair<double, VertexId>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> pq;
  dist[root] = spec.zero_value();
  pq.push({0.0, root});
  while (!pq.empty()) {
    auto [key, u] = pq.top();
    pq.pop();
    if (settled[u]) continue;
    settled[u] = 1;
    for (int ei : g.out_edges[u]) {
      const auto& e = g.edges[ei];
      if (settled[e.dst]) continue;
      SymbolicReal cand = *dist[u] + e.f;
      if (!dist[e.dst] || value_less(cand, *dist[e.dst], table)) {
        dist[e.dst] = cand;
        pq.push({cand.eval(table).mid_double(), e.dst});
      }
    }
  }
  return dist;
}

}  // namespace

SymbolicReal MinFDistances::distance_to(const std::string& vertex) const {
  auto it = tr.g.vertex_index.find(vertex);
  if (it == tr.g.vertex_index.end() || !dist[it->second]) throw Unreachable(vertex);
  return *dist[it->second];
}

MinFDistances min_f_distances(const GraphSpec& spec, const std::string& v, int N) {
  ValidationReport rep = validate(spec, 2);
  if (rep.potential_nonneg != Tri::Yes) {
    throw NegativePotential("minimal-value paths require F >= 0 on all edges");
  }
  MinFDistances out;
  out.tr = truncate(spec, v, N);
  out.dist = dijkstra(spec, out.tr.g, out.tr.root);

  const int p = spec.is_finite() ? 1 : spec.ray->period;
  Truncation bigger = truncate(spec, v, N + p);
  auto dist2 = dijkstra(spec, bigger.g, bigger.root);
  out.stable = true;
  for (size_t w = 0; w < out.tr.g.vertex_count(); ++w) {
    auto it = bigger.g.vertex_index.find(out.tr.g.vertex_names[w]);
    if (it == bigger.g.vertex_index.end()) continue;
    const auto& a = out.dist[w];
    const auto& b = dist2[it->second];
    if (a.has_value() != b.has_value() || (a && !(*a == *b))) out.stable = false;
  }

  // per-slot distance increments over one period, exact, over the last periods
  out.periodic_increments = true;
  if (!spec.is_finite()) {
    const RayTemplate& t = *spec.ray;
    int deepest = 0;
    for (size_t w = 0; w < out.tr.g.vertex_count(); ++w) deepest = std::max(deepest, out.tr.g.stage[w]);
    for (size_t s = 0; s < t.slots.size() && out.periodic_increments; ++s) {
      std::optional<SymbolicReal> incr;
      for (int k = deepest - 3 * p; k + p <= deepest - p; ++k) {
        if (k < 1) continue;
        auto a = out.tr.g.vertex_index.find(t.instance_name(static_cast<int>(s), k));
        auto b = out.tr.g.vertex_index.find(t.instance_name(static_cast<int>(s), k + p));
        if (a == out.tr.g.vertex_index.end() || b == out.tr.g.vertex_index.end()) continue;
        if (!out.dist[a->second] || !out.dist[b->second]) continue;
        SymbolicReal d = *out.dist[b->second] - *out.dist[a->second];
        if (!incr) incr = d;
        else if (!(*incr == d)) out.periodic_increments = false;
      }
    }
  }
  return out;
}

SymbolicReal min_f_distance(const GraphSpec& spec, const std::string& v,
                            const std::string& w, int N, Interval* numeric) {
  MinFDistances d = min_f_distances(spec, v, N);
  SymbolicReal val = d.distance_to(w);
  if (numeric) *numeric = val.eval(spec.symbols);
  return val;
}

// --- Bratteli diagram of geodesic prefix classes -----------------------------

namespace {

struct TightStructure {
  MinFDistances d;
  std::vector<std::vector<int>> tight_out;  // per vertex: tight edge indices
  std::vector<char> extendable;             // infinite tight continuation exists
  std::vector<char> sink_vinf;              // terminal V_inf endpoint
  std::vector<std::string> warnings;
};

TightStructure tight_structure(const GraphSpec& spec, const std::string& v, int n_levels) {
  TightStructure ts;
  const int p = spec.is_finite() ? 1 : spec.ray->period;
  ts.d = min_f_distances(spec, v, n_levels + p + 6);
  if (!ts.d.stable) {
    ts.warnings.push_back("minimal values not stabilized under a one-period-larger window");
  }
  if (!ts.d.periodic_increments) {
    ts.warnings.push_back("per-period distance increments did not stabilize exactly");
  }
  const FiniteGraph& g = ts.d.tr.g;
  ts.tight_out.assign(g.vertex_count(), {});
  for (size_t ei = 0; ei < g.edges.size(); ++ei) {
    const auto& e = g.edges[ei];
    if (!ts.d.dist[e.src] || !ts.d.dist[e.dst]) continue;
    if (*ts.d.dist[e.src] + e.f == *ts.d.dist[e.dst]) {
      ts.tight_out[e.src].push_back(static_cast<int>(ei));
    }
  }

  ts.sink_vinf.assign(g.vertex_count(), 0);
  for (size_t w = 0; w < g.vertex_count(); ++w) {
    if (spec.v_inf.count(g.vertex_names[w]) && g.out_edges[w].empty()) ts.sink_vinf[w] = 1;
  }

  // a prefix extends to an infinite geodesic iff arbitrarily deep stages are
  // tight-reachable; with F >= 0 and no zero-value tight cycle this is the
  // only unbounded option (tight cycles would carry value zero)
  int deepest = 0;
  for (size_t w = 0; w < g.vertex_count(); ++w) deepest = std::max(deepest, g.stage[w]);
  std::vector<char> deep(g.vertex_count(), 0);
  std::deque<VertexId> q;
  for (size_t w = 0; w < g.vertex_count(); ++w) {
    const bool deep_stage = !spec.is_finite() && g.stage[w] >= deepest - 1;
    if ((deep_stage || ts.sink_vinf[w]) && ts.d.dist[w]) {
      deep[w] = 1;
      q.push_back(static_cast<VertexId>(w));
    }
  }
  std::vector<std::vector<int>> tight_in(g.vertex_count());
  for (size_t w = 0; w < g.vertex_count(); ++w) {
    for (int ei : ts.tight_out[w]) tight_in[g.edges[ei].dst].push_back(static_cast<int>(w));
  }
  while (!q.empty()) {
    VertexId w = q.front();
    q.pop_front();
    for (int u : tight_in[w]) {
      if (!deep[u]) {
        deep[u] = 1;
        q.push_back(u);
      }
    }
  }
  ts.extendable = deep;
  return ts;
}

}  // namespace

BratteliDiagram bratteli(const GraphSpec& spec, const std::string& v, int n_levels,
                         int member_cap) {
  if (spec.has_declared_infinite_emitter()) {
    throw NotRowFinite("geodesic analysis requires row-finite graphs (sinks allowed)");
  }
  TightStructure ts = tight_structure(spec, v, n_levels);
  const FiniteGraph& g = ts.d.tr.g;
  BratteliDiagram out;
  out.warnings = ts.warnings;

  struct Node {
    VertexId endpoint;
    std::uintmax_t mult;
    bool terminal;
    std::vector<std::vector<std::string>> members;
  };

  VertexId root = ts.d.tr.root;
  if (!ts.extendable[root] && !ts.sink_vinf[root]) {
    out.summary = BratteliDiagram::SummaryKind::Empty;
    return out;
  }

  std::vector<Node> cur{{root, 1, ts.sink_vinf[root] != 0, {{}}}};
  auto snapshot = [&](const std::vector<Node>& nodes) {
    BratteliLevel lvl;
    for (const auto& n : nodes) {
      GeodesicClass c;
      c.endpoint = g.vertex_names[n.endpoint];
      c.f_value = *ts.d.dist[n.endpoint];
      c.multiplicity = n.mult;
      c.terminal = n.terminal;
      c.members = n.members;
      lvl.classes.push_back(std::move(c));
    }
    return lvl;
  };
  out.levels.push_back(snapshot(cur));

  for (int level = 1; level <= n_levels; ++level) {
    std::map<VertexId, Node> next;
    std::vector<std::vector<int>> counts(cur.size());
    for (size_t ci = 0; ci < cur.size(); ++ci) {
      const Node& from = cur[ci];
      if (from.terminal) {
        counts[ci] = {};
        continue;
      }
      std::map<VertexId, int> edge_mult;
      for (int ei : ts.tight_out[from.endpoint]) {
        VertexId dst = g.edges[ei].dst;
        if (!ts.extendable[dst] && !ts.sink_vinf[dst]) continue;
        ++edge_mult[dst];
      }
      for (const auto& [dst, cnt] : edge_mult) {
        Node& node = next.try_emplace(dst, Node{dst, 0, ts.sink_vinf[dst] != 0, {}}).first->second;
        if (node.mult > (std::uintmax_t(1) << 62)) throw Divergent("class multiplicity overflow");
        node.mult += from.mult * static_cast<std::uintmax_t>(cnt);
        for (const auto& m : from.members) {
          if (static_cast<int>(node.members.size()) >= member_cap) break;
          for (int ei : ts.tight_out[from.endpoint]) {
            if (g.edges[ei].dst != dst) continue;
            auto path = m;
            path.push_back(g.edges[ei].label);
            node.members.push_back(std::move(path));
            if (static_cast<int>(node.members.size()) >= member_cap) break;
          }
        }
      }
    }
    std::vector<Node> nxt;
    for (auto& [dst, node] : next) nxt.push_back(std::move(node));
    // connection counts aligned with the class orders
    for (size_t ci = 0; ci < cur.size(); ++ci) {
      counts[ci].assign(nxt.size(), 0);
      if (cur[ci].terminal) continue;
      for (int ei : ts.tight_out[cur[ci].endpoint]) {
        VertexId dst = g.edges[ei].dst;
        for (size_t cj = 0; cj < nxt.size(); ++cj) {
          if (nxt[cj].endpoint == dst) ++counts[ci][cj];
        }
      }
    }
    out.edge_counts.push_back(std::move(counts));
    cur = std::move(nxt);
    out.levels.push_back(snapshot(cur));
    if (cur.empty()) break;
  }

  // summary over the trailing half of the computed levels
  const int top = static_cast<int>(out.levels.size()) - 1;
  if (top < 1 || out.levels[top].classes.empty()) {
    out.summary = BratteliDiagram::SummaryKind::Empty;
    return out;
  }
  const int from = std::max(1, top / 2);
  bool all_singleton = true;
  bool single_class = true;
  int class_count = static_cast<int>(out.levels[from].classes.size());
  bool count_constant = true;
  for (int l = from; l <= top; ++l) {
    const auto& cls = out.levels[l].classes;
    if (static_cast<int>(cls.size()) != class_count) count_constant = false;
    if (cls.size() != 1) single_class = false;
    for (const auto& c : cls) {
      if (c.multiplicity != 1) all_singleton = false;
    }
  }
  if (all_singleton && count_constant) {
    out.summary = BratteliDiagram::SummaryKind::FiniteSimplex;
    out.simplex_points = class_count;
  } else if (single_class) {
    bool integer_ratios = true;
    std::vector<int> ratios;
    for (int l = from; l < top; ++l) {
      std::uintmax_t a = out.levels[l].classes[0].multiplicity;
      std::uintmax_t b = out.levels[l + 1].classes[0].multiplicity;
      if (a == 0 || b % a != 0) {
        integer_ratios = false;
        break;
      }
      ratios.push_back(static_cast<int>(b / a));
    }
    bool growing = integer_ratios;
    for (int r : ratios) {
      if (r < 2) growing = false;
    }
    if (growing && !ratios.empty()) {
      out.summary = BratteliDiagram::SummaryKind::UHF;
      out.uhf_ratios = ratios;
      bool constant = std::all_of(ratios.begin(), ratios.end(),
                                  [&](int r) { return r == ratios[0]; });
      if (constant) {
        int r = ratios[0];
        for (int pf = 2; pf <= r; ++pf) {
          while (r % pf == 0) {
            out.uhf_supernatural[pf] = "inf";
            r /= pf;
          }
        }
      }
      for (const auto& lvl : out.levels) {
        if (!lvl.classes.empty()) out.chain_multiplicities.push_back(lvl.classes[0].multiplicity);
      }
    } else {
      out.summary = BratteliDiagram::SummaryKind::AF;
    }
  } else {
    out.summary = BratteliDiagram::SummaryKind::AF;
  }
  return out;
}

std::vector<GeodesicClass> geodesic_classes(const GraphSpec& spec, const std::string& v,
                                            int level, int member_cap) {
  BratteliDiagram d = bratteli(spec, v, level, member_cap);
  if (level >= static_cast<int>(d.levels.size())) return {};
  return d.levels[level].classes;
}

std::string BratteliDiagram::summary_text() const {
  std::ostringstream os;
  switch (summary) {
    case SummaryKind::Empty:
      os << "no geodesics from the root";
      break;
    case SummaryKind::FiniteSimplex:
      os << "simplex with " << simplex_points << " extreme point"
         << (simplex_points == 1 ? "" : "s");
      break;
    case SummaryKind::UHF: {
      os << "UHF(";
      bool first = true;
      for (const auto& [p, e] : uhf_supernatural) {
        os << (first ? "" : " * ") << p << "^" << e;
        first = false;
      }
      if (uhf_supernatural.empty()) os << "ratios vary";
      os << ")";
      break;
    }
    case SummaryKind::AF:
      os << "AF with dimension sequence";
      for (const auto& lvl : levels) {
        os << " [";
        for (size_t i = 0; i < lvl.classes.size(); ++i) {
          os << (i ? "," : "") << lvl.classes[i].multiplicity;
        }
        os << "]";
      }
      break;
  }
  return os.str();
}

GroundStateSummary ground_state_summary(const BratteliDiagram& d) {
  GroundStateSummary out;
  out.model_note =
      "ground states are parametrized by the state space of the AF limit of the "
      "geodesic class diagram; the identification is exact for template graphs "
      "with tail-product geodesic spaces and is a modeling choice in general";
  out.caveats.push_back(
      "weak*-limits of high-temperature equilibrium states select ground states "
      "only among traces; which traces arise is not determined here");
  for (const auto& w : d.warnings) out.caveats.push_back(w);
  switch (d.summary) {
    case BratteliDiagram::SummaryKind::Empty:
      out.text = "no ground states on this corner (empty geodesic space)";
      break;
    case BratteliDiagram::SummaryKind::FiniteSimplex:
      if (d.simplex_points == 1) {
        out.text = "unique ground state";
      } else {
        out.text = "simplex with " + std::to_string(d.simplex_points) + " extreme points";
      }
      break;
    case BratteliDiagram::SummaryKind::UHF:
      out.text = "state space of " + d.summary_text();
      break;
    case BratteliDiagram::SummaryKind::AF:
      out.text = "state space of an AF algebra; " + d.summary_text();
      break;
  }
  return out;
}

}  // namespace kmsgraph
