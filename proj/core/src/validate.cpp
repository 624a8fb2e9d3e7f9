#include <map>
#include <set>
#include <sstream>

#include "kmsgraph/errors.hpp"
#include "kmsgraph/graph.hpp"

namespace kmsgraph {

namespace {

bool coeffs_all_nonneg(const SymbolicReal& v) {
  for (size_t i = 0; i < v.dimension(); ++i) {
    if (v.coeff(i) < 0) return false;
  }
  return true;
}

Tri potential_sign(const SymbolicReal& v, const SymbolTable& table) {
  if (v.is_zero()) return Tri::Yes;
  if (v.is_rational()) return v.coeff(0) >= 0 ? Tri::Yes : Tri::No;
  if (coeffs_all_nonneg(v)) return Tri::Yes;  // positive witnesses
  Interval x = v.eval(table);
  if (!x.certainly_negative() && !x.contains_zero()) return Tri::Yes;
  if (x.certainly_negative()) return Tri::No;
  return Tri::Unknown;
}

}  // namespace

ValidationReport validate(const GraphSpec& spec, int L_max) {
  ValidationReport rep;
  rep.zero_cycle_scan_length = L_max;
  rep.row_finite = !spec.has_declared_infinite_emitter();

  // sign of F over all edge declarations
  Tri sign = Tri::Yes;
  auto fold = [&](const SymbolicReal& f) {
    Tri s = potential_sign(f, spec.symbols);
    if (s == Tri::No) sign = Tri::No;
    if (s == Tri::Unknown && sign == Tri::Yes) sign = Tri::Unknown;
  };
  for (const auto& e : spec.base_edges) fold(e.f);
  if (spec.ray) {
    for (const auto& e : spec.ray->stage_edges) fold(e.f);
    for (const auto& e : spec.ray->cross_edges) fold(e.f);
    for (const auto& e : spec.ray->attach_edges) fold(e.f);
  }
  rep.potential_nonneg = sign;

  const int p = spec.is_finite() ? 1 : spec.ray->period;
  const int probe_stages = spec.is_finite() ? 0 : 3 * p + 6;
  FiniteGraph g = materialize(spec, probe_stages);

  // strong connectivity: exact on finite graphs; for ray graphs, checked on
  // the band of stages <= 2p+4 inside a 3p+6 stage window (the edge pattern
  // repeats with period p, so deeper stages behave like the band)
  {
    std::vector<int> dout(g.vertex_count(), -1), din(g.vertex_count(), -1);
    auto bfs = [&](bool forward, std::vector<int>& dist) {
      std::vector<VertexId> q{0};
      dist[0] = 0;
      for (size_t h = 0; h < q.size(); ++h) {
        VertexId v = q[h];
        for (int ei : (forward ? g.out_edges[v] : g.in_edges[v])) {
          VertexId w = forward ? g.edges[ei].dst : g.edges[ei].src;
          if (dist[w] < 0) {
            dist[w] = dist[v] + 1;
            q.push_back(w);
          }
        }
      }
    };
    if (g.vertex_count() == 0) {
      rep.strongly_connected = Tri::No;
    } else {
      bfs(true, dout);
      bfs(false, din);
      bool ok = true;
      const int band = 2 * p + 4;
      for (size_t v = 0; v < g.vertex_count(); ++v) {
        if (!spec.is_finite() && g.stage[v] > band) continue;
        if (dout[v] < 0 || din[v] < 0) ok = false;
        if (g.out_edges[v].empty()) ok = false;  // sinks rule out strong connectivity
      }
      rep.strongly_connected = ok ? Tri::Yes : Tri::No;
    }
  }

  // bounded zero-value cycle scan: closed walks of length <= L_max based at
  // base vertices and at stage <= p vertices; every cycle value of length
  // <= L_max is realized at such a basepoint by periodicity
  {
    FiniteGraph h = spec.is_finite() ? g : materialize(spec, p + L_max + 1);
    std::vector<VertexId> starts;
    for (size_t v = 0; v < h.vertex_count(); ++v) {
      if (h.stage[v] <= p) starts.push_back(static_cast<VertexId>(v));
    }
    constexpr size_t kValueCap = 4000;
    bool capped = false;
    bool found = false;
    for (VertexId s : starts) {
      if (found) break;
      std::vector<std::set<SymbolicReal, SymbolicLess>> vals(h.vertex_count());
      vals[s].insert(spec.zero_value());
      for (int len = 1; len <= L_max && !found; ++len) {
        std::vector<std::set<SymbolicReal, SymbolicLess>> next(h.vertex_count());
        for (size_t v = 0; v < h.vertex_count(); ++v) {
          if (vals[v].empty()) continue;
          for (int ei : h.out_edges[v]) {
            const auto& e = h.edges[ei];
            for (const auto& val : vals[v]) {
              next[e.dst].insert(val + e.f);
              if (next[e.dst].size() > kValueCap) capped = true;
            }
          }
        }
        vals.swap(next);
        for (const auto& val : vals[s]) {
          if (val.is_zero()) {
            found = true;
            std::ostringstream os;
            os << "zero-value closed walk of length " << len << " at " << h.vertex_names[s];
            rep.zero_cycle_witness = os.str();
            break;
          }
        }
        if (capped) break;
      }
      if (capped) break;
    }
    if (found) {
      rep.zero_f_cycle_detected = Tri::Yes;
    } else if (capped) {
      rep.zero_f_cycle_detected = Tri::Unknown;
      rep.zero_cycle_witness = "scan capped: too many distinct cycle values";
    } else {
      rep.zero_f_cycle_detected = Tri::Unknown;  // none up to L_max; open beyond
      rep.zero_cycle_witness = "none up to length " + std::to_string(L_max);
    }
  }

  rep.exit_condition = spec.is_finite() ? false : true;
  return rep;
}

std::string ValidationReport::to_text() const {
  std::ostringstream os;
  os << "strongly_connected: " << tri_to_string(strongly_connected) << "\n"
     << "row_finite: " << (row_finite ? "yes" : "no") << "\n"
     << "potential_nonneg: " << tri_to_string(potential_nonneg) << "\n"
     << "zero_f_cycle_detected: " << tri_to_string(zero_f_cycle_detected)
     << " (" << zero_cycle_witness << ")\n"
     << "exit_condition: " << (exit_condition ? "yes" : "n/a") << "\n";
  return os.str();
}

}  // namespace kmsgraph
