#include "kmsgraph/graph.hpp"

#include <algorithm>
#include <deque>
#include <json.hpp>

#include "kmsgraph/errors.hpp"

namespace kmsgraph {

using nlohmann::json;

// --- RayTemplate -------------------------------------------------------------

int RayTemplate::slot_index(const std::string& n) const {
  for (size_t i = 0; i < slots.size(); ++i) {
    if (slots[i].name == n) return static_cast<int>(i);
  }
  return -1;
}

std::string RayTemplate::instance_name(int slot, int stage) const {
  const SlotDecl& s = slots.at(slot);
  return s.name + std::to_string(stage - 1 + s.origin);
}

bool GraphSpec::has_declared_infinite_emitter() const {
  for (const auto& v : v_inf) {
    // a declared V_inf vertex with outgoing edges is an infinite emitter
    for (const auto& e : base_edges) {
      if (e.src == v) return true;
    }
    if (ray) {
      for (const auto& e : ray->attach_edges) {
        if (e.src == v) return true;
      }
    }
  }
  return false;
}

// --- FiniteGraph ---------------------------------------------------------------

VertexId FiniteGraph::id_of(const std::string& name) const {
  auto it = vertex_index.find(name);
  if (it == vertex_index.end()) throw UnknownVertex(name);
  return it->second;
}

void FiniteGraph::add_vertex(const std::string& name, int stage_no, int slot_no) {
  if (vertex_index.count(name)) throw SchemaError("duplicate vertex name: " + name);
  vertex_index.emplace(name, static_cast<VertexId>(vertex_names.size()));
  vertex_names.push_back(name);
  out_edges.emplace_back();
  in_edges.emplace_back();
  stage.push_back(stage_no);
  slot.push_back(slot_no);
}

void FiniteGraph::add_edge(VertexId src, VertexId dst, const SymbolicReal& f, std::string label) {
  int idx = static_cast<int>(edges.size());
  edges.push_back(EdgeInst{src, dst, f, std::move(label)});
  out_edges[src].push_back(idx);
  in_edges[dst].push_back(idx);
}

// --- materialization -----------------------------------------------------------

FiniteGraph materialize(const GraphSpec& spec, int stage_count) {
  FiniteGraph g;
  for (const auto& v : spec.base_vertices) g.add_vertex(v, 0, -1);
  if (spec.ray) {
    const RayTemplate& t = *spec.ray;
    for (int k = 1; k <= stage_count; ++k) {
      for (size_t s = 0; s < t.slots.size(); ++s) {
        g.add_vertex(t.instance_name(static_cast<int>(s), k), k, static_cast<int>(s));
      }
    }
  }
  int bi = 0;
  for (const auto& e : spec.base_edges) {
    g.add_edge(g.id_of(e.src), g.id_of(e.dst), e.f, "b" + std::to_string(bi++));
  }
  if (spec.ray) {
    const RayTemplate& t = *spec.ray;
    int ai = 0;
    for (const auto& e : t.attach_edges) {
      g.add_edge(g.id_of(e.src), g.id_of(e.dst), e.f, "a" + std::to_string(ai++));
    }
    for (int k = 1; k <= stage_count; ++k) {
      const int phase = (k - 1) % t.period;
      int ei = 0;
      for (const auto& e : t.stage_edges) {
        if (e.phase != phase) continue;
        g.add_edge(g.id_of(t.instance_name(t.slot_index(e.src_slot), k)),
                   g.id_of(t.instance_name(t.slot_index(e.dst_slot), k)), e.f,
                   "s" + std::to_string(k) + ".e" + std::to_string(ei++));
      }
      int ci = 0;
      for (const auto& e : t.cross_edges) {
        if (e.phase != phase) continue;
        const int k2 = k + e.delta;
        ++ci;
        if (e.delta == -1 && k2 < 1) continue;  // stage-1 descents are attach edges
        if (k2 > stage_count) continue;         // frontier: target stage not materialized
        g.add_edge(g.id_of(t.instance_name(t.slot_index(e.src_slot), k)),
                   g.id_of(t.instance_name(t.slot_index(e.dst_slot), k2)), e.f,
                   "s" + std::to_string(k) + ".c" + std::to_string(ci - 1));
      }
    }
  }
  return g;
}

// --- truncation ------------------------------------------------------------------

namespace {

std::vector<int> bfs_distance(const FiniteGraph& g, VertexId from, bool forward) {
  std::vector<int> dist(g.vertex_count(), -1);
  std::deque<VertexId> q{from};
  dist[from] = 0;
  while (!q.empty()) {
    VertexId v = q.front();
    q.pop_front();
    const auto& idxs = forward ? g.out_edges[v] : g.in_edges[v];
    for (int ei : idxs) {
      VertexId w = forward ? g.edges[ei].dst : g.edges[ei].src;
      if (dist[w] < 0) {
        dist[w] = dist[v] + 1;
        q.push_back(w);
      }
    }
  }
  return dist;
}

}  // namespace

bool Truncation::is_boundary(VertexId v) const {
  return std::find(boundary.begin(), boundary.end(), v) != boundary.end();
}

Truncation truncate(const GraphSpec& spec, const std::string& root, int N) {
  if (N < 1) throw std::invalid_argument("truncation radius must be >= 1");
  FiniteGraph full = spec.is_finite() ? materialize(spec, 0) : FiniteGraph{};
  if (!spec.is_finite()) {
    // stage(root) is known only after materializing; root is base or an
    // early-stage instance, so a first pass with N stages locates it
    FiniteGraph probe = materialize(spec, 1);
    int root_stage = 0;
    if (!probe.vertex_index.count(root)) {
      // deep root: scan instance names
      const RayTemplate& t = *spec.ray;
      bool found = false;
      for (int k = 2; k <= 4096 && !found; ++k) {
        for (size_t s = 0; s < t.slots.size(); ++s) {
          if (t.instance_name(static_cast<int>(s), k) == root) {
            root_stage = k;
            found = true;
            break;
          }
        }
      }
      if (!found) throw UnknownVertex(root);
    } else {
      root_stage = probe.stage[probe.id_of(root)];
    }
    full = materialize(spec, root_stage + N + 1 + spec.ray->period);
  }

  VertexId r = full.id_of(root);
  std::vector<int> dout = bfs_distance(full, r, true);
  std::vector<int> din = bfs_distance(full, r, false);

  std::vector<bool> keep(full.vertex_count(), false);
  for (size_t v = 0; v < full.vertex_count(); ++v) {
    const bool near_out = dout[v] >= 0 && dout[v] <= N;
    const bool near_in = din[v] >= 0 && din[v] <= N;
    keep[v] = near_out || near_in;
  }

  Truncation tr;
  tr.radius = N;
  std::vector<VertexId> remap(full.vertex_count(), -1);
  for (size_t v = 0; v < full.vertex_count(); ++v) {
    if (!keep[v]) continue;
    remap[v] = static_cast<VertexId>(tr.g.vertex_count());
    tr.g.add_vertex(full.vertex_names[v], full.stage[v], full.slot[v]);
  }
  for (const auto& e : full.edges) {
    if (keep[e.src] && keep[e.dst]) {
      tr.g.add_edge(remap[e.src], remap[e.dst], e.f, e.label);
    }
  }
  std::vector<bool> on_boundary(tr.g.vertex_count(), false);
  for (const auto& e : full.edges) {
    if (keep[e.src] && !keep[e.dst]) on_boundary[remap[e.src]] = true;
    if (!keep[e.src] && keep[e.dst]) on_boundary[remap[e.dst]] = true;
  }
  for (size_t v = 0; v < tr.g.vertex_count(); ++v) {
    if (on_boundary[v]) tr.boundary.push_back(static_cast<VertexId>(v));
  }
  tr.root = tr.g.id_of(root);
  return tr;
}

// --- path prefixes ----------------------------------------------------------------

VertexId PathPrefix::endpoint(const FiniteGraph& g) const {
  if (edge_indices.empty()) return start;
  return g.edges[edge_indices.back()].dst;
}

SymbolicReal PathPrefix::value(const FiniteGraph& g, const GraphSpec& spec) const {
  SymbolicReal v = spec.zero_value();
  for (int ei : edge_indices) v = v + g.edges[ei].f;
  return v;
}

bool PathPrefix::composes(const FiniteGraph& g) const {
  VertexId at = start;
  for (int ei : edge_indices) {
    if (g.edges[ei].src != at) return false;
    at = g.edges[ei].dst;
  }
  return true;
}

// --- document parsing ----------------------------------------------------------

namespace {

const json& require(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(std::string("missing key: ") + key);
  return *it;
}

SymbolicReal parse_potential(const json& f, const SymbolTable& table) {
  if (!f.is_object()) throw SchemaError("edge potential must be an object");
  SymbolicReal v(table.dimension());
  for (auto it = f.begin(); it != f.end(); ++it) {
    int idx = table.index_of(it.key());
    if (idx < 0) throw SymbolError("undeclared basis symbol: " + it.key());
    if (!it.value().is_string()) throw SchemaError("rational coefficients must be strings");
    try {
      v.coeff(idx) = parse_rational(it.value().get<std::string>());
    } catch (const std::invalid_argument& ex) {
      throw SchemaError(ex.what());
    }
  }
  return v;
}

json potential_to_json(const SymbolicReal& v, const SymbolTable& table) {
  json f = json::object();
  for (size_t i = 0; i < v.dimension(); ++i) {
    if (v.coeff(i) == 0) continue;
    const std::string key = i == 0 ? "1" : table.symbols()[i - 1].name;
    f[key] = rational_to_string(v.coeff(i));
  }
  return f;
}

constexpr int kParallelEdgeCap = 100000;

}  // namespace

GraphSpec GraphSpec::parse_document(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& ex) {
    throw SchemaError(std::string("not valid JSON: ") + ex.what());
  }
  if (!j.is_object()) throw SchemaError("document root must be an object");

  GraphSpec spec;
  spec.name = require(j, "name").get<std::string>();

  for (const auto& s : require(j, "symbols")) {
    Symbol sym;
    sym.name = require(s, "name").get<std::string>();
    sym.witness = require(s, "witness").get<std::string>();
    sym.independent = require(s, "independent").get<bool>();
    spec.symbols.declare(sym);
  }

  const json& base = require(j, "base");
  std::set<std::string> declared;
  for (const auto& v : require(base, "vertices")) {
    std::string name = v.get<std::string>();
    if (!declared.insert(name).second) throw SchemaError("duplicate vertex: " + name);
    spec.base_vertices.push_back(name);
  }

  std::set<std::string> stage1;  // valid attach endpoints beyond base
  if (j.contains("template")) {
    const json& t = j["template"];
    RayTemplate ray;
    ray.period = require(t, "period").get<int>();
    if (ray.period < 1) throw SchemaError("period must be >= 1");
    for (const auto& sv : require(t, "stage_vertices")) {
      SlotDecl slot;
      slot.name = require(sv, "name").get<std::string>();
      slot.origin = sv.contains("origin") ? sv["origin"].get<int>() : 1;
      if (ray.slot_index(slot.name) >= 0) throw SchemaError("duplicate slot: " + slot.name);
      ray.slots.push_back(slot);
    }
    if (ray.slots.empty()) throw SchemaError("template requires at least one stage vertex");
    auto check_slot = [&](const std::string& s) {
      if (ray.slot_index(s) < 0) throw SchemaError("unknown stage slot: " + s);
    };
    auto check_phase = [&](int phase) {
      if (phase < 0 || phase >= ray.period) throw SchemaError("phase out of range");
    };
    if (t.contains("stage_edges")) {
      for (const auto& e : t["stage_edges"]) {
        StageEdgeDecl d;
        d.src_slot = require(e, "src").get<std::string>();
        d.dst_slot = require(e, "dst").get<std::string>();
        d.phase = e.contains("phase") ? e["phase"].get<int>() : 0;
        d.f = parse_potential(require(e, "f"), spec.symbols);
        check_slot(d.src_slot);
        check_slot(d.dst_slot);
        check_phase(d.phase);
        ray.stage_edges.push_back(d);
      }
    }
    if (t.contains("cross_edges")) {
      for (const auto& e : t["cross_edges"]) {
        CrossEdgeDecl d;
        d.src_slot = require(e, "src").get<std::string>();
        d.dst_slot = require(e, "dst").get<std::string>();
        d.delta = require(e, "delta").get<int>();
        d.phase = e.contains("phase") ? e["phase"].get<int>() : 0;
        d.f = parse_potential(require(e, "f"), spec.symbols);
        if (d.delta != 1 && d.delta != -1) throw SchemaError("cross edge delta must be +1 or -1");
        check_slot(d.src_slot);
        check_slot(d.dst_slot);
        check_phase(d.phase);
        ray.cross_edges.push_back(d);
      }
    }
    for (size_t s = 0; s < ray.slots.size(); ++s) {
      std::string inst = ray.instance_name(static_cast<int>(s), 1);
      if (declared.count(inst)) throw SchemaError("stage instance collides with base vertex: " + inst);
      stage1.insert(inst);
    }
    if (t.contains("attach_edges")) {
      for (const auto& e : t["attach_edges"]) {
        AttachEdgeDecl d;
        d.src = require(e, "src").get<std::string>();
        d.dst = require(e, "dst").get<std::string>();
        d.f = parse_potential(require(e, "f"), spec.symbols);
        auto known = [&](const std::string& v) { return declared.count(v) || stage1.count(v); };
        if (!known(d.src)) throw SchemaError("attach edge references undeclared vertex: " + d.src);
        if (!known(d.dst)) throw SchemaError("attach edge references undeclared vertex: " + d.dst);
        ray.attach_edges.push_back(d);
      }
    }
    spec.ray = std::move(ray);
  }

  for (const auto& e : require(base, "edges")) {
    BaseEdgeDecl d;
    d.src = require(e, "src").get<std::string>();
    d.dst = require(e, "dst").get<std::string>();
    d.f = parse_potential(require(e, "f"), spec.symbols);
    auto known = [&](const std::string& v) { return declared.count(v) || stage1.count(v); };
    if (!known(d.src) || !known(d.dst)) {
      throw SchemaError("edge references undeclared vertex: " + d.src + " -> " + d.dst);
    }
    spec.base_edges.push_back(d);
  }

  if (j.contains("v_inf")) {
    for (const auto& v : j["v_inf"]) {
      std::string name = v.get<std::string>();
      if (!declared.count(name)) throw SchemaError("v_inf references undeclared vertex: " + name);
      spec.v_inf.insert(name);
    }
  }

  // sanity cap on parallel multiplicity between one ordered vertex pair
  std::map<std::pair<std::string, std::string>, int> par;
  auto bump = [&](const std::string& s, const std::string& d) {
    if (++par[{s, d}] > kParallelEdgeCap) {
      throw MultiplicityError("parallel edge cap exceeded for " + s + " -> " + d);
    }
  };
  for (const auto& e : spec.base_edges) bump(e.src, e.dst);
  if (spec.ray) {
    for (const auto& e : spec.ray->attach_edges) bump(e.src, e.dst);
    for (const auto& e : spec.ray->stage_edges) bump(e.src_slot + "@", e.dst_slot + "@");
    for (const auto& e : spec.ray->cross_edges) {
      bump(e.src_slot + "@", e.dst_slot + "@" + std::to_string(e.delta));
    }
  }

  return spec;
}

std::string GraphSpec::serialize() const {
  json j;
  j["name"] = name;
  json syms = json::array();
  for (const auto& s : symbols.symbols()) {
    syms.push_back({{"independent", s.independent}, {"name", s.name}, {"witness", s.witness}});
  }
  j["symbols"] = syms;

  json base;
  base["vertices"] = base_vertices;
  json edges = json::array();
  for (const auto& e : base_edges) {
    edges.push_back({{"dst", e.dst}, {"f", potential_to_json(e.f, symbols)}, {"src", e.src}});
  }
  base["edges"] = edges;
  j["base"] = base;

  if (ray) {
    json t;
    t["period"] = ray->period;
    json sv = json::array();
    for (const auto& s : ray->slots) sv.push_back({{"name", s.name}, {"origin", s.origin}});
    t["stage_vertices"] = sv;
    json se = json::array();
    for (const auto& e : ray->stage_edges) {
      se.push_back({{"dst", e.dst_slot},
                    {"f", potential_to_json(e.f, symbols)},
                    {"phase", e.phase},
                    {"src", e.src_slot}});
    }
    t["stage_edges"] = se;
    json ce = json::array();
    for (const auto& e : ray->cross_edges) {
      ce.push_back({{"delta", e.delta},
                    {"dst", e.dst_slot},
                    {"f", potential_to_json(e.f, symbols)},
                    {"phase", e.phase},
                    {"src", e.src_slot}});
    }
    t["cross_edges"] = ce;
    json ae = json::array();
    for (const auto& e : ray->attach_edges) {
      ae.push_back({{"dst", e.dst}, {"f", potential_to_json(e.f, symbols)}, {"src", e.src}});
    }
    t["attach_edges"] = ae;
    j["template"] = t;
  }

  j["v_inf"] = std::vector<std::string>(v_inf.begin(), v_inf.end());
  return j.dump(2) + "\n";
}

std::string tri_to_string(Tri t) {
  switch (t) {
    case Tri::Yes: return "yes";
    case Tri::No: return "no";
    default: return "unknown";
  }
}

}  // namespace kmsgraph
