#include <stdexcept>

#include "kmsgraph/errors.hpp"
#include "kmsgraph/graph.hpp"

namespace kmsgraph {

namespace {

struct PotentialMaker {
  PotentialKind kind;
  SymbolTable* table;

  SymbolicReal gauge() const { return SymbolicReal::from_rational(Rational(1), table->dimension()); }
  SymbolicReal zero() const { return SymbolicReal(table->dimension()); }

  // potential of the i-th doubled ray edge (i = 1 or 2)
  SymbolicReal ab(int i, const Rational& a1, const Rational& a2) const {
    if (kind == PotentialKind::Gauge) return gauge();
    if (kind == PotentialKind::RationalAB) {
      return SymbolicReal::from_rational(i == 1 ? a1 : a2, table->dimension());
    }
    return SymbolicReal::basis(static_cast<size_t>(i), table->dimension());
  }
  // potential of the undoubled ray plumbing (drops, slides, returns)
  SymbolicReal plumbing() const { return kind == PotentialKind::Gauge ? gauge() : zero(); }
  // potential of the pinwheel arm edges
  SymbolicReal arm() const { return gauge(); }
};

void add_doubled_ray(GraphSpec& spec, PotentialMaker& mk, const Rational& a1, const Rational& a2) {
  // two-row ray: doubled forward edges t_k => t_{k+1}, drops t_k -> d_k for
  // k >= 2, slide d_{k+1} -> d_k, and the return d_1 -> t_1
  spec.base_vertices.push_back("t1");
  spec.base_vertices.push_back("d1");
  spec.base_edges.push_back({"d1", "t1", mk.plumbing()});
  RayTemplate& t = *spec.ray;
  t.slots.push_back({"t", 2});
  t.slots.push_back({"d", 2});
  t.stage_edges.push_back({"t", "d", 0, mk.plumbing()});
  t.cross_edges.push_back({"t", "t", 1, 0, mk.ab(1, a1, a2)});
  t.cross_edges.push_back({"t", "t", 1, 0, mk.ab(2, a1, a2)});
  t.cross_edges.push_back({"d", "d", -1, 0, mk.plumbing()});
  t.attach_edges.push_back({"t1", "t2", mk.ab(1, a1, a2)});
  t.attach_edges.push_back({"t1", "t2", mk.ab(2, a1, a2)});
  t.attach_edges.push_back({"d2", "d1", mk.plumbing()});
}

void add_pinwheel_arms(GraphSpec& spec, PotentialMaker& mk, const std::string& center) {
  // three ladder arms: out-chain a_k, rungs a_k -> am_k, return chain am_k
  RayTemplate& t = *spec.ray;
  for (const char* arm : {"a", "b", "c"}) {
    std::string out = arm;
    std::string back = out + "m";
    t.slots.push_back({out, 1});
    t.slots.push_back({back, 1});
    t.stage_edges.push_back({out, back, 0, mk.arm()});
    t.cross_edges.push_back({out, out, 1, 0, mk.arm()});
    t.cross_edges.push_back({back, back, -1, 0, mk.arm()});
    t.attach_edges.push_back({center, out + "1", mk.arm()});
    t.attach_edges.push_back({back + "1", center, mk.arm()});
  }
}

void declare_ab_symbols(GraphSpec& spec, PotentialKind kind) {
  if (kind == PotentialKind::SymbolicAB) {
    spec.symbols.declare({"a1", "2", true});
    spec.symbols.declare({"a2", "1", true});
  }
}

}  // namespace

GraphSpec builtin_graph(const std::string& name, PotentialKind kind,
                        const Rational& a1, const Rational& a2) {
  GraphSpec spec;
  spec.name = name;
  spec.ray.emplace();
  spec.ray->period = 1;

  if (name == "G5") {
    declare_ab_symbols(spec, kind);
    PotentialMaker mk{kind, &spec.symbols};
    add_doubled_ray(spec, mk, a1, a2);
    return spec;
  }
  if (name == "PINWHEEL3") {
    if (kind != PotentialKind::Gauge) {
      throw std::invalid_argument("PINWHEEL3 carries the gauge potential only");
    }
    PotentialMaker mk{kind, &spec.symbols};
    spec.base_vertices.push_back("1");
    add_pinwheel_arms(spec, mk, "1");
    return spec;
  }
  if (name == "AMALGAM") {
    declare_ab_symbols(spec, kind);
    PotentialMaker mk{kind, &spec.symbols};
    add_doubled_ray(spec, mk, a1, a2);
    add_pinwheel_arms(spec, mk, "t1");  // the arm center is identified with t1
    return spec;
  }
  throw UnknownExample(name);
}

GraphSpec builtin_graph(const std::string& name) {
  if (name == "AMALGAM") return builtin_graph(name, PotentialKind::RationalAB);
  return builtin_graph(name, PotentialKind::Gauge);
}

std::vector<std::string> builtin_names() { return {"G5", "PINWHEEL3", "AMALGAM"}; }

}  // namespace kmsgraph
