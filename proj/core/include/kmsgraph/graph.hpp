#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "kmsgraph/errors.hpp"
#include "kmsgraph/symbolic.hpp"

namespace kmsgraph {

using VertexId = int;

// --- declaration-level graph description -----------------------------------

struct BaseEdgeDecl {
  std::string src, dst;
  SymbolicReal f;
};

// Stage slot: one vertex per stage.  Instance name of slot s at stage k
// (k >= 1) is s.name + to_string(k - 1 + s.origin).
struct SlotDecl {
  std::string name;
  int origin = 1;
};

// Edge inside stage k, active when (k - 1) % period == phase.
struct StageEdgeDecl {
  std::string src_slot, dst_slot;
  int phase = 0;
  SymbolicReal f;
};

// Edge from stage k to stage k + delta (delta in {+1, -1}), active when
// (k - 1) % period == phase.  delta = -1 edges start at stage k >= 2.
struct CrossEdgeDecl {
  std::string src_slot, dst_slot;
  int delta = 1;
  int phase = 0;
  SymbolicReal f;
};

// Explicit edge between the base and stage-1 instances, by instance name.
struct AttachEdgeDecl {
  std::string src, dst;
  SymbolicReal f;
};

struct RayTemplate {
  int period = 1;
  std::vector<SlotDecl> slots;
  std::vector<StageEdgeDecl> stage_edges;
  std::vector<CrossEdgeDecl> cross_edges;
  std::vector<AttachEdgeDecl> attach_edges;
  int slot_index(const std::string& name) const;  // -1 if unknown
  std::string instance_name(int slot, int stage) const;
};

// A finite graph, or a finitely presented infinite one (base + periodic ray).
class GraphSpec {
 public:
  std::string name;
  SymbolTable symbols;
  std::vector<std::string> base_vertices;
  std::vector<BaseEdgeDecl> base_edges;
  std::optional<RayTemplate> ray;
  std::set<std::string> v_inf;

  bool is_finite() const { return !ray.has_value(); }
  bool has_declared_infinite_emitter() const;
  SymbolicReal zero_value() const { return SymbolicReal(symbols.dimension()); }

  // Canonical JSON document round-trip.  Serialization is byte-stable:
  // sorted keys, rationals as "p/q" strings, two-space indentation.
  static GraphSpec parse_document(const std::string& json_text);
  std::string serialize() const;
};

// --- materialized finite graphs --------------------------------------------

struct EdgeInst {
  VertexId src, dst;
  SymbolicReal f;
  std::string label;  // deterministic id, e.g. "b0", "a1", "s3.c2"
};

struct FiniteGraph {
  std::vector<std::string> vertex_names;
  std::unordered_map<std::string, VertexId> vertex_index;
  std::vector<EdgeInst> edges;
  std::vector<std::vector<int>> out_edges, in_edges;  // by edge index
  std::vector<int> stage;  // 0 = base, k >= 1 = ray stage
  std::vector<int> slot;   // -1 = base vertex

  VertexId id_of(const std::string& name) const;
  size_t vertex_count() const { return vertex_names.size(); }
  void add_vertex(const std::string& name, int stage_no, int slot_no);
  void add_edge(VertexId src, VertexId dst, const SymbolicReal& f, std::string label);
};

// All stages 1..stage_count of a ray spec (the whole graph when finite).
FiniteGraph materialize(const GraphSpec& spec, int stage_count);

struct Truncation {
  FiniteGraph g;
  VertexId root = -1;
  int radius = 0;
  // Vertices with a neighbour outside the truncation in the full graph.
  std::vector<VertexId> boundary;
  bool is_boundary(VertexId v) const;
};

// Vertices within directed distance <= N of `root` in either direction,
// with all induced edges.  Deterministic vertex order.
Truncation truncate(const GraphSpec& spec, const std::string& root, int N);

// --- path prefixes ----------------------------------------------------------

struct PathPrefix {
  std::vector<int> edge_indices;  // into a FiniteGraph edge list
  VertexId start = -1;

  size_t length() const { return edge_indices.size(); }
  VertexId endpoint(const FiniteGraph& g) const;
  SymbolicReal value(const FiniteGraph& g, const GraphSpec& spec) const;
  bool composes(const FiniteGraph& g) const;
};

// --- validation --------------------------------------------------------------

enum class Tri { Yes, No, Unknown };
std::string tri_to_string(Tri t);

struct ValidationReport {
  Tri strongly_connected = Tri::Unknown;
  bool row_finite = true;
  Tri potential_nonneg = Tri::Unknown;
  // Yes = a zero-value cycle was found (with witness); No is never certain
  // for infinite graphs, so absence is reported as Unknown beyond L_max.
  Tri zero_f_cycle_detected = Tri::Unknown;
  int zero_cycle_scan_length = 0;
  std::string zero_cycle_witness;
  bool exit_condition = true;  // ray stages leave every finite set (by construction)
  std::string to_text() const;
};

ValidationReport validate(const GraphSpec& spec, int L_max);

// --- built-in example graphs -------------------------------------------------

enum class PotentialKind {
  Gauge,        // F = 1 on every edge
  RationalAB,   // a1, a2 as rationals on the doubled ray edges, 0/1 elsewhere
  SymbolicAB,   // a1, a2 as declared-independent symbols
};

// name in {"G5", "PINWHEEL3", "AMALGAM"}; a1, a2 used by the AB kinds.
GraphSpec builtin_graph(const std::string& name, PotentialKind kind,
                        const Rational& a1 = Rational(2), const Rational& a2 = Rational(1));
GraphSpec builtin_graph(const std::string& name);
std::vector<std::string> builtin_names();

}  // namespace kmsgraph
