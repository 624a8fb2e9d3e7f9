#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kmsgraph/graph.hpp"
#include "kmsgraph/interval.hpp"

namespace kmsgraph {

// Exact minimal path values from a root over a truncation window.
struct MinFDistances {
  Truncation tr;
  std::vector<std::optional<SymbolicReal>> dist;  // per window vertex
  bool stable = false;           // values unchanged under a one-period-larger window
  bool periodic_increments = false;  // per-slot distance increments repeat exactly
  SymbolicReal distance_to(const std::string& vertex) const;  // throws Unreachable
};

MinFDistances min_f_distances(const GraphSpec& spec, const std::string& v, int N);

// Exact minimal F over paths v -> w (ties kept exact); optional numeric out.
SymbolicReal min_f_distance(const GraphSpec& spec, const std::string& v,
                            const std::string& w, int N, Interval* numeric = nullptr);

// Level-n class of extendable prefix-minimal paths sharing endpoint and value.
struct GeodesicClass {
  std::string endpoint;
  SymbolicReal f_value;
  std::uintmax_t multiplicity = 0;
  bool terminal = false;  // endpoint in V_inf: a complete finite geodesic
  std::vector<std::vector<std::string>> members;  // edge-label paths, capped
};

struct BratteliLevel {
  std::vector<GeodesicClass> classes;
};

struct BratteliDiagram {
  std::vector<BratteliLevel> levels;  // 0..n_levels
  // edge_counts[l][i][j]: connecting edges, level-l class i to level-(l+1) class j
  std::vector<std::vector<std::vector<int>>> edge_counts;

  enum class SummaryKind { Empty, FiniteSimplex, UHF, AF };
  SummaryKind summary = SummaryKind::Empty;
  int simplex_points = 0;
  std::vector<std::uintmax_t> chain_multiplicities;  // single-chain case
  std::vector<int> uhf_ratios;
  std::map<int, std::string> uhf_supernatural;  // prime -> exponent ("inf")
  std::vector<std::string> warnings;
  std::string summary_text() const;
};

// Geodesic-prefix classes of length `level` from v.
std::vector<GeodesicClass> geodesic_classes(const GraphSpec& spec, const std::string& v,
                                            int level, int member_cap = 4);

// Leveled class diagram with connecting multiplicities and an algebra summary.
BratteliDiagram bratteli(const GraphSpec& spec, const std::string& v, int n_levels,
                         int member_cap = 4);

struct GroundStateSummary {
  std::string text;
  std::string model_note;
  std::vector<std::string> caveats;
};

GroundStateSummary ground_state_summary(const BratteliDiagram& d);

}  // namespace kmsgraph
