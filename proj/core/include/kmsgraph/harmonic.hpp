#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kmsgraph/graph.hpp"
#include "kmsgraph/interval.hpp"

namespace kmsgraph {

// Exact multiplicative tag for a rate: scalar * exp(-beta * expo).
// Closed under products and quotients; equality is decidable exactly.
struct RateTag {
  Rational scalar = Rational(1);
  SymbolicReal expo;
  bool exact = false;

  static RateTag opaque() { return RateTag{}; }
  bool equals(const RateTag& o) const {
    return exact && o.exact && scalar == o.scalar && expo == o.expo;
  }
};

// coef * rate^(k - k0) * (k - k0)^kpow
struct GeoTerm {
  Interval coef;
  Interval rate;
  RateTag tag;
  int kpow = 0;
};

struct SlotForm {
  std::vector<GeoTerm> terms;
};

// Positive vector with psi = A(beta) psi, normalized at one vertex.
// Values cover a finite window; ray solutions carry per-slot closed forms
// valid from stage k0 on.
struct HarmonicVector {
  std::string normalization_vertex;
  Interval beta;
  FiniteGraph window;            // base + materialized stages (or the finite graph)
  std::vector<Interval> values;  // per window vertex
  bool has_closed_form = false;
  int k0 = 0;
  std::vector<SlotForm> slot_forms;  // by template slot index

  Interval value_of(const std::string& vertex) const;
  Interval value_at_stage(int slot, int stage) const;  // closed form, stage >= k0
  // max |psi_v - sum_e w_e psi_{r(e)}| over interior vertices, upper bound
  Interval residual_bound;
};

struct HarmonicResult {
  enum class Kind { Exists, NoSolution, Undecided };
  Kind kind = Kind::Undecided;
  HarmonicVector vector;      // Exists only
  Interval spectral_radius;   // solve_finite diagnostics
  std::string note;
};

// Perron route on a finite strongly connected graph: the harmonic vector
// exists iff the spectral radius of A(beta) is 1 (within tol).
HarmonicResult solve_finite(const GraphSpec& spec, const Interval& beta,
                            const std::string& v0, const Rational& tol,
                            int max_iterations = 4000);

// Ray route: forward elimination of the harmonicity equations from the
// normalization, then sign analysis of the dominant geometric mode of the
// per-stage recursion.  Supports period-1 templates whose stage step is
// uniquely solvable and slot-triangular; returns Undecided otherwise.
HarmonicResult solve_ray(const GraphSpec& spec, const Interval& beta,
                         const std::string& v0, int stages = 96);

// Bisection of the solve_ray existence verdict over [lo, hi].
struct ExistenceBracket {
  Rational lo, hi;
  bool decided = false;
  int evaluations = 0;
};
ExistenceBracket existence_threshold(const GraphSpec& spec, const std::string& v0,
                                     const Rational& lo, const Rational& hi,
                                     const Rational& tol);

// m(Z(mu)) = exp(-beta F(mu)) * psi_{r(mu)}; mu lives on h.window.
Interval cylinder_measure(const HarmonicVector& h, const GraphSpec& spec,
                          const PathPrefix& mu);

}  // namespace kmsgraph
