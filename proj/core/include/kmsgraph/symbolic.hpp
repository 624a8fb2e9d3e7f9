#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kmsgraph/interval.hpp"
#include "kmsgraph/numeric.hpp"

namespace kmsgraph {

// A named basis symbol.  `witness` is a decimal literal used only for
// numeric evaluation; `independent` declares that the symbol, together
// with 1 and all other independent symbols, is rationally independent.
// Exactness of irrationality verdicts rests on this declaration.
struct Symbol {
  std::string name;
  std::string witness;
  bool independent = true;
};

class SymbolTable {
 public:
  SymbolTable() = default;

  // Index 0 is the implicit constant 1; declared symbols start at 1.
  int declare(const Symbol& s);
  int index_of(const std::string& name) const;  // -1 if unknown
  size_t dimension() const { return symbols_.size() + 1; }
  const std::vector<Symbol>& symbols() const { return symbols_; }
  bool independent(size_t basis_index) const;
  Interval witness_value(size_t basis_index) const;

 private:
  std::vector<Symbol> symbols_;
};

// Exact rational linear combination over {1, s1, ..., sm}.
class SymbolicReal {
 public:
  SymbolicReal() = default;
  explicit SymbolicReal(size_t dimension) : c_(dimension, Rational(0)) {}

  static SymbolicReal from_rational(const Rational& q, size_t dimension);
  static SymbolicReal basis(size_t index, size_t dimension);

  size_t dimension() const { return c_.size(); }
  const Rational& coeff(size_t i) const { return c_[i]; }
  Rational& coeff(size_t i) { return c_[i]; }

  SymbolicReal operator+(const SymbolicReal& o) const;
  SymbolicReal operator-(const SymbolicReal& o) const;
  SymbolicReal operator-() const;
  SymbolicReal scaled(const Rational& q) const;
  bool operator==(const SymbolicReal& o) const { return c_ == o.c_; }

  bool is_zero() const;
  bool is_rational() const;  // supported on the constant coordinate only

  // q with *this == q * denom, when the coefficient vectors are parallel.
  std::optional<Rational> rational_ratio(const SymbolicReal& denom) const;

  Interval eval(const SymbolTable& table) const;
  std::string to_string(const SymbolTable& table) const;

 private:
  std::vector<Rational> c_;
};

// Lexicographic order on coefficient vectors, for exact value sets/maps.
struct SymbolicLess {
  bool operator()(const SymbolicReal& a, const SymbolicReal& b) const {
    for (size_t i = 0; i < a.dimension(); ++i) {
      if (a.coeff(i) != b.coeff(i)) return a.coeff(i) < b.coeff(i);
    }
    return false;
  }
};

// Exact closed-subgroup reduction of the group generated by `values`.
struct SubgroupReduction {
  enum class Kind { Zero, Cyclic, Dense } kind = Kind::Zero;
  SymbolicReal generator;  // positive generator, Cyclic only
  // Dense only: the witness pair with exactly-irrational ratio.
  SymbolicReal dense_a, dense_b;
  // False when a Dense verdict involves symbols not declared independent.
  bool independence_certified = true;
};

SubgroupReduction reduce_subgroup(std::span<const SymbolicReal> values,
                                  const SymbolTable& table);

}  // namespace kmsgraph
