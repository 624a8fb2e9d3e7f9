#include "kmsgraph/symbolic.hpp"

#include <stdexcept>

#include "kmsgraph/errors.hpp"

namespace kmsgraph {

int SymbolTable::declare(const Symbol& s) {
  if (s.name.empty() || s.name == "1") throw SymbolError("reserved or empty symbol name");
  if (index_of(s.name) >= 0) throw SymbolError("duplicate symbol: " + s.name);
  symbols_.push_back(s);
  return static_cast<int>(symbols_.size());
}

int SymbolTable::index_of(const std::string& name) const {
  if (name == "1") return 0;
  for (size_t i = 0; i < symbols_.size(); ++i) {
    if (symbols_[i].name == name) return static_cast<int>(i + 1);
  }
  return -1;
}

bool SymbolTable::independent(size_t basis_index) const {
  if (basis_index == 0) return true;
  return symbols_.at(basis_index - 1).independent;
}

Interval SymbolTable::witness_value(size_t basis_index) const {
  if (basis_index == 0) return Interval(1);
  Interval w = Interval::from_decimal(symbols_.at(basis_index - 1).witness);
  if (!w.certainly_positive()) throw SymbolError("witness must be positive: " + symbols_.at(basis_index - 1).name);
  return w;
}

SymbolicReal SymbolicReal::from_rational(const Rational& q, size_t dimension) {
  SymbolicReal r(dimension);
  r.c_[0] = q;
  return r;
}

SymbolicReal SymbolicReal::basis(size_t index, size_t dimension) {
  SymbolicReal r(dimension);
  r.c_.at(index) = 1;
  return r;
}

SymbolicReal SymbolicReal::operator+(const SymbolicReal& o) const {
  if (c_.size() != o.c_.size()) throw SymbolError("mixed symbol tables");
  SymbolicReal r(c_.size());
  for (size_t i = 0; i < c_.size(); ++i) r.c_[i] = c_[i] + o.c_[i];
  return r;
}

SymbolicReal SymbolicReal::operator-(const SymbolicReal& o) const {
  if (c_.size() != o.c_.size()) throw SymbolError("mixed symbol tables");
  SymbolicReal r(c_.size());
  for (size_t i = 0; i < c_.size(); ++i) r.c_[i] = c_[i] - o.c_[i];
  return r;
}

SymbolicReal SymbolicReal::operator-() const {
  SymbolicReal r(c_.size());
  for (size_t i = 0; i < c_.size(); ++i) r.c_[i] = -c_[i];
  return r;
}

SymbolicReal SymbolicReal::scaled(const Rational& q) const {
  SymbolicReal r(c_.size());
  for (size_t i = 0; i < c_.size(); ++i) r.c_[i] = c_[i] * q;
  return r;
}

bool SymbolicReal::is_zero() const {
  for (const auto& q : c_) {
    if (q != 0) return false;
  }
  return true;
}

bool SymbolicReal::is_rational() const {
  for (size_t i = 1; i < c_.size(); ++i) {
    if (c_[i] != 0) return false;
  }
  return true;
}

std::optional<Rational> SymbolicReal::rational_ratio(const SymbolicReal& denom) const {
  if (c_.size() != denom.c_.size()) throw SymbolError("mixed symbol tables");
  if (denom.is_zero()) return std::nullopt;
  // ratio fixed by the first nonzero denominator coordinate
  size_t pivot = 0;
  while (denom.c_[pivot] == 0) {
    if (c_[pivot] != 0) return std::nullopt;
    ++pivot;
  }
  Rational q = c_[pivot] / denom.c_[pivot];
  for (size_t i = pivot; i < c_.size(); ++i) {
    if (c_[i] != denom.c_[i] * q) return std::nullopt;
  }
  return q;
}

Interval SymbolicReal::eval(const SymbolTable& table) const {
  if (c_.size() != table.dimension()) throw SymbolError("value does not match symbol table");
  Interval acc;
  for (size_t i = 0; i < c_.size(); ++i) {
    if (c_[i] == 0) continue;
    acc += Interval(c_[i]) * table.witness_value(i);
  }
  return acc;
}

std::string SymbolicReal::to_string(const SymbolTable& table) const {
  std::string out;
  for (size_t i = 0; i < c_.size(); ++i) {
    if (c_[i] == 0) continue;
    if (!out.empty()) out += " + ";
    out += rational_to_string(c_[i]);
    if (i > 0) out += "*" + table.symbols()[i - 1].name;
  }
  return out.empty() ? "0" : out;
}

SubgroupReduction reduce_subgroup(std::span<const SymbolicReal> values,
                                  const SymbolTable& table) {
  SubgroupReduction red;
  const SymbolicReal* pivot = nullptr;
  for (const auto& v : values) {
    if (!v.is_zero()) {
      pivot = &v;
      break;
    }
  }
  if (pivot == nullptr) {
    red.kind = SubgroupReduction::Kind::Zero;
    return red;
  }

  std::optional<Rational> g;  // generator = |g| * pivot so far
  for (const auto& v : values) {
    if (v.is_zero()) continue;
    auto ratio = v.rational_ratio(*pivot);
    if (!ratio) {
      red.kind = SubgroupReduction::Kind::Dense;
      red.dense_a = v;
      red.dense_b = *pivot;
      red.independence_certified = true;
      for (size_t i = 1; i < table.dimension(); ++i) {
        if ((v.coeff(i) != 0 || pivot->coeff(i) != 0) && !table.independent(i)) {
          red.independence_certified = false;
        }
      }
      return red;
    }
    Rational r = rational_abs(*ratio);
    g = g ? rational_gcd(*g, r) : r;
  }

  red.kind = SubgroupReduction::Kind::Cyclic;
  red.generator = pivot->scaled(*g);
  // orient the generator positive via its witness value
  if (red.generator.eval(table).certainly_negative()) red.generator = -red.generator;
  return red;
}

}  // namespace kmsgraph
