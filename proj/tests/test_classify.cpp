#include <doctest.h>

#include <cmath>
#include <kmsgraph/classify.hpp>
#include <kmsgraph/series.hpp>

#include "oracles.hpp"

using namespace kmsgraph;

TEST_SUITE_BEGIN("classify");

namespace {

bool contains_approx(const Interval& x, double v, double slack = 1e-12) {
  return x.lo_double() - slack <= v && v <= x.hi_double() + slack;
}

Interval g5_beta_c() {
  return Interval::log_of(Interval(1) + Interval::sqrt_of(Interval(3))) / Interval(2);
}

}  // namespace

TEST_CASE("cycle value group: gauge G5 is 2 beta Z") {
  GraphSpec g5 = builtin_graph("G5");
  Interval beta = g5_beta_c();
  ClosedSubgroup g = cycle_value_group(g5, "t1", beta, 12);
  REQUIRE(g.kind == ClosedSubgroup::Kind::Cyclic);
  CHECK(g.generator_value == SymbolicReal::from_rational(Rational(2), 1));
  CHECK(g.stabilized);
  CHECK(contains_approx(g.generator, std::log(1.0 + std::sqrt(3.0)), 1e-9));
}

TEST_CASE("cycle value group: dec5b rational case generates beta Z") {
  GraphSpec g5 = builtin_graph("G5", PotentialKind::RationalAB);  // a1 = 2, a2 = 1
  ClosedSubgroup g = cycle_value_group(g5, "t1", Interval(1), 12);
  REQUIRE(g.kind == ClosedSubgroup::Kind::Cyclic);
  CHECK(g.generator_value == SymbolicReal::from_rational(Rational(1), 1));
}

TEST_CASE("cycle value group: symbolic independent exponents are dense") {
  GraphSpec g5 = builtin_graph("G5", PotentialKind::SymbolicAB);
  ClosedSubgroup g = cycle_value_group(g5, "t1", Interval(1), 12);
  CHECK(g.kind == ClosedSubgroup::Kind::Dense);
  CHECK(g.independence_certified);
}

TEST_CASE("cycle value group: no loops is an error") {
  GraphSpec line = GraphSpec::parse_document(R"({
    "name": "line", "symbols": [],
    "base": {"vertices": ["a", "b"], "edges": [{"src": "a", "dst": "b", "f": {"1": "1"}}]},
    "v_inf": ["b"]})");
  CHECK_THROWS_AS(cycle_value_group(line, "a", Interval(1), 8), NoLoopFound);
}

TEST_CASE("scaling covariance: c F scales the generator by c exactly") {
  const Rational c(3, 2);
  for (std::uint64_t seed : {21u, 22u, 23u, 24u}) {
    GraphSpec spec = oracle::random_strongly_connected(seed, 5, true);
    GraphSpec scaled = spec;
    for (auto& e : scaled.base_edges) e.f = e.f.scaled(c);
    ClosedSubgroup a = cycle_value_group(spec, "v0", Interval(1), 8);
    ClosedSubgroup b = cycle_value_group(scaled, "v0", Interval(1), 8);
    CHECK(a.kind == b.kind);
    if (a.kind == ClosedSubgroup::Kind::Cyclic) {
      CHECK(b.generator_value == a.generator_value.scaled(c));
    }
  }
  // and on a built-in
  GraphSpec g5 = builtin_graph("G5", PotentialKind::RationalAB);
  GraphSpec g5s = builtin_graph("G5", PotentialKind::RationalAB, Rational(3), Rational(3, 2));
  ClosedSubgroup a = cycle_value_group(g5, "t1", Interval(1), 10);
  ClosedSubgroup b = cycle_value_group(g5s, "t1", Interval(1), 10);
  REQUIRE(a.kind == ClosedSubgroup::Kind::Cyclic);
  REQUIRE(b.kind == ClosedSubgroup::Kind::Cyclic);
  CHECK(b.generator_value == a.generator_value.scaled(Rational(3, 2)));
}

TEST_CASE("gauge generators equal beta times the global period") {
  for (const char* name : {"G5", "PINWHEEL3"}) {
    GraphSpec spec = builtin_graph(name);
    std::string root = spec.base_vertices.front();
    int d = period(spec, root, 14, nullptr);
    ClosedSubgroup g = cycle_value_group(spec, root, Interval(1), 14);
    REQUIRE(g.kind == ClosedSubgroup::Kind::Cyclic);
    CHECK(g.generator_value == SymbolicReal::from_rational(Rational(d), 1));
  }
}

TEST_CASE("no-zero-cycle hypothesis forbids the trivial subgroup") {
  for (std::uint64_t seed = 31; seed <= 40; ++seed) {
    GraphSpec spec = oracle::random_strongly_connected(seed, 5, true);
    ValidationReport rep = validate(spec, 8);
    if (rep.zero_f_cycle_detected == Tri::Yes) continue;
    ClosedSubgroup g = cycle_value_group(spec, "v0", Interval(1), 8);
    CHECK(g.kind != ClosedSubgroup::Kind::Zero);
  }
}

TEST_CASE("stage ratio groups") {
  // gauge: equal exponents -> trivial
  GraphSpec gauge = builtin_graph("G5");
  StageStates sg = stage_states(gauge, canonical_exits(gauge)[0], Interval(1));
  CHECK(stage_ratio_group(sg, gauge.symbols, Interval(1)).kind == ClosedSubgroup::Kind::Zero);

  // dec5b (2, 1): generator beta (a1 - a2) = beta
  GraphSpec ab = builtin_graph("G5", PotentialKind::RationalAB);
  StageStates sa = stage_states(ab, canonical_exits(ab)[0], Interval::from_decimal("1.5"));
  ClosedSubgroup g = stage_ratio_group(sa, ab.symbols, Interval::from_decimal("1.5"));
  REQUIRE(g.kind == ClosedSubgroup::Kind::Cyclic);
  CHECK(g.generator_value == SymbolicReal::from_rational(Rational(1), 1));
  CHECK(contains_approx(g.generator, 1.5, 1e-12));

  // two rationally independent differences -> dense
  GraphSpec tri = GraphSpec::parse_document(R"({
    "name": "tri", "symbols": [{"name": "s", "witness": "1.7320508", "independent": true}],
    "base": {"vertices": ["r"], "edges": []},
    "template": {
      "period": 1,
      "stage_vertices": [{"name": "u", "origin": 1}],
      "stage_edges": [],
      "cross_edges": [
        {"src": "u", "dst": "u", "delta": 1, "f": {}},
        {"src": "u", "dst": "u", "delta": 1, "f": {"1": "1"}},
        {"src": "u", "dst": "u", "delta": 1, "f": {"s": "1"}}],
      "attach_edges": [
        {"src": "r", "dst": "u1", "f": {}},
        {"src": "u1", "dst": "r", "f": {"1": "1"}}]},
    "v_inf": []})");
  StageStates st = stage_states(tri, canonical_exits(tri)[0], Interval(1));
  CHECK(stage_ratio_group(st, tri.symbols, Interval(1)).kind == ClosedSubgroup::Kind::Dense);
}

TEST_CASE("factor types on G5 gauge at the critical point: two routes to lambda") {
  GraphSpec g5 = builtin_graph("G5");
  Interval beta_c = g5_beta_c();
  FactorType ft = classify_factor_conservative(g5, "t1", beta_c, 12);
  REQUIRE(ft.kind == FactorType::Kind::III_lambda);
  const double lam = 1.0 / (1.0 + std::sqrt(3.0));
  CHECK(contains_approx(ft.lambda, lam, 1e-9));

  // the d_G h(G) route must agree within combined widths
  EntropyResult ent = gurevich_entropy(g5, "t1", 400);
  Interval lam2 = Interval::exp_of(-(Interval(ent.d_G) * ent.h));
  CHECK(!ft.lambda.certainly_less(lam2));
  CHECK(!lam2.certainly_less(ft.lambda));
}

TEST_CASE("factor types of the remaining spec examples") {
  GraphSpec g5 = builtin_graph("G5");
  FactorType ex = classify_factor_exit(g5, canonical_exits(g5)[0], Interval::from_decimal("0.7"));
  CHECK(ex.kind == FactorType::Kind::II_inf);

  GraphSpec pw = builtin_graph("PINWHEEL3");
  for (const auto& arm : canonical_exits(pw)) {
    CHECK(classify_factor_exit(pw, arm, Interval::from_decimal("0.7")).kind ==
          FactorType::Kind::I_inf);
  }

  GraphSpec ab = builtin_graph("G5", PotentialKind::RationalAB);
  FactorType p = classify_factor_exit(ab, canonical_exits(ab)[0], Interval::from_decimal("1.5"));
  REQUIRE(p.kind == FactorType::Kind::III_lambda);
  CHECK(contains_approx(p.lambda, std::exp(-1.5), 1e-9));

  Interval b0 = Interval::log_of(Interval(1) + Interval::sqrt_of(Interval(3)));
  FactorType cons = classify_factor_conservative(ab, "t1", b0, 12);
  REQUIRE(cons.kind == FactorType::Kind::III_lambda);
  CHECK(contains_approx(cons.lambda, 1.0 / (1.0 + std::sqrt(3.0)), 1e-9));

  GraphSpec sym = builtin_graph("G5", PotentialKind::SymbolicAB);
  CHECK(classify_factor_conservative(sym, "t1", Interval::from_decimal("1.1"), 12).kind ==
        FactorType::Kind::III_1);
}

TEST_CASE("boundary weights and hypothesis failures") {
  GraphSpec g5 = builtin_graph("G5");
  CHECK_THROWS_AS(classify_factor_boundary(g5), InvalidHypothesis);

  GraphSpec sink = GraphSpec::parse_document(R"({
    "name": "sink", "symbols": [],
    "base": {"vertices": ["a", "b"], "edges": [{"src": "a", "dst": "b", "f": {"1": "1"}}]},
    "v_inf": ["b"]})");
  FactorType b = classify_factor_boundary(sink);
  CHECK(b.kind == FactorType::Kind::I_inf);

  // beta = 0 is excluded
  CHECK_THROWS_AS(classify_factor_conservative(g5, "t1", Interval(0), 10), InvalidHypothesis);

  // detected zero-value cycle violates the hypothesis
  GraphSpec z = GraphSpec::parse_document(R"({
    "name": "zloop", "symbols": [],
    "base": {"vertices": ["a", "b"], "edges": [
      {"src": "a", "dst": "b", "f": {}},
      {"src": "b", "dst": "a", "f": {}}]},
    "v_inf": []})");
  CHECK_THROWS_AS(classify_factor_conservative(z, "a", Interval(1), 8), InvalidHypothesis);
}

TEST_CASE("amalgam at its critical point: cyclic with generator beta_0") {
  GraphSpec am = builtin_graph("AMALGAM");
  BetaCriticalResult bc =
      beta_critical(am, "t1", Rational(4, 5), Rational(3, 2), Rational(1, 100000), 400);
  REQUIRE(bc.achieved_tol);
  ClosedSubgroup g = cycle_value_group(am, "t1", bc.bracket, 12);
  REQUIRE(g.kind == ClosedSubgroup::Kind::Cyclic);
  CHECK(g.generator_value == SymbolicReal::from_rational(Rational(1), 1));
  // lambda = e^{-beta_0}
  FactorType ft = classify_factor_conservative(am, "t1", bc.bracket, 12);
  REQUIRE(ft.kind == FactorType::Kind::III_lambda);
  double root = oracle::root_against_one(
      [](double b) { return oracle::amalgam_return_sum(b, 2, 1); }, 0.8, 1.5);
  CHECK(contains_approx(ft.lambda, std::exp(-root), 1e-4));
}

TEST_SUITE_END();
