#include <doctest.h>

#include <cmath>
#include <kmsgraph/series.hpp>

#include "oracles.hpp"

using namespace kmsgraph;

TEST_SUITE_BEGIN("series");

namespace {

GraphSpec two_loops() {
  GraphSpec spec;
  spec.name = "twoloops";
  spec.base_vertices = {"v"};
  spec.base_edges.push_back({"v", "v", SymbolicReal::from_rational(Rational(1), 1)});
  spec.base_edges.push_back({"v", "v", SymbolicReal::from_rational(Rational(1), 1)});
  return spec;
}

bool contains_approx(const Interval& x, double v, double slack = 1e-12) {
  return x.lo_double() - slack <= v && v <= x.hi_double() + slack;
}

}  // namespace

TEST_CASE("loop weights: single vertex with two loops") {
  GraphSpec spec = two_loops();
  Interval beta = Interval::from_decimal("0.8");
  SeriesTable t = loop_weights(spec, "v", beta, 10);
  for (int n = 0; n <= 10; ++n) {
    CHECK(contains_approx(t.L[n], std::pow(2 * std::exp(-0.8), n)));
  }
  first_return_weights(t);
  CHECK(contains_approx(t.f[1], 2 * std::exp(-0.8)));
  for (int n = 2; n <= 10; ++n) {
    CHECK(t.f[n].lo_double() == 0.0);
    CHECK(t.f[n].hi_double() == 0.0);
  }
}

TEST_CASE("loop weights on G5: first nonzero at n = 4 with two parallel choices") {
  GraphSpec g5 = builtin_graph("G5");
  Interval beta = Interval::from_decimal("0.6");
  SeriesTable t = loop_weights(g5, "t1", beta, 12);
  CHECK(t.L[1].hi_double() == 0.0);
  CHECK(t.L[2].hi_double() == 0.0);
  CHECK(t.L[3].hi_double() == 0.0);
  CHECK(contains_approx(t.L[4], 2 * std::exp(-4 * 0.6)));
  auto brute = oracle::loop_weights_brute(g5, "t1", 0.6, 12);
  for (int n = 0; n <= 12; ++n) {
    CHECK(contains_approx(t.L[n], brute[n], 1e-9));
  }
}

TEST_CASE("loop weights on PINWHEEL3: L[3] = 3 e^{-3 beta}") {
  GraphSpec pw = builtin_graph("PINWHEEL3");
  SeriesTable t = loop_weights(pw, "1", Interval::from_decimal("0.6"), 9);
  CHECK(contains_approx(t.L[3], 3 * std::exp(-3 * 0.6)));
  auto brute = oracle::loop_weights_brute(pw, "1", 0.6, 9);
  for (int n = 0; n <= 9; ++n) CHECK(contains_approx(t.L[n], brute[n], 1e-9));
}

TEST_CASE("first-return weights match the direct enumeration") {
  GraphSpec g5 = builtin_graph("G5");
  SeriesTable t = loop_weights(g5, "t1", Interval::from_decimal("0.6"), 10);
  first_return_weights(t);
  auto brute = oracle::first_return_brute(g5, "t1", 0.6, 10);
  for (int n = 1; n <= 10; ++n) CHECK(contains_approx(t.f[n], brute[n], 1e-9));
  // closed form f_{2k} = 2^{k-1} e^{-2k beta}
  for (int k = 2; k <= 5; ++k) {
    CHECK(contains_approx(t.f[2 * k], std::pow(2.0, k - 1) * std::exp(-2 * k * 0.6)));
    CHECK(t.f[2 * k - 1].hi_double() == 0.0);
  }

  GraphSpec pw = builtin_graph("PINWHEEL3");
  SeriesTable tp = loop_weights(pw, "1", Interval::from_decimal("0.6"), 9);
  first_return_weights(tp);
  auto brute_pw = oracle::first_return_brute(pw, "1", 0.6, 9);
  for (int n = 1; n <= 9; ++n) CHECK(contains_approx(tp.f[n], brute_pw[n], 1e-9));
  for (int k = 1; k <= 4; ++k) {
    CHECK(contains_approx(tp.f[2 * k + 1], 3 * std::exp(-(2 * k + 1) * 0.6)));
  }
}

TEST_CASE("renewal identity: interval compatibility on random graphs") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    GraphSpec spec = oracle::random_strongly_connected(seed);
    Interval beta = Interval::from_decimal(seed % 2 ? "0.8" : "0.35");
    SeriesTable t = loop_weights(spec, "v0", beta, 20);
    first_return_weights(t);
    for (int n = 1; n <= 20; ++n) {
      Interval rhs(0);
      for (int k = 1; k <= n; ++k) rhs += t.f[k] * t.L[n - k];
      // both enclose the true value, so they must intersect
      CHECK(!rhs.certainly_less(t.L[n]));
      CHECK(!t.L[n].certainly_less(rhs));
    }
  }
}

TEST_CASE("renewal identity: strict containment on the built-ins") {
  for (const char* name : {"G5", "PINWHEEL3"}) {
    GraphSpec spec = builtin_graph(name);
    std::string root = spec.base_vertices.front();
    SeriesTable t = loop_weights(spec, root, Interval::from_decimal("0.7"), 16);
    first_return_weights(t);
    for (int n = 1; n <= 16; ++n) {
      Interval rhs(0);
      for (int k = 1; k <= n; ++k) rhs += t.f[k] * t.L[n - k];
      CHECK(rhs.lo_double() <= t.L[n].lo_double());
      CHECK(rhs.hi_double() >= t.L[n].hi_double());
    }
  }
}

TEST_CASE("truncation exactness: deeper windows reproduce the same values") {
  GraphSpec g5 = builtin_graph("G5");
  Interval beta = Interval::from_decimal("0.55");
  SeriesTable a = loop_weights(g5, "t1", beta, 20);
  SeriesTable b = loop_weights(g5, "t1", beta, 30);  // radius larger by 5
  for (int n = 0; n <= 20; ++n) {
    CHECK(a.L[n].lo_string() == b.L[n].lo_string());
    CHECK(a.L[n].hi_string() == b.L[n].hi_string());
  }
}

TEST_CASE("period: gcd of loop lengths with stabilization") {
  PeriodReport pr;
  CHECK(period(builtin_graph("G5"), "t1", 12, &pr) == 2);
  CHECK(pr.stabilized);
  CHECK(period(builtin_graph("PINWHEEL3"), "1", 12, &pr) == 1);
  CHECK(pr.stabilized);
  CHECK(period(two_loops(), "v", 6, &pr) == 1);

  // no loop at all
  GraphSpec line = GraphSpec::parse_document(R"({
    "name": "line", "symbols": [],
    "base": {"vertices": ["a", "b"], "edges": [{"src": "a", "dst": "b", "f": {"1": "1"}}]},
    "v_inf": ["b"]})");
  CHECK_THROWS_AS(period(line, "a", 8, nullptr), NoLoopFound);
}

TEST_CASE("period is independent of the base vertex on the built-ins") {
  for (const char* name : {"G5", "PINWHEEL3", "AMALGAM"}) {
    GraphSpec spec = builtin_graph(name);
    FiniteGraph g = materialize(spec, 1);
    int d0 = -1;
    for (const auto& v : g.vertex_names) {
      int d = period(spec, v, 16, nullptr);
      if (d0 < 0) d0 = d;
      CHECK(d == d0);
    }
  }
}

TEST_CASE("loop counts agree with brute force; first-return counts invert") {
  for (const char* name : {"G5", "PINWHEEL3"}) {
    GraphSpec spec = builtin_graph(name);
    std::string root = spec.base_vertices.front();
    auto counts = loop_counts(spec, root, 10);
    auto brute = oracle::loop_counts_brute(spec, root, 10);
    for (int n = 0; n <= 10; ++n) CHECK(counts[n] == BigInt(brute[n]));
    auto phi = first_return_counts(counts);
    // reconstruct counts from phi by the renewal recursion
    std::vector<BigInt> rec(counts.size(), 0);
    rec[0] = 1;
    for (size_t n = 1; n < counts.size(); ++n) {
      for (size_t k = 1; k <= n; ++k) rec[n] += phi[k] * rec[n - k];
      CHECK(rec[n] == counts[n]);
    }
  }
}

TEST_CASE("Gurevich entropy: closed forms") {
  // c_n = 2^n: h = log 2
  EntropyResult two = gurevich_entropy(two_loops(), "v", 60);
  CHECK(contains_approx(two.h, std::log(2.0), 1e-9));
  CHECK(two.h.width_double() < 1e-6);
  CHECK(!two.upper_heuristic);

  // G5: h = (1/2) log(1 + sqrt 3), d_G = 2
  EntropyResult g5 = gurevich_entropy(builtin_graph("G5"), "t1", 400);
  const double h_g5 = 0.5 * std::log(1.0 + std::sqrt(3.0));
  CHECK(g5.d_G == 2);
  CHECK(contains_approx(g5.h, h_g5));
  CHECK(g5.h.width_double() <= 1e-4);
  CHECK(g5.pattern_detected);
  CHECK(!g5.upper_heuristic);

  // PINWHEEL3: h = log alpha, alpha the real root of x^3 - x - 3
  EntropyResult pw = gurevich_entropy(builtin_graph("PINWHEEL3"), "1", 400);
  const double alpha = oracle::pinwheel_alpha();
  CHECK(std::abs(alpha * alpha * alpha - alpha - 3.0) <= 1e-10);
  CHECK(pw.d_G == 1);
  CHECK(contains_approx(pw.h, std::log(alpha)));
  CHECK(pw.h.width_double() <= 1e-4);

  // single loop of length 1: h = 0
  GraphSpec loop1;
  loop1.name = "loop1";
  loop1.base_vertices = {"v"};
  loop1.base_edges.push_back({"v", "v", SymbolicReal::from_rational(Rational(1), 1)});
  EntropyResult l1 = gurevich_entropy(loop1, "v", 40);
  CHECK(l1.h.contains(Rational(0)));
  CHECK(l1.h.width_double() <= 1e-9);
}

TEST_CASE("classify_recurrence on G5 gauge: the three regimes") {
  GraphSpec g5 = builtin_graph("G5");
  RecurrenceVerdict tr = classify_recurrence(g5, "t1", Interval::from_decimal("0.6"), 400);
  CHECK(tr.kind == RecurrenceVerdict::Kind::Transient);
  CHECK(contains_approx(tr.total, oracle::g5_gauge_return_sum(0.6), 1e-9));

  // exactly at the critical point, fed as an exact-interval beta
  Interval beta_c = Interval::log_of(Interval(1) + Interval::sqrt_of(Interval(3))) / Interval(2);
  RecurrenceVerdict rc = classify_recurrence(g5, "t1", beta_c, 400);
  CHECK(rc.kind == RecurrenceVerdict::Kind::Recurrent);
  CHECK(rc.total.contains(Rational(1)));

  RecurrenceVerdict sc = classify_recurrence(g5, "t1", Interval::from_decimal("0.3"), 400);
  CHECK(sc.kind == RecurrenceVerdict::Kind::Supercritical);
}

TEST_CASE("return-sum monotonicity in beta under strictly positive potentials") {
  GraphSpec g5 = builtin_graph("G5");
  ReturnSeriesEngine engine(g5, "t1", 200);
  Interval prev = Interval::pos_infinity();
  bool first = true;
  for (const char* b : {"0.55", "0.6", "0.65", "0.7", "0.8", "0.9"}) {
    RecurrenceVerdict v = engine.evaluate(Interval::from_decimal(b), Rational(1, 1000000));
    REQUIRE(v.tail_certified);
    if (!first) CHECK(v.total.certainly_less(prev));
    prev = v.total;
    first = false;
  }
}

TEST_CASE("beta_critical on G5 gauge brackets (1/2) log(1 + sqrt 3)") {
  GraphSpec g5 = builtin_graph("G5");
  BetaCriticalResult bc =
      beta_critical(g5, "t1", Rational(2, 5), Rational(1), Rational(1, 1000000), 400);
  CHECK(bc.achieved_tol);
  CHECK(bc.hi - bc.lo <= Rational(1, 1000000));
  CHECK(contains_approx(bc.bracket, 0.5 * std::log(1.0 + std::sqrt(3.0))));
}

TEST_CASE("beta_critical on G5 dec5b potential: root of e^{-2b} + e^{-b} = 1/2") {
  GraphSpec g5 = builtin_graph("G5", PotentialKind::RationalAB);
  BetaCriticalResult bc =
      beta_critical(g5, "t1", Rational(1, 2), Rational(2), Rational(1, 1000000), 400);
  CHECK(bc.achieved_tol);
  CHECK(contains_approx(bc.bracket, std::log(1.0 + std::sqrt(3.0))));
}

TEST_CASE("beta_critical on AMALGAM agrees with the closed-form oracle") {
  GraphSpec am = builtin_graph("AMALGAM");
  BetaCriticalResult bc =
      beta_critical(am, "t1", Rational(4, 5), Rational(3, 2), Rational(1, 100000), 400);
  CHECK(bc.achieved_tol);
  double root = oracle::root_against_one([](double b) { return oracle::amalgam_return_sum(b, 2, 1); },
                                         0.8, 1.5);
  CHECK(contains_approx(bc.bracket, root, 1e-4));
}

TEST_CASE("engine reproduces the amalgam displayed identity on a beta grid") {
  GraphSpec am = builtin_graph("AMALGAM");
  ReturnSeriesEngine engine(am, "t1", 400);
  for (double b = 1.17; b < 2.07; b += 0.3) {
    char buf[32];
    snprintf(buf, sizeof buf, "%.6f", b);
    RecurrenceVerdict v = engine.evaluate(Interval::from_decimal(buf), Rational(1, 1000000000));
    REQUIRE(v.tail_certified);
    CHECK(contains_approx(v.total, oracle::amalgam_return_sum(b, 2, 1), 1e-9));
  }
}

TEST_CASE("beta_critical refuses potentials that are not certified monotone") {
  GraphSpec z = GraphSpec::parse_document(R"({
    "name": "zloop", "symbols": [],
    "base": {"vertices": ["a", "b"], "edges": [
      {"src": "a", "dst": "b", "f": {}},
      {"src": "b", "dst": "a", "f": {}}]},
    "v_inf": []})");
  CHECK_THROWS_AS(
      beta_critical(z, "a", Rational(1, 10), Rational(2), Rational(1, 1000), 100), NotMonotone);
  // the grid scan remains available
  auto scan = recurrence_scan(z, "a", {Interval::from_decimal("0.5")}, 64);
  REQUIRE(scan.size() == 1);
  CHECK(scan[0].kind == RecurrenceVerdict::Kind::Recurrent);  // sum of first returns is exactly 1
}

TEST_CASE("invalid brackets are rejected") {
  GraphSpec g5 = builtin_graph("G5");
  CHECK_THROWS_AS(
      beta_critical(g5, "t1", Rational(1), Rational(2), Rational(1, 1000), 200), BracketInvalid);
}

TEST_CASE("series computations refuse declared infinite emitters") {
  GraphSpec em = GraphSpec::parse_document(R"({
    "name": "emitter", "symbols": [],
    "base": {"vertices": ["a"], "edges": [{"src": "a", "dst": "a", "f": {"1": "1"}}]},
    "v_inf": ["a"]})");
  CHECK_THROWS_AS(loop_weights(em, "a", Interval(1), 8), NotRowFinite);
}

TEST_SUITE_END();
