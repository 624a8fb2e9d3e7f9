#include "kmsgraph/series.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "kmsgraph/errors.hpp"

namespace kmsgraph {

namespace {

// exp(-beta * F(e)) per edge, with distinct potentials evaluated once
std::vector<Interval> edge_weights(const FiniteGraph& g, const SymbolTable& table,
                                   const Interval& beta) {
  std::map<SymbolicReal, Interval, SymbolicLess> cache;
  std::vector<Interval> w;
  w.reserve(g.edges.size());
  for (const auto& e : g.edges) {
    auto it = cache.find(e.f);
    if (it == cache.end()) {
      Interval val = Interval::exp_of(-(beta * e.f.eval(table)));
      it = cache.emplace(e.f, val).first;
    }
    w.push_back(it->second);
  }
  return w;
}

bool exact_zero(const Interval& x) {
  return !x.certainly_positive() && !x.certainly_negative() && x.width_double() == 0.0;
}

SeriesTable build_loop_table(const GraphSpec& spec, const std::string& v,
                             const Truncation& tr, const Interval& beta, int n) {
  const FiniteGraph& g = tr.g;
  std::vector<Interval> w = edge_weights(g, spec.symbols, beta);

  SeriesTable t;
  t.root = v;
  t.beta = beta;
  t.n_max = n;
  t.exact_radius = tr.radius;
  t.L.assign(n + 1, Interval(0));
  t.L[0] = Interval(1);

  std::vector<Interval> u(g.vertex_count(), Interval(0)), next(g.vertex_count(), Interval(0));
  const Interval zero(0);
  u[tr.root] = Interval(1);
  for (int step = 1; step <= n; ++step) {
    for (auto& x : next) x = zero;
    for (size_t s = 0; s < g.vertex_count(); ++s) {
      if (exact_zero(u[s])) continue;
      for (int ei : g.out_edges[s]) {
        next[g.edges[ei].dst] += u[s] * w[ei];
      }
    }
    u.swap(next);
    t.L[step] = u[tr.root];
  }

  // exact walk counts alongside: they pin the support of L and f, which
  // removes cancellation noise from structurally-zero entries
  std::vector<BigInt> cu(g.vertex_count(), 0), cnext(g.vertex_count(), 0);
  t.counts.assign(n + 1, BigInt(0));
  cu[tr.root] = 1;
  t.counts[0] = 1;
  for (int step = 1; step <= n; ++step) {
    std::fill(cnext.begin(), cnext.end(), BigInt(0));
    for (size_t s = 0; s < g.vertex_count(); ++s) {
      if (cu[s] == 0) continue;
      for (int ei : g.out_edges[s]) cnext[g.edges[ei].dst] += cu[s];
    }
    cu.swap(cnext);
    t.counts[step] = cu[tr.root];
    if (t.counts[step] == 0) t.L[step] = Interval(0);
  }
  return t;
}

void require_row_finite(const GraphSpec& spec) {
  if (spec.has_declared_infinite_emitter()) {
    throw NotRowFinite("series computations require a row-finite graph");
  }
}

}  // namespace

SeriesTable loop_weights(const GraphSpec& spec, const std::string& v,
                         const Interval& beta, int n_max) {
  if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
  require_row_finite(spec);
  Truncation tr = truncate(spec, v, n_max / 2 + 1);
  return build_loop_table(spec, v, tr, beta, n_max);
}

void first_return_weights(SeriesTable& table) {
  const int n_max = table.n_max;
  // exact first-return counts: where they vanish, f_n(beta) = 0 for every beta
  std::vector<BigInt> phi;
  if (!table.counts.empty()) phi = first_return_counts(table.counts);

  table.f.assign(n_max + 1, Interval(0));
  for (int n = 1; n <= n_max; ++n) {
    if (!phi.empty() && phi[n] == 0) continue;  // structural zero, exactly
    Interval acc = table.L[n];
    for (int k = 1; k < n; ++k) {
      if (!phi.empty() && phi[k] == 0) continue;
      acc -= table.f[k] * table.L[n - k];
    }
    // first-return weights are sums of path weights, hence nonnegative
    if (!acc.certainly_positive() && !acc.certainly_negative()) {
      acc = Interval::combine(Interval(0), acc);
    }
    table.f[n] = acc;
  }
  table.has_f = true;
}

std::vector<BigInt> loop_counts(const GraphSpec& spec, const std::string& v, int n_max) {
  require_row_finite(spec);
  Truncation tr = truncate(spec, v, n_max / 2 + 1);
  const FiniteGraph& g = tr.g;
  std::vector<BigInt> u(g.vertex_count(), 0), next(g.vertex_count(), 0);
  std::vector<BigInt> counts(n_max + 1, 0);
  u[tr.root] = 1;
  counts[0] = 1;
  for (int n = 1; n <= n_max; ++n) {
    std::fill(next.begin(), next.end(), BigInt(0));
    for (size_t s = 0; s < g.vertex_count(); ++s) {
      if (u[s] == 0) continue;
      for (int ei : g.out_edges[s]) {
        next[g.edges[ei].dst] += u[s];
      }
    }
    u.swap(next);
    counts[n] = u[tr.root];
  }
  return counts;
}

std::vector<BigInt> first_return_counts(const std::vector<BigInt>& counts) {
  std::vector<BigInt> phi(counts.size(), 0);
  for (size_t n = 1; n < counts.size(); ++n) {
    BigInt acc = counts[n];
    for (size_t k = 1; k < n; ++k) {
      acc -= phi[k] * counts[n - k];
    }
    phi[n] = acc;
  }
  return phi;
}

int period(const GraphSpec& spec, const std::string& v, int L_max, PeriodReport* report) {
  auto counts = loop_counts(spec, v, L_max);
  int d = 0;
  int d_half = 0;
  int seen = 0;
  for (int n = 1; n <= L_max; ++n) {
    if (counts[n] > 0) {
      d = d == 0 ? n : std::gcd(d, n);
      ++seen;
    }
    if (n == L_max / 2) d_half = d;
  }
  if (d == 0) throw NoLoopFound("no loop of length <= " + std::to_string(L_max) + " at " + v);
  if (report) {
    report->d = d;
    report->loops_seen = seen;
    report->window = L_max;
    report->stabilized = (d_half == d && d_half != 0);
  }
  return d;
}

// --- shared engine ------------------------------------------------------------

ReturnSeriesEngine::ReturnSeriesEngine(const GraphSpec& spec, const std::string& v, int n_max)
    : spec_(spec), root_name_(v), tr_(truncate(spec, v, n_max / 2 + 1)), n_max_(n_max) {
  require_row_finite(spec);
  int d = 0;
  auto fold = [&](const std::vector<BigInt>& counts) {
    for (size_t n = 1; n < counts.size(); ++n) {
      if (counts[n] > 0) d = d == 0 ? static_cast<int>(n) : std::gcd(d, static_cast<int>(n));
    }
  };
  fold(loop_counts(spec, v, std::min(n_max, 64)));
  if (d == 0 && n_max > 64) fold(loop_counts(spec, v, n_max));
  if (d == 0) throw NoLoopFound("no loop of length <= " + std::to_string(n_max) + " at " + v);
  d_ = d;
}

SeriesTable ReturnSeriesEngine::table(const Interval& beta, int n) const {
  SeriesTable t = build_loop_table(spec_, root_name_, tr_, beta, std::min(n, n_max_));
  first_return_weights(t);
  return t;
}

RecurrenceVerdict ReturnSeriesEngine::evaluate(const Interval& beta, const Rational& tol) const {
  RecurrenceVerdict v;
  const Rational one(1);
  for (int n = std::min(64, n_max_);; n = std::min(2 * n, n_max_)) {
    SeriesTable t = table(beta, n);
    Interval partial(0);
    bool exceeded = false;
    for (int k = 1; k <= n; ++k) {
      partial += t.f[k];
      if (partial.certainly_greater(one)) {
        exceeded = true;
        break;
      }
    }
    v.partial = partial;
    v.n_used = n;
    if (exceeded) {
      v.kind = RecurrenceVerdict::Kind::Supercritical;
      v.total = Interval::combine(partial, Interval::pos_infinity());
      return v;
    }

    // observed-ratio geometric tail over trailing block sums.  Blocks of q
    // consecutive entries absorb support gaps and strands that have decayed
    // below the interval noise floor; q runs over multiples of d_G.
    v.tail_certified = false;
    for (int mult = 1; mult <= 6 && !v.tail_certified; ++mult) {
      const int q = d_ * mult;
      const int nblocks = std::min(5, n / (2 * q));
      if (nblocks < 3) continue;
      std::vector<Interval> blocks(nblocks, Interval(0));
      for (int b = 0; b < nblocks; ++b) {
        for (int i = 0; i < q; ++i) blocks[b] += t.f[n - (nblocks - 1 - b) * q - i];
      }
      if (mult == 1) {
        // finitely supported first returns: the whole trailing half must be
        // structurally zero, not just the block window
        bool half_zero = true;
        for (int k = n / 2; k <= n && half_zero; ++k) half_zero = exact_zero(t.f[k]);
        if (half_zero) {
          v.total = partial;
          v.tail_certified = true;
          v.tail_ratio = Interval(0);
          break;
        }
      }
      // the trailing block must be alive: pulse-then-silence windows from a
      // support gap wider than q must not certify a dying tail
      if (!blocks.back().certainly_positive()) continue;
      bool certifiable = true;
      Interval ratio(0);
      bool have_ratio = false;
      for (int b = 0; b + 1 < nblocks && certifiable; ++b) {
        if (!blocks[b].certainly_positive()) {
          certifiable = false;
          break;
        }
        Interval r = blocks[b + 1] / blocks[b];
        ratio = have_ratio ? Interval::hull(ratio, r) : r;
        have_ratio = true;
      }
      if (!certifiable || !have_ratio) continue;
      if (ratio.certainly_less(one)) {
        Interval tail = geometric_tail(blocks.back(), Interval::hull(Interval(0), ratio));
        v.total = partial + tail;
        v.tail_certified = true;
        v.tail_ratio = ratio;
      }
    }
    if (!v.tail_certified) {
      v.total = Interval::combine(partial, Interval::pos_infinity());
    }

    if (v.tail_certified && v.total.certainly_less(one)) {
      v.kind = RecurrenceVerdict::Kind::Transient;
      return v;
    }
    if (v.tail_certified) {
      Interval dev = v.total - Interval(1);
      if (dev.certainly_less(tol) && (-dev).certainly_less(tol)) {
        v.kind = RecurrenceVerdict::Kind::Recurrent;
        return v;
      }
    }
    if (n >= n_max_) {
      v.kind = RecurrenceVerdict::Kind::Undecided;
      return v;
    }
  }
}

std::string to_string(RecurrenceVerdict::Kind k) {
  switch (k) {
    case RecurrenceVerdict::Kind::Transient: return "transient";
    case RecurrenceVerdict::Kind::Recurrent: return "recurrent";
    case RecurrenceVerdict::Kind::Supercritical: return "supercritical";
    default: return "undecided";
  }
}

RecurrenceVerdict classify_recurrence(const GraphSpec& spec, const std::string& v,
                                      const Interval& beta, int n_max, const Rational& tol) {
  return ReturnSeriesEngine(spec, v, n_max).evaluate(beta, tol);
}

// --- Gurevich entropy -----------------------------------------------------------

namespace {

Interval horner(const std::vector<Interval>& coeffs, const Interval& z) {
  Interval acc(0);
  for (size_t i = coeffs.size(); i-- > 0;) {
    acc = acc * z + coeffs[i];
  }
  return acc;
}

struct TailPattern {
  bool found = false;
  int q = 0;
  int start = 0;
  std::vector<Rational> ratio;  // per residue class mod q; 0 = all-zero class
};

// Exact per-residue geometric structure of the first-return counts over the
// trailing half of the window: phi_{n+q} = ratio[n mod q] * phi_n.
TailPattern detect_geometric_tail(const std::vector<BigInt>& phi, int d) {
  const int n = static_cast<int>(phi.size()) - 1;
  TailPattern pat;
  for (int mult = 1; mult <= 6; ++mult) {
    const int q = d * mult;
    const int start = std::max(1, n / 2);
    if (start + 2 * q > n) break;
    std::vector<Rational> ratio(q, Rational(0));
    std::vector<bool> fixed(q, false);
    bool ok = true;
    for (int k = start; k + q <= n && ok; ++k) {
      const int r = k % q;
      if (phi[k] == 0) {
        ok = phi[k + q] == 0;
        continue;
      }
      Rational rho(BigInt(phi[k + q]), BigInt(phi[k]));
      if (!fixed[r]) {
        ratio[r] = rho;
        fixed[r] = true;
      } else {
        ok = ratio[r] == rho;
      }
    }
    if (ok) {
      pat.found = true;
      pat.q = q;
      pat.start = start;
      pat.ratio = ratio;
      return pat;
    }
  }
  return pat;
}

Interval int_pow(const Interval& z, int n) {
  Interval acc(1);
  for (int i = 0; i < n; ++i) acc *= z;
  return acc;
}

}  // namespace

EntropyResult gurevich_entropy(const GraphSpec& spec, const std::string& v, int n_max) {
  EntropyResult res;
  res.n_used = n_max;
  auto counts = loop_counts(spec, v, n_max);
  int d = 0;
  for (int n = 1; n <= n_max; ++n) {
    if (counts[n] > 0) d = d == 0 ? n : std::gcd(d, n);
  }
  if (d == 0) throw NoLoopFound("no loop at " + v + " within n_max");
  res.d_G = d;

  // row-finiteness bounds growth by (max out-degree)^n
  {
    Truncation tr = truncate(spec, v, 2);
    size_t max_deg = 1;
    for (const auto& adj : tr.g.out_edges) max_deg = std::max(max_deg, adj.size());
    BigInt bound = 1;
    for (int n = 1; n <= std::min(n_max, 16); ++n) {
      bound *= BigInt(max_deg);
      if (counts[n] > bound) throw Divergent("loop counts exceed degree bound");
    }
  }

  // supermultiplicative lower bound: c_{n+m} >= c_n c_m, so every
  // (1/n) log c_n sits below h
  Interval lower_super(0);
  bool have_super = false;
  for (int n = 1; n <= n_max; ++n) {
    if (counts[n] <= 1) continue;
    Interval cand = Interval::log_of(Interval(counts[n])) / Interval(n);
    if (!have_super || cand.lo_double() > lower_super.lo_double()) lower_super = cand;
    have_super = true;
  }

  auto phi = first_return_counts(counts);
  BigInt phi_total = 0;
  for (const auto& x : phi) phi_total += x;

  std::vector<Interval> coeffs(phi.size(), Interval(0));
  for (size_t i = 0; i < phi.size(); ++i) {
    if (phi[i] != 0) coeffs[i] = Interval(phi[i]);
  }
  auto partial_minus_one = [&](const Rational& z) {
    return horner(coeffs, Interval(z)) - Interval(1);
  };
  const Rational z_tol(1, BigInt(1) << 60);

  // root of the truncated return series: omitting nonnegative tail terms can
  // only move the root up, so -log(root) is a certified lower bound for h
  Interval lower_root(0);
  bool have_root = false;
  if (phi_total == 1) {
    lower_root = Interval(0);
    have_root = true;
  } else if (phi_total > 1) {
    BracketResult br =
        bisect_sign_change(partial_minus_one, Rational(1, 1 << 20), Rational(1), z_tol);
    lower_root = -Interval::log_of(br.enclosure());
    have_root = true;
  }

  Interval lower = have_super ? lower_super : Interval(0);
  if (have_root && lower_root.lo_double() > lower.lo_double()) lower = lower_root;
  res.lower_certified = lower;

  TailPattern pat = detect_geometric_tail(phi, d);
  res.pattern_detected = pat.found;
  res.pattern_period = pat.q;

  auto finish_with_model = [&](const Interval& h_model, const std::string& note) {
    res.h = lower.lo_double() > h_model.lo_double() ? Interval::combine(lower, h_model) : h_model;
    res.upper_heuristic = false;
    res.note = note;
  };

  if (pat.found) {
    const int n = n_max;
    bool tail_empty = true;
    for (const auto& r : pat.ratio) {
      if (r != 0) tail_empty = false;
    }
    // full series under the extended tail; +inf at or beyond the tail radius
    auto series_minus_one = [&](const Rational& z) -> Interval {
      Interval zi(z);
      Interval acc = horner(coeffs, zi);
      Interval zq = int_pow(zi, pat.q);
      for (int r = 0; r < pat.q; ++r) {
        if (pat.ratio[r] == 0) continue;
        int m = n - (n % pat.q) + r;
        while (m > n) m -= pat.q;
        Interval rho_zq = Interval(pat.ratio[r]) * zq;
        if (!rho_zq.certainly_less(Rational(1))) return Interval::pos_infinity();
        acc += Interval(phi[m]) * int_pow(zi, m) * rho_zq / (Interval(1) - rho_zq);
      }
      return acc - Interval(1);
    };

    if (tail_empty && phi_total == 1) {
      finish_with_model(Interval(0), "finitely supported return counts summing to 1");
    } else {
      bool solved = false;
      try {
        BracketResult br =
            bisect_sign_change(series_minus_one, Rational(1, 1 << 20), Rational(1), z_tol);
        finish_with_model(-Interval::log_of(br.enclosure()),
                          "root of the tail-extended return series");
        solved = true;
      } catch (const BracketInvalid&) {
      }
      if (!solved) {
        Rational rho_max(0);
        for (const auto& r : pat.ratio) rho_max = std::max(rho_max, r);
        if (rho_max > 1) {
          // return series stays below 1 up to its radius: h = -log(radius)
          Interval h_model = Interval::log_of(Interval(rho_max)) / Interval(pat.q);
          finish_with_model(h_model, "transient at the radius; h from the tail ratio");
        } else {
          res.h = lower;
          res.upper_heuristic = true;
          res.note = "no certified root location; reporting the certified lower bound";
        }
      }
    }
  } else {
    res.h = lower;
    res.upper_heuristic = true;
    res.note = "first-return counts not eventually geometric on the window";
  }
  return res;
}

// --- critical inverse temperature ---------------------------------------------

BetaCriticalResult beta_critical(const GraphSpec& spec, const std::string& v,
                                 const Rational& bracket_lo, const Rational& bracket_hi,
                                 const Rational& tol, int n_max) {
  ValidationReport rep = validate(spec, 10);
  if (rep.potential_nonneg != Tri::Yes) {
    throw NotMonotone("potential not certified nonnegative; use recurrence_scan");
  }
  if (rep.zero_f_cycle_detected == Tri::Yes) {
    throw NotMonotone("zero-value cycle detected: " + rep.zero_cycle_witness);
  }

  ReturnSeriesEngine engine(spec, v, n_max);
  int evals = 0;
  auto sum_minus_one = [&](const Rational& beta) -> Interval {
    ++evals;
    RecurrenceVerdict verdict = engine.evaluate(Interval(beta), tol);
    return verdict.total - Interval(1);
  };

  BetaCriticalResult out;
  BracketResult br = bisect_sign_change(sum_minus_one, bracket_lo, bracket_hi, tol);
  out.lo = br.lo;
  out.hi = br.hi;
  out.bracket = br.enclosure();
  out.achieved_tol = br.decided;
  out.evaluations = evals;
  if (!br.decided) out.note = "sign undecidable before reaching tol; bracket remains valid";
  return out;
}

std::vector<RecurrenceVerdict> recurrence_scan(const GraphSpec& spec, const std::string& v,
                                               const std::vector<Interval>& betas, int n_max,
                                               const Rational& tol) {
  ReturnSeriesEngine engine(spec, v, n_max);
  std::vector<RecurrenceVerdict> out;
  out.reserve(betas.size());
  for (const auto& b : betas) out.push_back(engine.evaluate(b, tol));
  return out;
}

}  // namespace kmsgraph

