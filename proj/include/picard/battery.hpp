// The verification battery: nine exact checks with fixed workloads and
// runtime budgets. Shared by `picard verify-all` and the acceptance binary.
#pragma once

#include "picard/derived.hpp"
#include "picard/resolution.hpp"
#include "picard/site.hpp"
#include "picard/smith.hpp"

#include <chrono>
#include <functional>
#include <random>
#include <sstream>

namespace picard {

struct BatteryOptions {
  std::uint64_t seed = 1;
  /// Caps the orders of the cyclic groups swept by the classical Ext check.
  int max_order = 12;
};

struct CriterionOutcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double limit_seconds;
  std::function<CriterionOutcome(const BatteryOptions&)> run;
};

struct CriterionResult {
  int id;
  std::string name;
  bool pass;
  std::string detail;
  double seconds;
  double limit_seconds;
};

namespace battery {

inline long pick(std::mt19937_64& rng, std::initializer_list<long> xs) {
  return *(xs.begin() + static_cast<std::ptrdiff_t>(rng() % xs.size()));
}

inline IntMatrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols, int bound) {
  std::uniform_int_distribution<int> dist(-bound, bound);
  IntMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = dist(rng);
  return m;
}

/// K^n = Z^{r_n} / m_n with m_{n+1} | m_n (0 = free). Differentials are drawn
/// from the left kernel of the previous one, so d∘d = 0 over Z already.
inline CochainComplex random_model(std::mt19937_64& rng, int lo = -2, int hi = 0) {
  const std::size_t len = static_cast<std::size_t>(hi - lo + 1);
  std::vector<std::size_t> ranks(len);
  for (auto& r : ranks) r = rng() % 3;
  std::vector<long> m(len, 0);
  m[len - 1] = pick(rng, {0, 1, 2, 3, 4, 6});
  for (std::size_t k = len - 1; k-- > 0;)
    m[k] = (m[k + 1] == 0 || rng() % 4 == 0) ? 0 : m[k + 1] * pick(rng, {1, 1, 2, 3});
  std::vector<IntMatrix> d;
  for (std::size_t k = 0; k + 1 < len; ++k) {
    if (k == 0) {
      d.push_back(random_matrix(rng, ranks[1], ranks[0], 3));
      continue;
    }
    const IntMatrix left = kernel_basis(d.back().transpose());
    d.push_back(random_matrix(rng, ranks[k + 1], left.cols(), 2) * left.transpose());
  }
  std::vector<FgAbGroup> groups;
  for (std::size_t k = 0; k < len; ++k)
    groups.push_back(m[k] == 0 ? FgAbGroup::free(ranks[k])
                               : FgAbGroup(ranks[k], IntMatrix::scalar(ranks[k], m[k])));
  return CochainComplex::from_matrices(lo, std::move(groups), d);
}

/// g_k / g_{k-1} from gcds of k×k minors (Bareiss determinants). The running
/// gcd stops once it reaches g_{k-1}·d_{k-1}, a lower bound since d_{k-1} | d_k.
inline IntVector invariant_factors_by_minors(const IntMatrix& a) {
  IntVector out;
  Integer prev = 1, last = 1;
  const std::size_t n = std::min(a.rows(), a.cols());
  for (std::size_t k = 1; k <= n; ++k) {
    const Integer floor = prev * last;
    Integer g = 0;
    std::vector<std::size_t> r(k), c(k);
    const auto first = [](std::vector<std::size_t>& v) {
      for (std::size_t i = 0; i < v.size(); ++i) v[i] = i;
    };
    const auto next = [](std::vector<std::size_t>& v, std::size_t n) {
      for (std::size_t i = v.size(); i-- > 0;)
        if (v[i] < n - v.size() + i) {
          ++v[i];
          for (std::size_t j = i + 1; j < v.size(); ++j) v[j] = v[j - 1] + 1;
          return true;
        }
      return false;
    };
    first(r);
    bool done = false;
    do {
      first(c);
      do {
        IntMatrix m(k, k);
        for (std::size_t i = 0; i < k; ++i)
          for (std::size_t j = 0; j < k; ++j) m(i, j) = a(r[i], c[j]);
        g = gcd(g, abs_value(determinant(m)));
        done = g == floor;
      } while (!done && next(c, a.cols()));
    } while (!done && next(r, a.rows()));
    if (g == 0) break;
    last = g / prev;
    out.push_back(last);
    prev = g;
  }
  return out;
}

inline std::string str(const FgAbGroup& g) { return canonical_form(g).to_string(); }

inline std::string show(const CochainComplex& k) {
  if (k.empty()) return "0";
  std::ostringstream os;
  os << "[";
  for (int n = k.lo(); n <= k.hi(); ++n) {
    os << str(k.group(n)) << "@" << n;
    if (n < k.hi()) os << " -> ";
  }
  os << "]";
  return os.str();
}

/// A length-3 complex on the one-point site.
inline SheafComplex on_point(const CochainComplex& k) {
  const PosetSite pt = PosetSite::point();
  std::vector<PosetSheaf> sheaves;
  std::vector<std::vector<IntMatrix>> diffs;
  for (int n = k.lo(); n <= k.hi(); ++n) sheaves.emplace_back(pt, std::vector<FgAbGroup>{k.group(n)}, std::vector<IntMatrix>{});
  for (int n = k.lo(); n < k.hi(); ++n) diffs.push_back({k.diff(n).matrix()});
  return SheafComplex(k.lo(), std::move(sheaves), std::move(diffs));
}

inline PosetSite pseudo_circle() {
  return PosetSite({"a", "b", "c", "d"}, {{"a", "c"}, {"a", "d"}, {"b", "c"}, {"b", "d"}});
}

inline CochainComplex at(const FgAbGroup& g, int n) { return CochainComplex::concentrated(g, n); }

}  // namespace battery

/// The resolution battery: Z/2, Z/3, Z/2+Z/2 in each degree -2..0, and
/// Z/2 → Z/4 → Z/2 with nonzero differentials.
inline std::vector<std::pair<std::string, CochainComplex>> resolution_battery() {
  using battery::at;
  std::vector<std::pair<std::string, CochainComplex>> out;
  for (int d = -2; d <= 0; ++d) {
    const std::string deg = "@" + std::to_string(d);
    out.emplace_back("Z/2" + deg, at(FgAbGroup::cyclic(2), d));
    out.emplace_back("Z/3" + deg, at(FgAbGroup::cyclic(3), d));
    out.emplace_back("Z/2+Z/2" + deg, at(FgAbGroup::from_factors({2, 2}, 0), d));
  }
  const std::vector<FgAbGroup> g{FgAbGroup::cyclic(2), FgAbGroup::cyclic(4), FgAbGroup::cyclic(2)};
  out.emplace_back("[Z/2 -2-> Z/4 -0-> Z/2]",
                   CochainComplex::from_matrices(-2, g, {IntMatrix{{2}}, IntMatrix{{0}}}));
  out.emplace_back("[Z/2 -2-> Z/4 -1-> Z/2]",
                   CochainComplex::from_matrices(-2, g, {IntMatrix{{2}}, IntMatrix{{1}}}));
  return out;
}

/// Coefficients G for the right-resolution check. [Z/2 → Z/2 → 0] carries the
/// identity map in degrees -2, -1.
inline std::vector<std::pair<std::string, CochainComplex>> coefficient_battery() {
  using battery::at;
  return {{"Z@0", at(FgAbGroup::free(1), 0)},
          {"Z/2@0", at(FgAbGroup::cyclic(2), 0)},
          {"Z/4@-1", at(FgAbGroup::cyclic(4), -1)},
          {"[Z/2 -1-> Z/2 -> 0]",
           CochainComplex::from_matrices(-2, {FgAbGroup::cyclic(2), FgAbGroup::cyclic(2), FgAbGroup()},
                                         {IntMatrix{{1}}, IntMatrix(0, 1)})}};
}

namespace battery {

// Collects the first few failures and counts checks.
class Tally {
 public:
  void check(bool ok, const std::string& what) {
    ++checks_;
    if (ok) return;
    ++failures_;
    if (failures_ <= 3) first_ += (first_.empty() ? "" : "; ") + what;
  }
  CriterionOutcome outcome(const std::string& summary) const {
    if (failures_ == 0) return {true, summary + " (" + std::to_string(checks_) + " checks)"};
    return {false, std::to_string(failures_) + " of " + std::to_string(checks_) +
                       " checks failed: " + first_};
  }

 private:
  long checks_ = 0, failures_ = 0;
  std::string first_;
};

inline CriterionOutcome smith_soundness(const BatteryOptions& o) {
  std::mt19937_64 rng(o.seed);
  Tally t;
  for (int k = 0; k < 500; ++k) {
    const IntMatrix a = random_matrix(rng, 1 + rng() % 8, 1 + rng() % 8, 9);
    const auto d = smith_normal_form(a);
    const std::string tag = "matrix " + std::to_string(k);
    t.check(d.U * a * d.V == d.S, tag + ": U A V != S");
    t.check(abs_value(determinant(d.U)) == 1 && abs_value(determinant(d.V)) == 1,
            tag + ": U or V not unimodular");
    bool shape = true;
    for (std::size_t i = 0; i < d.S.rows(); ++i)
      for (std::size_t j = 0; j < d.S.cols(); ++j)
        if (i != j && d.S(i, j) != 0) shape = false;
    const IntVector diag = d.diagonal();
    for (std::size_t i = 0; i < diag.size(); ++i) {
      if (diag[i] < 0) shape = false;
      if (i + 1 < diag.size() && (diag[i] == 0 ? diag[i + 1] != 0 : diag[i + 1] % diag[i] != 0))
        shape = false;
    }
    t.check(shape, tag + ": not diagonal with a divisibility chain");
    IntVector nonzero;
    for (const auto& x : diag)
      if (x != 0) nonzero.push_back(x);
    t.check(nonzero == invariant_factors_by_minors(a), tag + ": minor gcds disagree");
  }
  return t.outcome("500 random matrices up to 8x8");
}

inline CriterionOutcome classical_ext(const BatteryOptions& o) {
  const int top = std::min(12, std::max(1, o.max_order));
  Tally t;
  for (int m = 1; m <= top; ++m)
    for (int n = 1; n <= top; ++n) {
      const auto p = at(FgAbGroup::cyclic(m), 0), g = at(FgAbGroup::cyclic(n), 0);
      const FgAbGroup want = FgAbGroup::cyclic(std::gcd(m, n));
      for (int i : {1, 0}) {
        const FgAbGroup got = ext_group(p, g, i);
        t.check(canonical_form(got) == canonical_form(want),
                "Ext^" + std::to_string(i) + "(Z/" + std::to_string(m) + ", Z/" +
                    std::to_string(n) + ") = " + str(got));
      }
    }
  return t.outcome("1 <= m, n <= " + std::to_string(top) +
                   (top < 12 ? " (capped by --max-order)" : ""));
}

inline CriterionOutcome punctual_tors(const BatteryOptions& o) {
  std::mt19937_64 rng(o.seed + 3);
  Tally t;
  for (int k = 0; k < 24; ++k) {
    const CochainComplex c = random_model(rng);
    const auto tors = tors_groups(on_point(c));
    const std::string tag = show(c);
    t.check(tors[0].is_trivial(), tag + ": Tors^1 = " + str(tors[0]));
    for (std::size_t k = 1; k < 4; ++k) {
      const int deg = 1 - static_cast<int>(k);
      t.check(is_isomorphic(tors[k], cohomology_at(c, deg)),
              tag + ": Tors^" + std::to_string(deg) + " = " + str(tors[k]));
    }
  }
  return t.outcome("24 random complexes on the one-point site");
}

inline CriterionOutcome circle_tors(const BatteryOptions&) {
  Tally t;
  const PosetSite c = pseudo_circle();
  for (const auto& [name, g] : std::vector<std::pair<std::string, FgAbGroup>>{
           {"Z", FgAbGroup::free(1)}, {"Z/2", FgAbGroup::cyclic(2)}, {"Z/6", FgAbGroup::cyclic(6)}}) {
    const SheafComplex k = SheafComplex::concentrated(PosetSheaf::constant(c, g), 0);
    const auto tors = tors_groups(k);
    t.check(is_isomorphic(tors[0], g), "Tors^1 with coefficients " + name + " = " + str(tors[0]));
    const TorsorClasses classes(k);
    if (classes.group().n_gens() == 0) continue;
    IntVector gen(classes.group().n_gens(), Integer(0));
    const auto& cc = classes.group().coordinates();
    for (std::size_t m = 0; m < cc.moduli.size(); ++m)
      if (cc.moduli[m] != 1) {
        IntVector y(cc.moduli.size(), Integer(0));
        y[m] = 1;
        gen = cc.from_canonical.apply(y);
        break;
      }
    const IntVector x = classes.cocycle(gen);
    t.check(!classes.is_trivial(x), name + ": generator class is trivial");
    t.check(classes.is_trivial(classes.add(x, classes.neg(x))), name + ": c + (-c) != 0");
    if (name == "Z/2") t.check(classes.is_trivial(classes.add(x, x)), "Z/2: 2c != 0");
    if (name == "Z/6") t.check(!classes.is_trivial(classes.add(x, x)), "Z/6: 2c = 0");
  }
  return t.outcome("pseudo-circle with constant Z, Z/2, Z/6");
}

inline CriterionOutcome resolution_wellformed(const BatteryOptions&) {
  Tally t;
  for (const auto& [name, p] : resolution_battery()) {
    try {
      const ResolutionChain r = build_resolution(p);
      r.verify();
      t.check(true, name);
    } catch (const std::exception& e) {
      t.check(false, name + ": " + e.what());
    }
  }
  return t.outcome(std::to_string(resolution_battery().size()) + " complexes");
}

inline CriterionOutcome resolution_exact(const BatteryOptions&) {
  Tally t;
  for (const auto& [name, p] : resolution_battery()) {
    const ResolutionReport rep = resolution_homology_check(p);
    for (const auto& l : rep.lines)
      if (l.asserted)
        t.check(l.ok, name + ": H^" + std::to_string(l.degree) + "(Tot) = " + str(l.total) +
                          ", expected " + str(l.expected));
  }
  return t.outcome("degrees 0, -1, -2 on " + std::to_string(resolution_battery().size()) + " complexes");
}

inline CriterionOutcome right_resolution(const BatteryOptions&) {
  Tally t;
  for (const auto& [pn, p] : resolution_battery()) {
    const ResolutionChain r = build_resolution(p);
    for (const auto& [gn, g] : coefficient_battery()) {
      const auto via = ext_via_resolution(r, g);
      for (std::size_t k = 0; k < 4; ++k) {
        const int i = 1 - static_cast<int>(k);
        const FgAbGroup direct = ext_group(p, g, i);
        t.check(is_isomorphic(via[k], direct), "P = " + pn + ", G = " + gn + ", i = " +
                                                   std::to_string(i) + ": " + str(via[k]) +
                                                   " vs " + str(direct));
      }
    }
  }
  return t.outcome(std::to_string(resolution_battery().size() * coefficient_battery().size()) +
                   " pairs, i = 1..-2");
}

inline ChainMap scalar_map(const CochainComplex& k, long c) {
  std::vector<IntMatrix> comps;
  for (const auto& grp : k.groups()) comps.push_back(IntMatrix::scalar(grp.n_gens(), c));
  return ChainMap(k, k, k.lo(), comps);
}

inline CriterionOutcome extension_round_trip(const BatteryOptions& o) {
  std::mt19937_64 rng(o.seed + 8);
  Tally t;
  int classes = 0, nonzero = 0;
  while (classes < 50) {
    const CochainComplex p = random_model(rng), g = random_model(rng);
    const ExtGroup ext(p, g);
    if (ext.group().is_trivial() && rng() % 4 != 0) continue;
    ++classes;
    IntVector coords;
    for (std::size_t k = 0; k < ext.group().n_gens(); ++k)
      coords.push_back(static_cast<long>(rng() % 5) - 2);
    const IntVector xi = ext.cocycle(coords);
    const bool zero = ext.group().is_zero_element(ext.class_of(xi));
    nonzero += zero ? 0 : 1;
    const std::string tag = "P = " + show(p) + ", G = " + show(g);
    const Extension x = realize_extension(ext, xi);
    t.check(ext.same_class(classify_extension(ext, x), xi), tag + ": classify(realize(xi)) != xi");
    t.check(splits_in_cohomology(x) == zero, tag + ": splitting disagrees with xi = 0");

    t.check(ext.same_class(pullback_class(ChainMap::identity(p), ext, xi, ext), xi),
            tag + ": id^* xi != xi");
    t.check(ext.same_class(pushout_class(ChainMap::identity(g), ext, xi, ext), xi),
            tag + ": id_* xi != xi");
    const long a = static_cast<long>(rng() % 4) - 1, b = static_cast<long>(rng() % 4) - 1;
    const ChainMap fa = scalar_map(p, a), fb = scalar_map(p, b);
    const IntVector lhs = pullback_class(compose(fa, fb), ext, xi, ext);
    const IntVector rhs = pullback_class(fb, ext, pullback_class(fa, ext, xi, ext), ext);
    t.check(ext.same_class(lhs, rhs), tag + ": (f f')^* != f'^* f^*");
    t.check(ext.same_class(lhs, scale(a * b, xi)), tag + ": (ab)^* xi != ab xi");
    const ChainMap ga = scalar_map(g, a), gb = scalar_map(g, b);
    const IntVector plhs = pushout_class(compose(ga, gb), ext, xi, ext);
    const IntVector prhs = pushout_class(ga, ext, pushout_class(gb, ext, xi, ext), ext);
    t.check(ext.same_class(plhs, prhs), tag + ": (g g')_* != g_* g'_*");
    t.check(ext.same_class(plhs, scale(a * b, xi)), tag + ": (ab)_* xi != ab xi");
    // Pushout and pullback commute: g_* f^* = f^* g_*.
    const IntVector pp = pushout_class(ga, ext, pullback_class(fb, ext, xi, ext), ext);
    const IntVector qq = pullback_class(fb, ext, pushout_class(ga, ext, xi, ext), ext);
    t.check(ext.same_class(pp, qq), tag + ": pullback and pushout do not commute");
  }
  return t.outcome(std::to_string(classes) + " random classes, " + std::to_string(nonzero) +
                   " nonzero");
}

inline CriterionOutcome conventions(const BatteryOptions& o) {
  std::mt19937_64 rng(o.seed + 9);
  Tally t;
  for (int k = 0; k < 40; ++k) {
    const CochainComplex c = random_model(rng, -3, 0);
    const std::string tag = show(c);
    const int i = static_cast<int>(rng() % 5) - 2;
    const CochainComplex s = shift(c, i);
    for (int n = c.lo() - 3; n <= c.hi() + 3; ++n) {
      t.check(is_isomorphic(cohomology_at(s, n), cohomology_at(c, n + i)),
              tag + ": H^n(K[i]) vs H^{n+i}(K) at n = " + std::to_string(n));
      t.check(same_presentation(s.group(n), c.group(n + i)), tag + ": K[i]^n != K^{n+i}");
      const Integer sign = i % 2 == 0 ? 1 : -1;
      t.check(s.diff(n).matrix() == sign * c.diff(n + i).matrix(),
              tag + ": d_{K[i]}^n != (-1)^i d^{n+i}");
    }
    for (int n = c.lo() - 1; n <= c.hi() + 1; ++n) {
      const CochainComplex tau = good_truncate(c, n);
      const CochainComplex sigma = bad_truncate(c, n);
      for (int m = c.lo() - 1; m <= c.hi() + 1; ++m) {
        const std::string at_m = tag + ", n = " + std::to_string(n) + ", degree " + std::to_string(m);
        if (m < n) {
          t.check(same_presentation(tau.group(m), c.group(m)), at_m + ": tau K^m != K^m");
          if (m + 1 < n)
            t.check(tau.diff(m).matrix() == c.diff(m).matrix(), at_m + ": tau d != d");
        } else if (m == n) {
          t.check(is_isomorphic(tau.group(m), kernel_subgroup(c.diff(m)).group),
                  at_m + ": tau K^n != ker d^n");
        } else {
          t.check(tau.group(m).n_gens() == 0, at_m + ": tau K^m != 0");
        }
        if (m <= n) {
          t.check(same_presentation(sigma.group(m), c.group(m)), at_m + ": sigma K^m != K^m");
          if (m < n) t.check(sigma.diff(m).matrix() == c.diff(m).matrix(), at_m + ": sigma d != d");
        } else {
          t.check(sigma.group(m).n_gens() == 0, at_m + ": sigma K^m != 0");
        }
        const bool below = m <= n;
        t.check(is_isomorphic(cohomology_at(tau, m), below ? cohomology_at(c, m) : FgAbGroup()),
                at_m + ": H^m(tau K) wrong");
      }
    }
  }
  return t.outcome("40 random complexes, shifts -2..2, truncations in every degree");
}

}  // namespace battery

/// Criteria in order; limits are wall-clock budgets in seconds.
inline const std::vector<Criterion>& acceptance_criteria() {
  static const std::vector<Criterion> list{
      {1, "Smith normal form soundness", 10, battery::smith_soundness},
      {2, "classical Ext of cyclic groups", 10, battery::classical_ext},
      {3, "Tors on the one-point site", 10, battery::punctual_tors},
      {4, "Tors^1 on the pseudo-circle", 5, battery::circle_tors},
      {5, "resolution well-formedness", 60, battery::resolution_wellformed},
      {6, "partial resolution exactness", 60, battery::resolution_exact},
      {7, "right-resolution Ext agreement", 300, battery::right_resolution},
      {8, "extension calculus round trip", 60, battery::extension_round_trip},
      {9, "shift and truncation conventions", 10, battery::conventions},
  };
  return list;
}

/// Runs one criterion; an exception or a blown budget counts as a failure.
inline CriterionResult run_criterion(const Criterion& c, const BatteryOptions& o) {
  const auto start = std::chrono::steady_clock::now();
  CriterionOutcome out;
  try {
    out = c.run(o);
  } catch (const std::exception& e) {
    out = {false, std::string("threw: ") + e.what()};
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (secs > c.limit_seconds) {
    out.pass = false;
    out.detail += "; over the " + std::to_string(static_cast<int>(c.limit_seconds)) + " s budget";
  }
  return {c.id, c.name, out.pass, out.detail, secs, c.limit_seconds};
}

}  // namespace picard
