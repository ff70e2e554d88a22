#include <catch_amalgamated.hpp>

#include "picard/resolution.hpp"

#include <map>
#include <random>
#include <sstream>

using namespace picard;

namespace {

std::string str(const FgAbGroup& g) { return canonical_form(g).to_string(); }

CochainComplex conc(const FgAbGroup& g, int d) { return CochainComplex::concentrated(g, d); }

// ---------------------------------------------------------------------------
// Symbolic oracle: the formulas as written in bracket notation, parsed and
// expanded over the free abelian group on p1..p5. A vanishing composite there
// vanishes in every abelian group.

using Vec = std::vector<long>;             // element of Z^5
using Term = std::vector<Vec>;             // tuple of elements
using Sym = std::map<Term, long>;          // formal sum

struct Piece {
  int sign;
  std::vector<std::vector<int>> entries;  // each entry: indices k of p_k summed
};

std::vector<Piece> parse_formula(const std::string& text) {
  std::vector<Piece> out;
  std::size_t i = 0;
  int sign = 1;
  while (i < text.size()) {
    const char c = text[i];
    if (c == ' ') { ++i; continue; }
    if (c == '+') { sign = 1; ++i; continue; }
    if (c == '-') { sign = -1; ++i; continue; }
    REQUIRE(c == '[');
    const std::size_t close = text.find(']', i);
    Piece p{sign, {}};
    std::stringstream body(text.substr(i + 1, close - i - 1));
    std::string entry;
    while (std::getline(body, entry, ',')) {
      std::vector<int> ks;
      std::stringstream e(entry);
      std::string atom;
      while (std::getline(e, atom, '+')) {
        const auto at = atom.find('p');
        REQUIRE(at != std::string::npos);
        ks.push_back(std::stoi(atom.substr(at + 1)) - 1);
      }
      p.entries.push_back(ks);
    }
    out.push_back(p);
    sign = 1;
    i = close + 1;
  }
  return out;
}

// D_j on a generator of the given arity; `sym`/`diag` select the completion summands of L3.
std::string formula(int j, std::size_t arity, bool swapped, bool completion) {
  if (j == 0) return "[p1+p2] - [p1] - [p2]";
  if (j == 1 && arity == 2) return "[p1,p2] - [p2,p1]";
  if (j == 1) return "[p1+p2,p3] - [p1,p2+p3] + [p1,p2] - [p2,p3]";
  if (j == 2 && completion && arity == 2) return "[p1,p2] + [p2,p1]";
  if (j == 2 && completion && arity == 1) return "[p1,p1]";
  if (j == 2 && arity == 4)
    return "[p1,p2,p3] + [p1,p2+p3,p4] + [p2,p3,p4] - [p1+p2,p3,p4] - [p1,p2,p3+p4]";
  if (j == 2) return "[p2,p3,p1] + [p1,p2+p3] + [p1,p2,p3] - [p1,p3] - [p2,p1,p3] - [p1,p2]";
  if (j == 3 && arity == 5)
    return "[p2,p3,p4,p5] + [p1,p2+p3,p4,p5] + [p1,p2,p3,p4+p5] - [p1,p2,p3+p4,p5] - "
           "[p1,p2,p3,p4] - [p1+p2,p3,p4,p5]";
  if (swapped)
    return "[p1,p2,p3,p4] + [p1,p2,p3+p4] + [p1,p3,p4] + [p2,p1,p3,p4] - [p1,p2+p3,p4] - "
           "[p2,p3,p4,p1] - [p2,p3,p1,p4] - [p1,p2,p3]";
  return "[p1,p2,p3,p4] + [p1,p2,p3+p4] + [p1,p3,p4] - [p2,p1,p3,p4] - [p1,p2+p3,p4] - "
         "[p2,p3,p4,p1] + [p2,p3,p1,p4] - [p1,p2,p3]";
}

Sym apply_sym(int j, const Sym& s, bool swapped) {
  Sym out;
  for (const auto& [t, c] : s) {
    // Completion generators in L3 have arities 2 and 1; D2 on them is only
    // reached from L3, and D3 never produces them.
    const bool completion = j == 2 && t.size() <= 2;
    for (const auto& p : parse_formula(formula(j, t.size(), swapped, completion))) {
      Term u;
      for (const auto& ks : p.entries) {
        Vec v(5, 0);
        for (int k : ks)
          for (std::size_t m = 0; m < 5; ++m) v[m] += t[static_cast<std::size_t>(k)][m];
        u.push_back(v);
      }
      out[u] += p.sign * c;
    }
  }
  for (auto it = out.begin(); it != out.end();) it = it->second == 0 ? out.erase(it) : std::next(it);
  return out;
}

Sym generic(std::size_t arity) {
  Term t;
  for (std::size_t k = 0; k < arity; ++k) {
    Vec v(5, 0);
    v[k] = 1;
    t.push_back(v);
  }
  return {{t, 1}};
}

// Evaluates a symbolic term at concrete elements: p_k ↦ x_k.
Generator evaluate(const Term& t, const std::vector<std::size_t>& x, const FiniteElements& a,
                   std::size_t summand) {
  Generator g{summand, {}};
  for (const auto& v : t) {
    std::size_t e = 0;  // the zero element has index 0
    for (std::size_t k = 0; k < x.size(); ++k)
      for (long r = 0; r < v[k]; ++r) e = a.sum(e, x[k]);
    g.tuple.push_back(e);
  }
  return g;
}

// Summand of L_j holding tuples of the given arity.
std::size_t summand_of(int j, std::size_t arity) {
  const auto s = resolution_summands(j);
  for (std::size_t k = 0; k < s.size(); ++k)
    if (s[k].arity == arity) return k;
  FAIL("no summand of arity " << arity << " in L" << j);
  return 0;
}

std::vector<std::vector<std::size_t>> all_tuples(std::size_t n, std::size_t arity) {
  std::vector<std::vector<std::size_t>> out{{}};
  for (std::size_t k = 0; k < arity; ++k) {
    std::vector<std::vector<std::size_t>> next;
    for (const auto& t : out)
      for (std::size_t x = 0; x < n; ++x) {
        auto u = t;
        u.push_back(x);
        next.push_back(u);
      }
    out = next;
  }
  return out;
}

std::vector<std::pair<std::string, CochainComplex>> battery() {
  std::vector<std::pair<std::string, CochainComplex>> out;
  for (int d = -2; d <= 0; ++d) {
    const std::string at = " in degree " + std::to_string(d);
    out.emplace_back("Z/2" + at, conc(FgAbGroup::cyclic(2), d));
    out.emplace_back("Z/3" + at, conc(FgAbGroup::cyclic(3), d));
    out.emplace_back("Z/2+Z/2" + at, conc(FgAbGroup::from_factors({2, 2}, 0), d));
  }
  const std::vector<FgAbGroup> g{FgAbGroup::cyclic(2), FgAbGroup::cyclic(4), FgAbGroup::cyclic(2)};
  out.emplace_back("[Z/2 -2-> Z/4 -> Z/2]", CochainComplex::from_matrices(-2, g, {IntMatrix{{2}}, IntMatrix{{0}}}));
  out.emplace_back("[Z/2 -2-> Z/4 -1-> Z/2]", CochainComplex::from_matrices(-2, g, {IntMatrix{{2}}, IntMatrix{{1}}}));
  return out;
}

}  // namespace

TEST_CASE("free group on a complex") {
  const auto z2 = free_on_complex(conc(FgAbGroup::cyclic(2), 0));
  CHECK(z2.rank(0) == 2);
  CHECK(z2.rank(-1) == 1);
  CHECK(z2.rank(-2) == 1);
  CHECK(z2.label(0, {0, {1}}) == "P[1]");

  const auto id = free_on_complex(CochainComplex::from_matrices(
      -1, {FgAbGroup::cyclic(2), FgAbGroup::cyclic(2)}, {IntMatrix{{1}}}));
  CHECK(id.rank(-1) == 2);
  CHECK(id.rank(0) == 2);
  // [0] ↦ 0, [1] ↦ [1] - [0]
  CHECK(id.internal(-1).to_dense() == IntMatrix{{0, -1}, {0, 1}});

  const auto zero = free_on_complex(CochainComplex());
  for (int q = -2; q <= 0; ++q) CHECK(zero.rank(q) == 1);
  CHECK(zero.internal(-2).is_zero());

  CHECK_THROWS_AS(free_on_complex(conc(FgAbGroup::free(1), 0)), InvalidInput);
  CHECK_THROWS_AS(free_on_complex(conc(FgAbGroup::cyclic(2), 1)), InvalidInput);

  // Non-cyclic presentation: elements are canonical coordinates.
  const auto klein = free_on_complex(conc(FgAbGroup(2, IntMatrix{{2, 0}, {2, 2}}), 0));
  CHECK(klein.rank(0) == 4);
  CHECK(klein.label(0, {0, {3}}) == "P[(1,1)]");
}

TEST_CASE("differential examples") {
  const FiniteElements a(FgAbGroup::cyclic(2));
  const FormalSum d = differential(0, Generator{0, {1, 1}}, a);
  CHECK(d == FormalSum{{Generator{0, {0}}, 1}, {Generator{0, {1}}, -2}});
  for (std::size_t p = 0; p < 2; ++p) CHECK(differential(1, Generator{0, {p, p}}, a).empty());
  const FiniteElements b(FgAbGroup::cyclic(3));
  for (std::size_t p1 = 0; p1 < 3; ++p1)
    for (std::size_t p2 = 0; p2 < 3; ++p2)
      CHECK(differential(0, differential(1, Generator{0, {p1, p2}}, b), b).empty());
  CHECK_THROWS_AS(differential(0, Generator{0, {1}}, a), InvalidInput);
  CHECK_THROWS_AS(differential(0, Generator{0, {1, 2}}, a), InvalidInput);
  CHECK_THROWS_AS(differential(4, Generator{0, {1}}, a), InvalidInput);
}

TEST_CASE("symbolic expansion: composites vanish in every abelian group") {
  // L2 → L1 → L0, L3 → L2 → L1, L4 → L3 → L2 on generic tuples.
  CHECK(apply_sym(0, apply_sym(1, generic(2), false), false).empty());
  CHECK(apply_sym(0, apply_sym(1, generic(3), false), false).empty());
  for (std::size_t arity : {4, 3, 2, 1})
    CHECK(apply_sym(1, apply_sym(2, generic(arity), false), false).empty());
  CHECK(apply_sym(2, apply_sym(3, generic(5), false), false).empty());
  CHECK(apply_sym(2, apply_sym(3, generic(4), false), false).empty());
  // The swapped sign pattern on quadruples does not close up.
  CHECK_FALSE(apply_sym(2, apply_sym(3, generic(4), true), true).empty());
}

TEST_CASE("engine differentials agree with the parsed formulas") {
  for (const auto& g : {FgAbGroup::cyclic(2), FgAbGroup::cyclic(3), FgAbGroup::from_factors({2, 2}, 0)}) {
    const FiniteElements a(g);
    for (int j = 0; j <= 3; ++j) {
      const auto src = resolution_summands(j + 1);
      for (std::size_t s = 0; s < src.size(); ++s) {
        const std::size_t arity = src[s].arity;
        const Sym sym = apply_sym(j, generic(arity), false);
        for (const auto& x : all_tuples(a.size(), arity)) {
          FormalSum want;
          for (const auto& [t, c] : sym) want[evaluate(t, x, a, summand_of(j, t.size()))] += c;
          for (auto it = want.begin(); it != want.end();) it = it->second == 0 ? want.erase(it) : std::next(it);
          CHECK(differential(j, Generator{s, x}, a) == want);
        }
      }
    }
  }
}

TEST_CASE("D3 with swapped signs fails on a fixed set of generators") {
  const FiniteElements z2(FgAbGroup::cyclic(2));
  const FiniteElements z3(FgAbGroup::cyclic(3));
  CHECK(composite_failures(2, z2, D3Variant::swapped_signs).size() == 6);
  CHECK(composite_failures(2, z3, D3Variant::swapped_signs).size() == 48);
  for (const auto& g : composite_failures(2, z2, D3Variant::swapped_signs)) CHECK(g.summand == 1);
  for (int j = 0; j <= 2; ++j) {
    CHECK(composite_failures(j, z2, D3Variant::standard).empty());
    CHECK(composite_failures(j, z3, D3Variant::standard).empty());
  }
  CHECK_THROWS_AS(build_resolution(conc(FgAbGroup::cyclic(2), 0), D3Variant::swapped_signs), InternalError);
}

TEST_CASE("resolution ranks") {
  const auto r = build_resolution(conc(FgAbGroup::cyclic(2), 0));
  CHECK(r.term(0).rank(0) == 2);
  CHECK(r.term(1).rank(0) == 4);
  CHECK(r.term(2).summand_rank(0, 0) == 4);
  CHECK(r.term(2).summand_rank(0, 1) == 8);
  CHECK(r.term(3).summand_rank(0, 0) == 16);
  CHECK(r.term(3).summand_rank(0, 1) == 8);
  CHECK(r.term(3).summand_rank(0, 2) == 4);
  CHECK(r.term(3).summand_rank(0, 3) == 2);
  CHECK(r.term(4).summand_rank(0, 0) == 32);
  CHECK(r.term(4).summand_rank(0, 1) == 16);
  CHECK(r.term(4).rank(-1) == 2);
}

TEST_CASE("resolution well-formedness on the battery") {
  for (const auto& [name, p] : battery()) {
    INFO(name);
    const auto r = build_resolution(p);
    for (int j = 0; j <= 2; ++j)
      for (int q = -2; q <= 0; ++q) CHECK(r.d(j, q).multiply(r.d(j + 1, q)).is_zero());
    for (int q = -2; q <= 0; ++q) {
      const IntMatrix e = r.epsilon(q) * r.d(0, q).to_dense();
      for (std::size_t c = 0; c < e.cols(); ++c) CHECK(p.group(q).is_zero_element(e.column(c)));
    }
    for (int j = 0; j <= 3; ++j)
      for (int q = -2; q < 0; ++q)
        CHECK(r.term(j).internal(q).multiply(r.d(j, q)).to_dense() ==
              r.d(j, q + 1).multiply(r.term(j + 1).internal(q)).to_dense());
    const auto t = r.total();
    for (std::size_t k = 0; k + 1 < t.diffs.size(); ++k) CHECK(t.diffs[k + 1].multiply(t.diffs[k]).is_zero());
  }
}

TEST_CASE("partial resolution is exact in degrees 0, -1, -2") {
  for (const auto& [name, p] : battery()) {
    INFO(name);
    const auto rep = resolution_homology_check(p);
    CHECK(rep.ok());
    int asserted = 0;
    for (const auto& l : rep.lines)
      if (l.asserted) {
        ++asserted;
        CHECK(is_isomorphic(l.total, cohomology_at(p, l.degree)));
      }
    CHECK(asserted == 3);
  }
  const auto zero = resolution_homology_check(CochainComplex());
  CHECK(zero.ok());
  const auto z2 = resolution_homology_check(conc(FgAbGroup::cyclic(2), 0));
  CHECK(str(z2.lines[0].total) == "Z/2");
  CHECK(str(z2.lines[1].total) == "0");
  CHECK(str(z2.lines[2].total) == "0");
  const auto low = resolution_homology_check(conc(FgAbGroup::cyclic(2), -2));
  CHECK(str(low.lines[2].total) == "Z/2");
}

TEST_CASE("Ext through the resolution") {
  const auto z2 = conc(FgAbGroup::cyclic(2), 0);
  auto strs = [](const std::vector<FgAbGroup>& v) {
    std::vector<std::string> s;
    for (const auto& g : v) s.push_back(str(g));
    return s;
  };
  CHECK(strs(ext_via_resolution(z2, z2)) == std::vector<std::string>{"Z/2", "Z/2", "0", "0"});
  CHECK(str(ext_via_resolution(z2, conc(FgAbGroup::free(1), 0))[0]) == "Z/2");
  CHECK(strs(ext_via_resolution(z2, CochainComplex())) == std::vector<std::string>{"0", "0", "0", "0"});
  CHECK_THROWS_AS(ext_via_resolution(z2, conc(FgAbGroup::free(1), 1)), InvalidInput);

  const std::vector<CochainComplex> gs{
      conc(FgAbGroup::free(1), 0), conc(FgAbGroup::cyclic(2), 0), conc(FgAbGroup::cyclic(4), -1),
      CochainComplex::from_matrices(-2, {FgAbGroup::cyclic(2), FgAbGroup::cyclic(2), FgAbGroup::zero()},
                                    {IntMatrix{{1}}, IntMatrix(0, 1)})};
  for (const auto& [name, p] : battery()) {
    INFO(name);
    const auto r = build_resolution(p);
    for (const auto& g : gs) {
      const auto a = ext_via_resolution(r, g);
      const auto b = ext_homotopy_groups(p, g);
      for (std::size_t k = 0; k < 4; ++k) CHECK(is_isomorphic(a[k], b[k]));
    }
  }
}

TEST_CASE("Ext through the resolution on random complexes") {
  std::mt19937_64 rng(31);
  auto random_finite = [&]() {
    for (;;) {
      long m[3], c[2];
      for (auto& x : m) x = 1 + static_cast<long>(rng() % 3);
      for (auto& x : c) x = static_cast<long>(rng() % 3);
      if ((c[0] * m[0]) % m[1] != 0 || (c[1] * m[1]) % m[2] != 0 || (c[0] * c[1]) % m[2] != 0) continue;
      return CochainComplex::from_matrices(
          -2, {FgAbGroup::cyclic(m[0]), FgAbGroup::cyclic(m[1]), FgAbGroup::cyclic(m[2])},
          {IntMatrix{{c[0]}}, IntMatrix{{c[1]}}});
    }
  };
  for (int t = 0; t < 8; ++t) {
    const auto p = random_finite();
    const auto g = random_finite();
    const auto a = ext_via_resolution(p, g);
    const auto b = ext_homotopy_groups(p, g);
    // Degree 1 sees Hom(H^-3(Tot), H^-2(G)); Tot is only exact down to -2.
    const std::size_t first = cohomology_at(g, -2).is_trivial() ? 0 : 1;
    for (std::size_t k = first; k < 4; ++k) CHECK(is_isomorphic(a[k], b[k]));
    CHECK(resolution_homology_check(p).ok());
  }
}

TEST_CASE("degree 1 picks up H^-3 of the partial resolution when H^-2(G) is nonzero") {
  const auto p = conc(FgAbGroup::cyclic(2), 0);
  const auto g = conc(FgAbGroup::cyclic(3), -2);
  const auto rep = resolution_homology_check(p);
  REQUIRE(rep.lines[3].degree == -3);
  CHECK(str(rep.lines[3].total) == "Z^6");
  CHECK(str(ext_homotopy_groups(p, g)[0]) == "0");
  CHECK(str(ext_via_resolution(p, g)[0]) == "Z/3 + Z/3 + Z/3 + Z/3 + Z/3 + Z/3");
}
