#include <catch_amalgamated.hpp>

#include "picard/derived.hpp"
#include "random_complexes.hpp"

#include <numeric>
#include <random>
#include <thread>

using namespace picard;

namespace {

CochainComplex at(const FgAbGroup& g, int n) { return CochainComplex::concentrated(g, n); }
std::string str(const FgAbGroup& g) { return canonical_form(g).to_string(); }

/// Random length-3 model in degrees -2..0.
CochainComplex model(std::mt19937_64& rng) { return testing::random_complex(rng, -2, 0); }

}  // namespace

TEST_CASE("free replacement of a free complex is itself") {
  std::mt19937_64 rng(1);
  const auto k = testing::random_free_complex(rng, -2, 0);
  const auto fr = free_replacement(k);
  CHECK(fr.complex == k);
  for (int n = -2; n <= 0; ++n)
    CHECK(fr.quasi_iso.component(n).matrix() == IntMatrix::identity(k.group(n).n_gens()));
}

TEST_CASE("free replacement of Z/2 is the two-term resolution") {
  const auto fr = free_replacement(at(FgAbGroup::cyclic(2), 0));
  CHECK(fr.complex.lo() == -1);
  CHECK(fr.complex.hi() == 0);
  CHECK(fr.complex.diff(-1).matrix() == IntMatrix{{2}});
  CHECK(fr.complex.is_free());
}

TEST_CASE("free replacement is a degreewise surjective quasi-isomorphism") {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 40; ++t) {
    const auto k = model(rng);
    const auto fr = free_replacement(k);
    REQUIRE(fr.complex.is_free());
    CHECK(fr.complex.lo() >= k.lo() - 1);
    CHECK(is_acyclic(cone(fr.quasi_iso)));
    for (int n = k.lo() - 1; n <= 0; ++n)
      CHECK(is_isomorphic(cohomology_at(fr.complex, n), cohomology_at(k, n)));
  }
}

TEST_CASE("free replacement memo is deterministic under concurrent use") {
  std::mt19937_64 rng(3);
  std::vector<CochainComplex> ks;
  for (int t = 0; t < 6; ++t) ks.push_back(model(rng));
  std::vector<std::vector<std::string>> seen(4);
  std::vector<std::thread> threads;
  for (int w = 0; w < 4; ++w)
    threads.emplace_back([&, w] {
      for (const auto& k : ks) seen[static_cast<std::size_t>(w)].push_back(fingerprint(free_replacement(k).complex));
    });
  for (auto& th : threads) th.join();
  for (int w = 1; w < 4; ++w) CHECK(seen[static_cast<std::size_t>(w)] == seen[0]);
  for (std::size_t i = 0; i < ks.size(); ++i)
    CHECK(fingerprint(detail::build_free_replacement(ks[i]).complex) == seen[0][i]);
}

TEST_CASE("rhom and ext examples") {
  const auto z = at(FgAbGroup::free(1), 0);
  const auto z2 = at(FgAbGroup::cyclic(2), 0);
  std::mt19937_64 rng(4);
  for (int t = 0; t < 10; ++t) {
    const auto g = model(rng);
    for (int i = -3; i <= 1; ++i) CHECK(is_isomorphic(cohomology_at(rhom(z, g), i), cohomology_at(g, i)));
  }
  CHECK(str(cohomology_at(rhom(z2, z2), 0)) == "Z/2");
  CHECK(str(cohomology_at(rhom(z2, z2), 1)) == "Z/2");
  CHECK(str(ext_group(z, z, 0)) == "Z");
  CHECK(str(ext_group(z2, z2, 1)) == "Z/2");
}

TEST_CASE("classical Ext of cyclic groups") {
  for (long m = 1; m <= 12; ++m)
    for (long n = 1; n <= 12; ++n) {
      const auto p = at(FgAbGroup::cyclic(m), 0), g = at(FgAbGroup::cyclic(n), 0);
      const std::string expect = str(FgAbGroup::cyclic(std::gcd(m, n)));
      CHECK(str(ext_group(p, g, 1)) == expect);
      CHECK(str(ext_group(p, g, 0)) == expect);
    }
}

TEST_CASE("ext is invariant under quasi-isomorphic replacement of P") {
  std::mt19937_64 rng(5);
  const auto acyclic = CochainComplex::from_matrices(
      -1, {FgAbGroup::free(1), FgAbGroup::free(1)}, {IntMatrix{{1}}});
  for (int t = 0; t < 15; ++t) {
    const auto p = model(rng), g = model(rng);
    const auto p2 = direct_sum(p, acyclic);
    const auto p3 = free_replacement(p).complex;
    for (int i = -3; i <= 2; ++i) {
      CHECK(is_isomorphic(ext_group(p, g, i), ext_group(p2, g, i)));
      CHECK(is_isomorphic(ext_group(p, g, i), ext_group(p3, g, i)));
    }
  }
}

TEST_CASE("ext vanishes outside -2..3 for length-3 models and is additive") {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 15; ++t) {
    const auto p = model(rng), p2 = model(rng), g = model(rng);
    for (int i : {-5, -4, -3, 4, 5}) CHECK(ext_group(p, g, i).is_trivial());
    for (int i = -2; i <= 1; ++i)
      CHECK(is_isomorphic(ext_group(direct_sum(p, p2), g, i),
                          direct_sum(ext_group(p, g, i), ext_group(p2, g, i))));
  }
}

TEST_CASE("ext above degree 1 survives when P sits low and G high") {
  const auto p = at(FgAbGroup::cyclic(2), -2), g = at(FgAbGroup::cyclic(2), 0);
  CHECK(str(ext_group(p, g, 2)) == "Z/2");
  CHECK(str(ext_group(p, g, 3)) == "Z/2");
  CHECK(ext_group(p, g, 1).is_trivial());
}

TEST_CASE("ext of a free complex is the cohomology of the Hom complex") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 10; ++t) {
    const auto q = testing::random_free_complex(rng, -2, 0), g = model(rng);
    for (int i = -2; i <= 1; ++i)
      CHECK(is_isomorphic(ext_group(q, g, i), cohomology_at(hom_complex(q, g), i)));
  }
}

TEST_CASE("hom_2picard and homotopy groups") {
  const auto z = at(FgAbGroup::free(1), 0);
  const auto z2 = at(FgAbGroup::cyclic(2), 0);
  std::mt19937_64 rng(8);
  for (int t = 0; t < 10; ++t) {
    const auto g = model(rng);
    const auto h = hom_2picard(z, g);
    for (int i = -2; i <= 0; ++i) CHECK(is_isomorphic(cohomology_at(h, i), cohomology_at(g, i)));
    const auto p = model(rng);
    const auto hp = hom_2picard(p, g);
    for (int i = -2; i <= 0; ++i) CHECK(is_isomorphic(cohomology_at(hp, i), ext_group(p, g, i)));
    CHECK(cohomology_at(hp, 1).is_trivial());
  }
  const auto h = hom_2picard(z2, z2);
  CHECK(str(cohomology_at(h, 0)) == "Z/2");
  CHECK(cohomology_at(h, -1).is_trivial());
  CHECK(cohomology_at(h, -2).is_trivial());
  CHECK_THROWS_AS(hom_2picard(at(FgAbGroup::free(1), 1), z), InvalidInput);

  const auto pi = homotopy_groups(at(FgAbGroup::cyclic(4), 0));
  CHECK(str(pi.pi0) == "Z/4");
  CHECK(pi.pi1.is_trivial());
  CHECK(pi.pi2.is_trivial());
  const auto two = CochainComplex::from_matrices(
      -2, {FgAbGroup::free(1), FgAbGroup::free(1), FgAbGroup::zero()},
      {IntMatrix{{2}}, IntMatrix(0, 1)});
  const auto pt = homotopy_groups(two);
  CHECK(pt.pi0.is_trivial());
  CHECK(str(pt.pi1) == "Z/2");
  CHECK(pt.pi2.is_trivial());
  for (int t = 0; t < 10; ++t) {
    const auto a = model(rng), b = model(rng);
    const auto s = homotopy_groups(direct_sum(a, b));
    const auto ha = homotopy_groups(a), hb = homotopy_groups(b);
    CHECK(is_isomorphic(s.pi0, direct_sum(ha.pi0, hb.pi0)));
    CHECK(is_isomorphic(s.pi1, direct_sum(ha.pi1, hb.pi1)));
    CHECK(is_isomorphic(s.pi2, direct_sum(ha.pi2, hb.pi2)));
  }
}

TEST_CASE("ext homotopy groups examples") {
  const auto z = at(FgAbGroup::free(1), 0);
  const auto z2 = at(FgAbGroup::cyclic(2), 0);
  auto strs = [](const std::vector<FgAbGroup>& v) {
    std::vector<std::string> s;
    for (const auto& g : v) s.push_back(str(g));
    return s;
  };
  CHECK(strs(ext_homotopy_groups(z, z)) == std::vector<std::string>{"0", "Z", "0", "0"});
  // Ext^i(Z/2, Z/2[2]) = Ext^{i+2}_Z(Z/2, Z/2): Hom at i = -2, Ext^1 at i = -1.
  CHECK(strs(ext_homotopy_groups(z2, at(FgAbGroup::cyclic(2), -2))) ==
        std::vector<std::string>{"0", "0", "Z/2", "Z/2"});
  CHECK(strs(ext_homotopy_groups(z2, z2)) == std::vector<std::string>{"Z/2", "Z/2", "0", "0"});
}

TEST_CASE("realize and classify the nonsplit extension of Z/2 by Z/2") {
  const auto z2 = at(FgAbGroup::cyclic(2), 0);
  const ExtGroup ext(z2, z2);
  REQUIRE(str(ext.group()) == "Z/2");
  const IntVector gen = ext.cocycle({1});
  const Extension x = realize_extension(ext, gen);
  CHECK(str(cohomology_at(x.e, 0)) == "Z/4");
  CHECK_FALSE(splits_in_cohomology(x));
  CHECK(ext.same_class(classify_extension(ext, x), gen));

  const IntVector zero(ext.cochain_size(), Integer(0));
  const Extension s = realize_extension(ext, zero);
  CHECK(splits_in_cohomology(s));
  CHECK(ext.group().is_zero_element(ext.class_of(classify_extension(ext, s))));
}

TEST_CASE("a hand-built Z/4 extension classifies to the generator") {
  const auto z2 = at(FgAbGroup::cyclic(2), 0);
  const auto z4 = at(FgAbGroup::cyclic(4), 0);
  const ChainMap i(z2, z4, 0, {IntMatrix{{2}}});
  const ChainMap j(z4, z2, 0, {IntMatrix{{1}}});
  const ExtGroup ext(z2, z2);
  const IntVector c = classify_extension(ext, {z4, i, j});
  CHECK_FALSE(ext.group().is_zero_element(ext.class_of(c)));
  // the split extension Z/2 + Z/2
  const auto s = at(direct_sum(FgAbGroup::cyclic(2), FgAbGroup::cyclic(2)), 0);
  const ChainMap si(z2, s, 0, {IntMatrix{{1}, {0}}});
  const ChainMap sj(s, z2, 0, {IntMatrix{{0, 1}}});
  CHECK(ext.group().is_zero_element(ext.class_of(classify_extension(ext, {s, si, sj}))));
  // a non-surjective j is rejected
  const ChainMap bad(z4, z2, 0, {IntMatrix{{2}}});
  CHECK_THROWS_AS(classify_extension(ext, {z4, i, bad}), InvalidInput);
}

TEST_CASE("realize and classify round trip on random classes") {
  std::mt19937_64 rng(9);
  int nonzero = 0;
  for (int t = 0; t < 25; ++t) {
    const auto p = model(rng), g = model(rng);
    const ExtGroup ext(p, g);
    IntVector coords;
    for (std::size_t k = 0; k < ext.group().n_gens(); ++k)
      coords.push_back(static_cast<long>(rng() % 5) - 2);
    const IntVector xi = ext.cocycle(coords);
    const Extension x = realize_extension(ext, xi);
    CHECK(x.e.lo() >= -2);
    CHECK(x.e.hi() <= 0);
    const IntVector back = classify_extension(ext, x);
    CHECK(ext.same_class(back, xi));
    const bool zero = ext.group().is_zero_element(ext.class_of(xi));
    if (!zero) ++nonzero;
    CHECK(splits_in_cohomology(x) == zero);
    // H^0(j) surjective, H^-2(i) injective
    const Cohomology he0(x.e, 0), hp0(p, 0), hg2(g, -2), he2(x.e, -2);
    const GroupHom j0 = induced_map(x.j, he0, hp0);
    CHECK(is_exact_at(j0, GroupHom::zero(hp0.group(), FgAbGroup::zero())));
    const GroupHom i2 = induced_map(x.i, hg2, he2);
    CHECK(kernel_subgroup(i2).group.is_trivial());
  }
  CHECK(nonzero > 0);
}

TEST_CASE("classify is additive under sums of classes") {
  std::mt19937_64 rng(10);
  for (int t = 0; t < 10; ++t) {
    const auto p = model(rng), g = model(rng);
    const ExtGroup ext(p, g);
    auto random_class = [&] {
      IntVector c;
      for (std::size_t k = 0; k < ext.group().n_gens(); ++k) c.push_back(static_cast<long>(rng() % 3) - 1);
      return ext.cocycle(c);
    };
    const IntVector a = random_class(), b = random_class();
    const IntVector ca = classify_extension(ext, realize_extension(ext, a));
    const IntVector cb = classify_extension(ext, realize_extension(ext, b));
    const IntVector cab = classify_extension(ext, realize_extension(ext, baer_sum(a, b)));
    CHECK(ext.same_class(cab, baer_sum(ca, cb)));
  }
}

TEST_CASE("pullback and pushout functoriality") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 10; ++t) {
    const auto p = model(rng), g = model(rng);
    const ExtGroup ext(p, g);
    IntVector coords;
    for (std::size_t k = 0; k < ext.group().n_gens(); ++k) coords.push_back(static_cast<long>(rng() % 3));
    const IntVector xi = ext.cocycle(coords);

    CHECK(ext.same_class(pullback_class(ChainMap::identity(p), ext, xi, ext), xi));
    CHECK(ext.same_class(pushout_class(ChainMap::identity(g), ext, xi, ext), xi));
    const IntVector killed = pushout_class(ChainMap::zero(g, g), ext, xi, ext);
    CHECK(ext.group().is_zero_element(ext.class_of(killed)));

    // (f ∘ f')^* = f'^* ∘ f^* with f = a·id, f' = b·id
    const long a = static_cast<long>(rng() % 4) - 1, b = static_cast<long>(rng() % 4) - 1;
    auto scalar = [&](const CochainComplex& k, long c) {
      std::vector<IntMatrix> comps;
      for (const auto& grp : k.groups()) comps.push_back(IntMatrix::scalar(grp.n_gens(), c));
      return ChainMap(k, k, k.lo(), comps);
    };
    const ChainMap f = scalar(p, a), f2 = scalar(p, b);
    const IntVector lhs = pullback_class(compose(f, f2), ext, xi, ext);
    const IntVector rhs = pullback_class(f2, ext, pullback_class(f, ext, xi, ext), ext);
    CHECK(ext.same_class(lhs, rhs));
    CHECK(ext.same_class(lhs, scale(a * b, xi)));

    // Pulling back along a projection P ⊕ A → P, then restricting along the
    // inclusion, gives the class back.
    const auto extra = model(rng);
    const auto pa = direct_sum(p, extra);
    std::vector<IntMatrix> proj, inc;
    for (int n = -2; n <= 0; ++n) {
      IntMatrix m(p.group(n).n_gens(), pa.group(n).n_gens());
      m.set_block(0, 0, IntMatrix::identity(p.group(n).n_gens()));
      proj.push_back(m);
      inc.push_back(m.transpose());
    }
    const ChainMap pr(pa, p, -2, proj), in(p, pa, -2, inc);
    const ExtGroup ext_pa(pa, g);
    const IntVector up = pullback_class(pr, ext, xi, ext_pa);
    CHECK(ext.same_class(pullback_class(in, ext_pa, up, ext), xi));
    CHECK(ext.same_class(pullback_class(compose(pr, in), ext, xi, ext), xi));
  }
}
