// Finite posets as sites, abelian sheaves on them (functors from the poset),
// and derived global sections computed with normalized nerve cochains.
//
// Restrictions run F(x) → F(y) for x ≤ y. RΓ(F) has
//   C^n = ∏_{x0 < ... < xn} F(xn),
//   (dc)(x0..x_{n+1}) = Σ_{i≤n} (-1)^i c(..x̂i..) + (-1)^{n+1} res(c(x0..xn)).
#pragma once

#include "picard/complex.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace picard {

class PosetSite {
 public:
  /// covers: pairs (a, b) with a < b. The order is their reflexive-transitive
  /// closure; cycles are rejected.
  PosetSite(std::vector<std::string> elements,
            std::vector<std::pair<std::string, std::string>> covers)
      : elements_(std::move(elements)) {
    std::sort(elements_.begin(), elements_.end());
    if (std::adjacent_find(elements_.begin(), elements_.end()) != elements_.end())
      throw InvalidInput("site: duplicate element label");
    const std::size_t n = elements_.size();
    less_.assign(n, std::vector<char>(n, 0));
    for (const auto& [a, b] : covers) {
      const std::size_t i = index(a), j = index(b);
      if (i == j) throw InvalidInput("site: cover " + a + " < " + a + " is not strict");
      covers_.emplace_back(i, j);
      less_[i][j] = 1;
    }
    std::sort(covers_.begin(), covers_.end());
    covers_.erase(std::unique(covers_.begin(), covers_.end()), covers_.end());
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        if (less_[i][k])
          for (std::size_t j = 0; j < n; ++j)
            if (less_[k][j]) less_[i][j] = 1;
    for (std::size_t i = 0; i < n; ++i)
      if (less_[i][i]) throw InvalidInput("site: the cover relation has a cycle through " + elements_[i]);
  }

  static PosetSite point() { return PosetSite({"*"}, {}); }

  std::size_t size() const { return elements_.size(); }
  const std::vector<std::string>& elements() const { return elements_; }
  const std::string& label(std::size_t i) const { return elements_[i]; }
  std::size_t index(const std::string& label) const {
    auto it = std::lower_bound(elements_.begin(), elements_.end(), label);
    if (it == elements_.end() || *it != label) throw InvalidInput("site: unknown element " + label);
    return static_cast<std::size_t>(it - elements_.begin());
  }
  /// Strict order.
  bool less(std::size_t i, std::size_t j) const { return less_[i][j] != 0; }
  const std::vector<std::pair<std::size_t, std::size_t>>& covers() const { return covers_; }

  /// Strict chains of length n+1 in lexicographic order of labels.
  std::vector<std::vector<std::size_t>> chains(std::size_t n) const {
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> cur;
    extend(cur, n + 1, out);
    return out;
  }
  std::size_t longest_chain() const {
    std::size_t n = 0;
    while (!chains(n + 1).empty()) ++n;
    return n;
  }

  friend bool operator==(const PosetSite& a, const PosetSite& b) {
    return a.elements_ == b.elements_ && a.less_ == b.less_;
  }

 private:
  void extend(std::vector<std::size_t>& cur, std::size_t len,
              std::vector<std::vector<std::size_t>>& out) const {
    if (cur.size() == len) {
      out.push_back(cur);
      return;
    }
    for (std::size_t i = 0; i < elements_.size(); ++i) {
      if (!cur.empty() && !less(cur.back(), i)) continue;
      cur.push_back(i);
      extend(cur, len, out);
      cur.pop_back();
    }
  }

  std::vector<std::string> elements_;
  std::vector<std::vector<char>> less_;
  std::vector<std::pair<std::size_t, std::size_t>> covers_;
};

/// Functor from the poset to abelian groups, given on the covers.
class PosetSheaf {
 public:
  /// cover_maps[k] belongs to site.covers()[k].
  PosetSheaf(PosetSite site, std::vector<FgAbGroup> stalks, std::vector<IntMatrix> cover_maps)
      : site_(std::move(site)), stalks_(std::move(stalks)) {
    const std::size_t n = site_.size();
    if (stalks_.size() != n) throw InvalidInput("sheaf: one stalk per site element required");
    if (cover_maps.size() != site_.covers().size())
      throw InvalidInput("sheaf: one restriction per cover required");
    res_.assign(n, std::vector<IntMatrix>(n));
    std::vector<std::vector<char>> known(n, std::vector<char>(n, 0));
    for (std::size_t i = 0; i < n; ++i) {
      res_[i][i] = IntMatrix::identity(stalks_[i].n_gens());
      known[i][i] = 1;
    }
    for (std::size_t k = 0; k < cover_maps.size(); ++k) {
      const auto [a, b] = site_.covers()[k];
      try {
        GroupHom(stalks_[a], stalks_[b], cover_maps[k]);
      } catch (const InvalidInput& e) {
        throw InvalidInput("sheaf: restriction " + site_.label(a) + " -> " + site_.label(b) +
                           ": " + e.what());
      }
      res_[a][b] = cover_maps[k];
      known[a][b] = 1;
    }
    // Compose along covers; every route between two elements must agree.
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& [a, b] : site_.covers())
        for (std::size_t y = 0; y < n; ++y) {
          if (!known[b][y] || b == y) continue;
          const IntMatrix m = res_[b][y] * res_[a][b];
          if (!known[a][y]) {
            res_[a][y] = m;
            known[a][y] = 1;
            changed = true;
          } else if (!GroupHom(stalks_[a], stalks_[y], res_[a][y] - m).is_zero()) {
            throw InvalidInput("sheaf: restrictions from " + site_.label(a) + " to " +
                               site_.label(y) + " differ along two routes");
          }
        }
    }
  }

  static PosetSheaf constant(const PosetSite& site, const FgAbGroup& g) {
    std::vector<FgAbGroup> stalks(site.size(), g);
    std::vector<IntMatrix> maps(site.covers().size(), IntMatrix::identity(g.n_gens()));
    return PosetSheaf(site, std::move(stalks), std::move(maps));
  }

  const PosetSite& site() const { return site_; }
  const FgAbGroup& stalk(std::size_t x) const { return stalks_[x]; }
  /// F(x) → F(y) for x ≤ y.
  const IntMatrix& res(std::size_t x, std::size_t y) const {
    if (x != y && !site_.less(x, y)) throw InvalidInput("sheaf: restriction along a non-relation");
    return res_[x][y];
  }

 private:
  PosetSite site_;
  std::vector<FgAbGroup> stalks_;
  std::vector<std::vector<IntMatrix>> res_;
};

/// Bounded complex of sheaves with stalkwise differentials.
class SheafComplex {
 public:
  /// diffs[k][x] : sheaves[k](x) → sheaves[k+1](x).
  SheafComplex(int lo, std::vector<PosetSheaf> sheaves, std::vector<std::vector<IntMatrix>> diffs)
      : lo_(lo), sheaves_(std::move(sheaves)), diffs_(std::move(diffs)) {
    if (sheaves_.empty()) throw InvalidInput("sheaf complex needs at least one degree");
    if (diffs_.size() + 1 != sheaves_.size())
      throw InvalidInput("sheaf complex: differential count does not match degree count");
    const PosetSite& s = sheaves_[0].site();
    for (const auto& f : sheaves_)
      if (!(f.site() == s)) throw InvalidInput("sheaf complex: sheaves live on different sites");
    for (std::size_t k = 0; k < diffs_.size(); ++k) {
      const int n = lo_ + static_cast<int>(k);
      if (diffs_[k].size() != s.size())
        throw InvalidInput("sheaf complex: d^" + std::to_string(n) + " needs one matrix per element");
      for (std::size_t x = 0; x < s.size(); ++x)
        GroupHom(sheaves_[k].stalk(x), sheaves_[k + 1].stalk(x), diffs_[k][x]);
      for (const auto& [a, b] : s.covers()) {
        const IntMatrix lhs = diffs_[k][b] * sheaves_[k].res(a, b);
        const IntMatrix rhs = sheaves_[k + 1].res(a, b) * diffs_[k][a];
        if (!GroupHom(sheaves_[k].stalk(a), sheaves_[k + 1].stalk(b), lhs - rhs).is_zero())
          throw InvalidInput("sheaf complex: d^" + std::to_string(n) +
                             " does not commute with restriction " + s.label(a) + " -> " +
                             s.label(b));
      }
    }
    for (std::size_t x = 0; x < s.size(); ++x) (void)stalk_complex(x);
  }

  /// The complex K^lo → ... placed at a single element x.
  CochainComplex stalk_complex(std::size_t x) const {
    std::vector<FgAbGroup> g;
    std::vector<IntMatrix> d;
    for (const auto& f : sheaves_) g.push_back(f.stalk(x));
    for (const auto& m : diffs_) d.push_back(m[x]);
    return CochainComplex::from_matrices(lo_, std::move(g), d);
  }

  static SheafComplex concentrated(const PosetSheaf& f, int degree) {
    return SheafComplex(degree, {f}, {});
  }

  const PosetSite& site() const { return sheaves_[0].site(); }
  int lo() const { return lo_; }
  int hi() const { return lo_ + static_cast<int>(sheaves_.size()) - 1; }
  const PosetSheaf& sheaf(int n) const { return sheaves_.at(static_cast<std::size_t>(n - lo_)); }
  const IntMatrix& diff(int n, std::size_t x) const {
    return diffs_.at(static_cast<std::size_t>(n - lo_))[x];
  }

  /// K[i] with (-1)^i on the differentials.
  SheafComplex shifted(int i) const {
    auto d = diffs_;
    if (i % 2 != 0)
      for (auto& per : d)
        for (auto& m : per) m = -m;
    return SheafComplex(lo_ - i, sheaves_, std::move(d));
  }

 private:
  int lo_;
  std::vector<PosetSheaf> sheaves_;
  std::vector<std::vector<IntMatrix>> diffs_;
};

namespace detail {

struct NerveLayout {
  std::vector<std::vector<std::vector<std::size_t>>> chains;  // by degree
  std::vector<std::vector<std::size_t>> offsets;              // by degree, per chain
};

inline NerveLayout nerve_layout(const PosetSite& site, const std::vector<std::size_t>& rank) {
  NerveLayout l;
  for (std::size_t n = 0;; ++n) {
    auto c = site.chains(n);
    if (c.empty()) break;
    std::vector<std::size_t> off;
    std::size_t o = 0;
    for (const auto& ch : c) {
      off.push_back(o);
      o += rank[ch.back()];
    }
    l.chains.push_back(std::move(c));
    l.offsets.push_back(std::move(off));
  }
  return l;
}

inline FgAbGroup nerve_group(const PosetSheaf& f, const NerveLayout& l, std::size_t n) {
  FgAbGroup g;
  for (const auto& ch : l.chains[n]) g = direct_sum(g, f.stalk(ch.back()));
  return g;
}

inline std::size_t chain_index(const std::vector<std::vector<std::size_t>>& chains,
                               const std::vector<std::size_t>& c) {
  auto it = std::lower_bound(chains.begin(), chains.end(), c);
  if (it == chains.end() || *it != c) throw InternalError("nerve: face is not a chain");
  return static_cast<std::size_t>(it - chains.begin());
}

inline IntMatrix nerve_differential(const PosetSheaf& f, const NerveLayout& l, std::size_t n,
                                    std::size_t rows, std::size_t cols) {
  IntMatrix d(rows, cols);
  const auto& up = l.chains[n + 1];
  for (std::size_t t = 0; t < up.size(); ++t) {
    const auto& ch = up[t];
    const std::size_t row = l.offsets[n + 1][t];
    for (std::size_t i = 0; i <= n + 1; ++i) {
      std::vector<std::size_t> face = ch;
      face.erase(face.begin() + static_cast<std::ptrdiff_t>(i));
      const std::size_t s = chain_index(l.chains[n], face);
      const std::size_t col = l.offsets[n][s];
      const Integer sign = (i % 2 == 0) ? 1 : -1;
      IntMatrix block = i <= n ? IntMatrix::identity(f.stalk(ch.back()).n_gens())
                               : f.res(face.back(), ch.back());
      const IntMatrix cur = d.block(row, block.rows(), col, block.cols());
      d.set_block(row, col, cur + sign * block);
    }
  }
  return d;
}

inline std::vector<std::size_t> ranks_of(const PosetSheaf& f) {
  std::vector<std::size_t> r;
  for (std::size_t x = 0; x < f.site().size(); ++x) r.push_back(f.stalk(x).n_gens());
  return r;
}

}  // namespace detail

/// RΓ(F) as normalized nerve cochains, in degrees 0..longest chain.
inline CochainComplex nerve_rgamma(const PosetSheaf& f) {
  const auto l = detail::nerve_layout(f.site(), detail::ranks_of(f));
  std::vector<FgAbGroup> groups;
  for (std::size_t n = 0; n < l.chains.size(); ++n) groups.push_back(detail::nerve_group(f, l, n));
  std::vector<IntMatrix> diffs;
  for (std::size_t n = 0; n + 1 < l.chains.size(); ++n)
    diffs.push_back(detail::nerve_differential(f, l, n, groups[n + 1].n_gens(), groups[n].n_gens()));
  return CochainComplex::from_matrices(0, std::move(groups), diffs);
}

/// Γ(F) = H^0(RΓ(F)).
inline FgAbGroup global_sections(const PosetSheaf& f) { return cohomology_at(nerve_rgamma(f), 0); }

/// Bicomplex with column p = nerve degree, row q = complex degree.
inline DoubleComplex hyper_bicomplex(const SheafComplex& k) {
  const PosetSite& site = k.site();
  const std::size_t depth = site.longest_chain();
  DoubleComplex dc(0, static_cast<int>(depth), k.lo(), k.hi());
  std::vector<detail::NerveLayout> layouts;
  std::vector<std::vector<FgAbGroup>> groups;
  for (int q = k.lo(); q <= k.hi(); ++q) {
    layouts.push_back(detail::nerve_layout(site, detail::ranks_of(k.sheaf(q))));
    std::vector<FgAbGroup> g;
    for (std::size_t p = 0; p <= depth; ++p) g.push_back(detail::nerve_group(k.sheaf(q), layouts.back(), p));
    groups.push_back(std::move(g));
  }
  for (int q = k.lo(); q <= k.hi(); ++q) {
    const std::size_t qi = static_cast<std::size_t>(q - k.lo());
    const auto& l = layouts[qi];
    for (std::size_t p = 0; p <= depth; ++p) {
      dc.set_group(static_cast<int>(p), q, groups[qi][p]);
      if (p < depth)
        dc.set_horizontal(static_cast<int>(p), q,
                          detail::nerve_differential(k.sheaf(q), l, p, groups[qi][p + 1].n_gens(),
                                                     groups[qi][p].n_gens()));
      if (q < k.hi()) {
        const auto& l2 = layouts[qi + 1];
        IntMatrix v(groups[qi + 1][p].n_gens(), groups[qi][p].n_gens());
        for (std::size_t t = 0; t < l.chains[p].size(); ++t)
          v.set_block(l2.offsets[p][t], l.offsets[p][t], k.diff(q, l.chains[p][t].back()));
        dc.set_vertical(static_cast<int>(p), q, std::move(v));
      }
    }
  }
  return dc;
}

inline CochainComplex hyper_rgamma(const SheafComplex& k) { return total_complex(hyper_bicomplex(k)); }

inline void require_length_three(const SheafComplex& k) {
  if (k.lo() < -2 || k.hi() > 0)
    throw InvalidInput("sheaf complex must live in degrees -2..0, got " + std::to_string(k.lo()) +
                       ".." + std::to_string(k.hi()));
}

/// Tors^i(G) = H^i(RΓ(G)) for i = 1, 0, -1, -2.
inline std::vector<FgAbGroup> tors_groups(const SheafComplex& g) {
  require_length_three(g);
  const CochainComplex r = hyper_rgamma(g);
  return {cohomology_at(r, 1), cohomology_at(r, 0), cohomology_at(r, -1), cohomology_at(r, -2)};
}

/// Classes of torsors: H^1(RΓ(G)) with its group law on cocycles.
class TorsorClasses {
 public:
  explicit TorsorClasses(const SheafComplex& g)
      : rgamma_(hyper_rgamma(g)), h1_(std::make_shared<Cohomology>(rgamma_, 1)) {
    require_length_three(g);
  }

  const FgAbGroup& group() const { return h1_->group(); }
  const CochainComplex& rgamma() const { return rgamma_; }
  std::size_t cochain_size() const { return rgamma_.group(1).n_gens(); }

  IntVector cocycle(const IntVector& coords) const { return h1_->representative(coords); }
  IntVector class_of(const IntVector& cocycle) const { return h1_->class_of(cocycle); }

  /// Contracted product of torsors.
  IntVector add(const IntVector& a, const IntVector& b) const {
    require_cocycle(a);
    require_cocycle(b);
    return picard::add(a, b);
  }
  IntVector neg(const IntVector& a) const {
    require_cocycle(a);
    return scale(-1, a);
  }
  /// The torsor admits a global section.
  bool is_trivial(const IntVector& a) const {
    require_cocycle(a);
    return h1_->is_coboundary(a);
  }

 private:
  void require_cocycle(const IntVector& a) const {
    if (a.size() != cochain_size()) throw InvalidInput("torsor class lives on a different site or G");
    if (!h1_->is_cocycle(a)) throw InvalidInput("torsor class is not a cocycle");
  }

  CochainComplex rgamma_;
  std::shared_ptr<Cohomology> h1_;
};

/// Natural transformations A → B between sheaves on the same site.
inline FgAbGroup sheaf_hom(const PosetSheaf& a, const PosetSheaf& b) {
  const PosetSite& site = a.site();
  if (!(b.site() == site)) throw InvalidInput("sheaf_hom: sheaves live on different sites");
  std::vector<HomGroup> local;
  std::vector<std::size_t> offset;
  std::size_t total = 0;
  FgAbGroup container;
  for (std::size_t x = 0; x < site.size(); ++x) {
    local.push_back(hom_group(a.stalk(x), b.stalk(x)));
    offset.push_back(total);
    total += local.back().group.n_gens();
    container = direct_sum(container, local.back().group);
  }
  // Compatibility on each cover x < y: res^B φ_x - φ_y res^A = 0, written as
  // the entries of a matrix A(x) → B(y) modulo the relations of B(y).
  std::vector<IntMatrix> blocks;
  std::size_t rows = 0;
  std::size_t slack = 0;
  for (const auto& [x, y] : site.covers()) {
    rows += b.stalk(y).n_gens() * a.stalk(x).n_gens();
    slack += b.stalk(y).relations().rows() * a.stalk(x).n_gens();
  }
  IntMatrix m(rows, total + slack);
  std::size_t r0 = 0, s0 = total;
  for (const auto& [x, y] : site.covers()) {
    const std::size_t bx = b.stalk(y).n_gens(), ax = a.stalk(x).n_gens();
    auto put = [&](const IntMatrix& mat, std::size_t col, const Integer& sign) {
      for (std::size_t c = 0; c < ax; ++c)
        for (std::size_t r = 0; r < bx; ++r) m(r0 + c * bx + r, col) += sign * mat(r, c);
    };
    for (std::size_t k = 0; k < local[x].generator_matrices.size(); ++k)
      put(b.res(x, y) * local[x].generator_matrices[k], offset[x] + k, 1);
    for (std::size_t k = 0; k < local[y].generator_matrices.size(); ++k)
      put(local[y].generator_matrices[k] * a.res(x, y), offset[y] + k, -1);
    const IntMatrix rel = b.stalk(y).relation_lattice();
    for (std::size_t c = 0; c < ax; ++c)
      for (std::size_t j = 0; j < rel.cols(); ++j) {
        for (std::size_t r = 0; r < bx; ++r) m(r0 + c * bx + r, s0) = rel(r, j);
        ++s0;
      }
    r0 += bx * ax;
  }
  const IntMatrix ker = kernel_basis(m);
  return subquotient(container, ker.block(0, total, 0, ker.cols()), IntMatrix(total, 0));
}

struct UnitCheckLine {
  std::string name;
  FgAbGroup hom_from_unit;
  FgAbGroup sections;
  bool agree;
};

/// Hom(Z, F) against Γ(F) for a fixed battery of sites and sheaves.
inline std::vector<UnitCheckLine> unit_check() {
  const PosetSite point = PosetSite::point();
  const PosetSite circle({"a", "b", "c", "d"}, {{"a", "c"}, {"a", "d"}, {"b", "c"}, {"b", "d"}});
  const PosetSite antichain({"x", "y"}, {});
  const PosetSite chain({"a", "b"}, {{"a", "b"}});
  const PosetSite vee({"a", "b", "c"}, {{"a", "b"}, {"a", "c"}});
  std::vector<std::pair<std::string, PosetSheaf>> battery;
  battery.emplace_back("point, Z/6", PosetSheaf::constant(point, FgAbGroup::cyclic(6)));
  battery.emplace_back("point, Z + Z/2",
                       PosetSheaf::constant(point, FgAbGroup::from_factors({2}, 1)));
  battery.emplace_back("pseudo-circle, constant Z/4",
                       PosetSheaf::constant(circle, FgAbGroup::cyclic(4)));
  battery.emplace_back("pseudo-circle, constant Z", PosetSheaf::constant(circle, FgAbGroup::free(1)));
  battery.emplace_back("antichain, stalks Z and Z/2",
                       PosetSheaf(antichain, {FgAbGroup::free(1), FgAbGroup::cyclic(2)}, {}));
  battery.emplace_back("chain a<b, Z --x2--> Z",
                       PosetSheaf(chain, {FgAbGroup::free(1), FgAbGroup::free(1)}, {IntMatrix{{2}}}));
  battery.emplace_back("chain a<b, Z/4 --> Z/2",
                       PosetSheaf(chain, {FgAbGroup::cyclic(4), FgAbGroup::cyclic(2)}, {IntMatrix{{1}}}));
  battery.emplace_back("vee, Z --> Z/2, Z/3",
                       PosetSheaf(vee, {FgAbGroup::free(1), FgAbGroup::cyclic(2), FgAbGroup::cyclic(3)},
                                  {IntMatrix{{1}}, IntMatrix{{1}}}));
  std::vector<UnitCheckLine> out;
  for (const auto& [name, f] : battery) {
    const FgAbGroup h = sheaf_hom(PosetSheaf::constant(f.site(), FgAbGroup::free(1)), f);
    const FgAbGroup g = global_sections(f);
    out.push_back({name, h, g, is_isomorphic(h, g)});
  }
  return out;
}

}  // namespace picard
