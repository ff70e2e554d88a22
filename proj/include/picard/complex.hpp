// Bounded cochain complexes of finitely generated abelian groups.
//
// Sign conventions:
//   shift        (K[i])^n = K^{n+i},  d_{K[i]} = (-1)^i d_K
//   cone         Cone(f)^n = K^{n+1} ⊕ L^n,  d(x, y) = (-d_K x, f x + d_L y)
//   Hom complex  Hom^n = ⊕_{q-p=n} Hom(K^p, L^q),  dφ = d_L φ - (-1)^n φ d_K
//   totalization d = d_h + (-1)^p d_v on the summand in column p
#pragma once

#include "picard/group.hpp"
#include "picard/sparse.hpp"

#include <map>
#include <optional>
#include <vector>

namespace picard {

class CochainComplex {
 public:
  /// The zero complex.
  CochainComplex() = default;

  /// groups[k] sits in degree lo + k; diffs[k] : groups[k] → groups[k+1].
  /// Checks d∘d = 0.
  CochainComplex(int lo, std::vector<FgAbGroup> groups, std::vector<GroupHom> diffs)
      : lo_(lo), groups_(std::move(groups)), diffs_(std::move(diffs)) {
    if (groups_.empty()) {
      if (!diffs_.empty()) throw InvalidInput("differentials given for an empty complex");
      lo_ = 0;
      return;
    }
    if (diffs_.size() + 1 != groups_.size())
      throw InvalidInput("a complex with " + std::to_string(groups_.size()) +
                         " groups needs " + std::to_string(groups_.size() - 1) +
                         " differentials, got " + std::to_string(diffs_.size()));
    for (std::size_t k = 0; k < diffs_.size(); ++k) {
      const int n = lo_ + static_cast<int>(k);
      if (!same_presentation(diffs_[k].src(), groups_[k]) ||
          !same_presentation(diffs_[k].dst(), groups_[k + 1]))
        throw InvalidInput("differential d^" + std::to_string(n) +
                           " does not connect the groups in degrees " +
                           std::to_string(n) + " and " + std::to_string(n + 1));
    }
    for (std::size_t k = 0; k + 1 < diffs_.size(); ++k)
      if (!compose(diffs_[k + 1], diffs_[k]).is_zero())
        throw InvalidInput("d^" + std::to_string(lo_ + static_cast<int>(k) + 1) +
                           " o d^" + std::to_string(lo_ + static_cast<int>(k)) +
                           " is not zero");
  }

  /// Convenience: groups and differential matrices.
  static CochainComplex from_matrices(int lo, std::vector<FgAbGroup> groups,
                                      const std::vector<IntMatrix>& diffs) {
    if (diffs.size() + 1 != groups.size() && !(groups.empty() && diffs.empty()))
      throw InvalidInput("differential count does not match group count");
    std::vector<GroupHom> homs;
    for (std::size_t k = 0; k < diffs.size(); ++k)
      homs.emplace_back(groups[k], groups[k + 1], diffs[k]);
    return CochainComplex(lo, std::move(groups), std::move(homs));
  }

  /// A single group placed in one degree.
  static CochainComplex concentrated(const FgAbGroup& g, int degree) {
    return CochainComplex(degree, {g}, {});
  }

  bool empty() const { return groups_.empty(); }
  int lo() const { return lo_; }
  /// Top degree; lo() - 1 for the zero complex.
  int hi() const { return lo_ + static_cast<int>(groups_.size()) - 1; }

  /// Zero group outside [lo, hi].
  FgAbGroup group(int n) const {
    if (n < lo_ || n > hi()) return FgAbGroup::zero();
    return groups_[static_cast<std::size_t>(n - lo_)];
  }
  /// d^n : K^n → K^{n+1}; zero map outside the stored range.
  GroupHom diff(int n) const {
    if (n >= lo_ && n < hi()) return diffs_[static_cast<std::size_t>(n - lo_)];
    return GroupHom::zero(group(n), group(n + 1));
  }

  const std::vector<FgAbGroup>& groups() const { return groups_; }
  const std::vector<GroupHom>& diffs() const { return diffs_; }

  bool is_free() const {
    for (const auto& g : groups_)
      if (!g.has_no_relations()) return false;
    return true;
  }

  friend bool operator==(const CochainComplex& a, const CochainComplex& b) {
    if (a.lo_ != b.lo_ || a.groups_.size() != b.groups_.size()) return false;
    for (std::size_t k = 0; k < a.groups_.size(); ++k)
      if (!same_presentation(a.groups_[k], b.groups_[k])) return false;
    for (std::size_t k = 0; k < a.diffs_.size(); ++k)
      if (a.diffs_[k].matrix() != b.diffs_[k].matrix()) return false;
    return true;
  }

 private:
  int lo_ = 0;
  std::vector<FgAbGroup> groups_;
  std::vector<GroupHom> diffs_;
};

/// Degreewise homomorphisms commuting with the differentials.
class ChainMap {
 public:
  ChainMap() = default;
  /// components[k] is the map in degree lo + k; other degrees are zero.
  ChainMap(CochainComplex src, CochainComplex dst, int lo, std::vector<IntMatrix> components)
      : src_(std::move(src)), dst_(std::move(dst)) {
    const int a = std::min(src_.empty() ? dst_.lo() : src_.lo(),
                           dst_.empty() ? src_.lo() : dst_.lo());
    const int b = std::max(src_.hi(), dst_.hi());
    lo_ = a;
    for (int n = a; n <= b; ++n) {
      const FgAbGroup s = src_.group(n);
      const FgAbGroup t = dst_.group(n);
      const int k = n - lo;
      if (k >= 0 && k < static_cast<int>(components.size()) &&
          !(components[static_cast<std::size_t>(k)].rows() == 0 &&
            components[static_cast<std::size_t>(k)].cols() == 0 &&
            (s.n_gens() != 0 || t.n_gens() != 0)))
        maps_.emplace_back(s, t, components[static_cast<std::size_t>(k)]);
      else
        maps_.push_back(GroupHom::zero(s, t));
    }
    for (int k = 0; k < static_cast<int>(components.size()); ++k) {
      const int n = lo + k;
      if ((n < a || n > b) && !components[static_cast<std::size_t>(k)].is_zero())
        throw InvalidInput("chain map has a nonzero component outside both complexes");
    }
    for (int n = a - 1; n <= b; ++n)
      if (!compose(dst_.diff(n), component(n)).equals(compose(component(n + 1), src_.diff(n))))
        throw InvalidInput("chain map does not commute with the differentials in degree " +
                           std::to_string(n));
  }

  static ChainMap identity(const CochainComplex& k) {
    std::vector<IntMatrix> c;
    for (const auto& g : k.groups()) c.push_back(IntMatrix::identity(g.n_gens()));
    return ChainMap(k, k, k.lo(), std::move(c));
  }
  static ChainMap zero(const CochainComplex& s, const CochainComplex& t) {
    return ChainMap(s, t, 0, {});
  }

  const CochainComplex& src() const { return src_; }
  const CochainComplex& dst() const { return dst_; }

  GroupHom component(int n) const {
    const int k = n - lo_;
    if (k >= 0 && k < static_cast<int>(maps_.size())) return maps_[static_cast<std::size_t>(k)];
    return GroupHom::zero(src_.group(n), dst_.group(n));
  }

 private:
  CochainComplex src_;
  CochainComplex dst_;
  int lo_ = 0;
  std::vector<GroupHom> maps_;
};

/// f ∘ g
inline ChainMap compose(const ChainMap& f, const ChainMap& g) {
  if (!(g.dst() == f.src())) throw InvalidInput("compose: chain maps do not match");
  const int a = std::min(g.src().lo(), f.dst().lo());
  const int b = std::max(g.src().hi(), f.dst().hi());
  std::vector<IntMatrix> c;
  for (int n = a; n <= b; ++n) c.push_back(compose(f.component(n), g.component(n)).matrix());
  return ChainMap(g.src(), f.dst(), a, std::move(c));
}

// ---------------------------------------------------------------------------

inline CochainComplex shift(const CochainComplex& k, int i) {
  if (k.empty()) return k;
  const Integer sign = (i % 2 == 0) ? 1 : -1;
  std::vector<GroupHom> d;
  for (const auto& f : k.diffs()) d.push_back(sign * f);
  return CochainComplex(k.lo() - i, k.groups(), std::move(d));
}

inline CochainComplex direct_sum(const CochainComplex& a, const CochainComplex& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  const int lo = std::min(a.lo(), b.lo());
  const int hi = std::max(a.hi(), b.hi());
  std::vector<FgAbGroup> g;
  std::vector<IntMatrix> d;
  for (int n = lo; n <= hi; ++n) g.push_back(direct_sum(a.group(n), b.group(n)));
  for (int n = lo; n < hi; ++n)
    d.push_back(block_diagonal(a.diff(n).matrix(), b.diff(n).matrix()));
  return CochainComplex::from_matrices(lo, std::move(g), d);
}

/// Degrees ≤ n kept verbatim, zero above.
inline CochainComplex bad_truncate(const CochainComplex& k, int n) {
  if (k.empty() || n < k.lo()) return CochainComplex();
  if (n >= k.hi()) return k;
  std::vector<FgAbGroup> g(k.groups().begin(), k.groups().begin() + (n - k.lo() + 1));
  std::vector<GroupHom> d(k.diffs().begin(), k.diffs().begin() + (n - k.lo()));
  return CochainComplex(k.lo(), std::move(g), std::move(d));
}

/// Subgroup ker(f) ⊆ src, presented on a lattice basis of its lift, together
/// with the inclusion matrix (columns = generators written in src).
struct Subgroup {
  FgAbGroup group;
  IntMatrix inclusion;
};

inline Subgroup kernel_subgroup(const GroupHom& f) {
  const std::size_t n = f.src().n_gens();
  // x with f(x) ∈ relations of dst
  const IntMatrix ker =
      kernel_basis(hstack(f.matrix(), f.dst().relation_lattice()));
  const IntMatrix lift = hermite_column_basis(ker.block(0, n, 0, ker.cols()));
  return {subquotient(f.src(), lift, IntMatrix(n, 0)), lift};
}

/// Writes each column of `images` (elements of the container, lying in the
/// subgroup) on the subgroup's generators.
inline IntMatrix coordinates_in_subgroup(const Subgroup& s, const FgAbGroup& container,
                                         const IntMatrix& images) {
  const LatticeSolver solver(hstack(s.inclusion, container.relation_lattice()));
  IntMatrix out(s.inclusion.cols(), images.cols());
  for (std::size_t j = 0; j < images.cols(); ++j) {
    auto x = solver.solve(images.column(j));
    if (!x) throw InvalidInput("element does not lie in the subgroup");
    for (std::size_t i = 0; i < out.rows(); ++i) out(i, j) = (*x)[i];
  }
  return out;
}

/// τ≤n: degrees < n unchanged, degree n replaced by ker(d^n), zero above.
inline CochainComplex good_truncate(const CochainComplex& k, int n) {
  if (k.empty() || n < k.lo()) return CochainComplex();
  if (n >= k.hi()) return k;
  const Subgroup ker = kernel_subgroup(k.diff(n));
  std::vector<FgAbGroup> g(k.groups().begin(), k.groups().begin() + (n - k.lo()));
  std::vector<GroupHom> d(k.diffs().begin(), k.diffs().begin() + std::max(0, n - k.lo() - 1));
  g.push_back(ker.group);
  if (n > k.lo()) {
    const GroupHom& last = k.diff(n - 1);
    d.emplace_back(last.src(), ker.group,
                   coordinates_in_subgroup(ker, k.group(n), last.matrix()));
  }
  return CochainComplex(k.lo(), std::move(g), std::move(d));
}

/// τ≥n: degree n replaced by coker(d^{n-1}) on the same generators, degrees
/// below n dropped. Returned with the projection K → τ≥n K.
struct Truncation {
  CochainComplex complex;
  ChainMap projection;
};

inline Truncation good_truncate_above(const CochainComplex& k, int n) {
  if (k.empty() || n > k.hi()) return {CochainComplex(), ChainMap::zero(k, CochainComplex())};
  if (n <= k.lo()) return {k, ChainMap::identity(k)};
  const FgAbGroup& gn = k.group(n);
  const FgAbGroup coker(gn.n_gens(),
                        vstack(gn.relations(), k.diff(n - 1).matrix().transpose()));
  std::vector<FgAbGroup> g{coker};
  for (int m = n + 1; m <= k.hi(); ++m) g.push_back(k.group(m));
  std::vector<IntMatrix> d;
  for (int m = n; m < k.hi(); ++m) d.push_back(k.diff(m).matrix());
  CochainComplex t = CochainComplex::from_matrices(n, std::move(g), d);
  std::vector<IntMatrix> proj;
  for (int m = n; m <= k.hi(); ++m) proj.push_back(IntMatrix::identity(k.group(m).n_gens()));
  ChainMap p(k, t, n, std::move(proj));
  return {std::move(t), std::move(p)};
}

// ---------------------------------------------------------------------------
// Cohomology

/// H^i with the data needed to move between cocycles and classes.
class Cohomology {
 public:
  Cohomology(const CochainComplex& k, int i) : degree_(i), container_(k.group(i)) {
    const std::size_t n = container_.n_gens();
    cycles_ = kernel_subgroup(k.diff(i)).inclusion;
    const IntMatrix bounds = k.diff(i - 1).matrix();
    boundaries_ = hstack(bounds, container_.relation_lattice());
    group_ = subquotient(container_, cycles_, bounds);
    solver_ = std::make_shared<LatticeSolver>(hstack(cycles_, boundaries_));
    next_ = k.group(i + 1);
    diff_ = k.diff(i).matrix();
    (void)n;
  }

  int degree() const { return degree_; }
  /// Presented on the columns of cycles().
  const FgAbGroup& group() const { return group_; }
  const IntMatrix& cycles() const { return cycles_; }

  bool is_cocycle(const IntVector& x) const {
    return next_.is_zero_element(diff_.apply(x));
  }
  /// Coordinates of [x] on the generators of group(); x must be a cocycle.
  IntVector class_of(const IntVector& x) const {
    if (!is_cocycle(x)) throw InvalidInput("element is not a cocycle");
    auto sol = solver_->solve(x);
    if (!sol) throw InternalError("cocycle not in the cycle lattice");
    return IntVector(sol->begin(), sol->begin() + static_cast<std::ptrdiff_t>(cycles_.cols()));
  }
  IntVector representative(const IntVector& coords) const { return cycles_.apply(coords); }
  bool is_coboundary(const IntVector& x) const {
    return group_.is_zero_element(class_of(x));
  }

 private:
  int degree_;
  FgAbGroup container_;
  FgAbGroup next_;
  IntMatrix diff_;
  IntMatrix cycles_;
  IntMatrix boundaries_;
  FgAbGroup group_;
  std::shared_ptr<LatticeSolver> solver_;
};

inline FgAbGroup cohomology_at(const CochainComplex& k, int i) {
  if (i < k.lo() || i > k.hi()) return FgAbGroup::zero();
  if (k.group(i - 1).has_no_relations() && k.group(i).has_no_relations() &&
      k.group(i + 1).has_no_relations()) {
    // Free neighbourhood: ranks and invariant factors suffice.
    const auto in = invariant_factors(SparseMatrix::from_dense(k.diff(i - 1).matrix()));
    const auto out = invariant_factors(SparseMatrix::from_dense(k.diff(i).matrix()));
    return FgAbGroup::from_factors(in.torsion, k.group(i).n_gens() - in.rank - out.rank);
  }
  return Cohomology(k, i).group();
}

/// H^n(f) : H^n(K) → H^n(L) on the presentations returned by Cohomology.
inline GroupHom induced_map(const ChainMap& f, const Cohomology& hk, const Cohomology& hl) {
  const int n = hk.degree();
  const IntMatrix images = f.component(n).matrix() * hk.cycles();
  IntMatrix m(hl.group().n_gens(), hk.group().n_gens());
  for (std::size_t j = 0; j < images.cols(); ++j) {
    const IntVector c = hl.class_of(images.column(j));
    for (std::size_t i = 0; i < c.size(); ++i) m(i, j) = c[i];
  }
  return GroupHom(hk.group(), hl.group(), m);
}

inline bool is_acyclic(const CochainComplex& k) {
  for (int n = k.lo(); n <= k.hi(); ++n)
    if (!cohomology_at(k, n).is_trivial()) return false;
  return true;
}

// ---------------------------------------------------------------------------

/// Cone(f)^n = K^{n+1} ⊕ L^n, d(x, y) = (-d_K x, f x + d_L y).
inline CochainComplex cone(const ChainMap& f) {
  const CochainComplex& k = f.src();
  const CochainComplex& l = f.dst();
  const int lo = std::min(k.empty() ? l.lo() : k.lo() - 1, l.empty() ? k.lo() - 1 : l.lo());
  const int hi = std::max(k.hi() - 1, l.hi());
  if (hi < lo) return CochainComplex();
  std::vector<FgAbGroup> g;
  std::vector<IntMatrix> d;
  for (int n = lo; n <= hi; ++n) g.push_back(direct_sum(k.group(n + 1), l.group(n)));
  for (int n = lo; n < hi; ++n) {
    const std::size_t kx = k.group(n + 1).n_gens(), ly = l.group(n).n_gens();
    const std::size_t kx2 = k.group(n + 2).n_gens(), ly2 = l.group(n + 1).n_gens();
    IntMatrix m(kx2 + ly2, kx + ly);
    m.set_block(0, 0, -k.diff(n + 1).matrix());
    m.set_block(kx2, 0, f.component(n + 1).matrix());
    m.set_block(kx2, kx, l.diff(n).matrix());
    d.push_back(std::move(m));
  }
  return CochainComplex::from_matrices(lo, std::move(g), d);
}

/// L → Cone(f), y ↦ (0, y).
inline ChainMap cone_inclusion(const ChainMap& f, const CochainComplex& c) {
  const CochainComplex& k = f.src();
  const CochainComplex& l = f.dst();
  std::vector<IntMatrix> comps;
  for (int n = c.lo(); n <= c.hi(); ++n) {
    IntMatrix m(c.group(n).n_gens(), l.group(n).n_gens());
    m.set_block(k.group(n + 1).n_gens(), 0, IntMatrix::identity(l.group(n).n_gens()));
    comps.push_back(std::move(m));
  }
  return ChainMap(l, c, c.lo(), std::move(comps));
}

/// Cone(f) → K[1], (x, y) ↦ x.
inline ChainMap cone_projection(const ChainMap& f, const CochainComplex& c) {
  const CochainComplex& k = f.src();
  const CochainComplex k1 = shift(k, 1);
  std::vector<IntMatrix> comps;
  for (int n = c.lo(); n <= c.hi(); ++n) {
    IntMatrix m(k1.group(n).n_gens(), c.group(n).n_gens());
    m.set_block(0, 0, IntMatrix::identity(k1.group(n).n_gens()));
    comps.push_back(std::move(m));
  }
  return ChainMap(c, k1, c.lo(), std::move(comps));
}

/// f[i] has components f^{n+i}; no sign is needed since both differentials
/// pick up the same one.
inline ChainMap shift(const ChainMap& f, int i) {
  const CochainComplex s = shift(f.src(), i);
  const CochainComplex t = shift(f.dst(), i);
  const int a = std::min(s.lo(), t.lo());
  const int b = std::max(s.hi(), t.hi());
  std::vector<IntMatrix> comps;
  for (int n = a; n <= b; ++n) comps.push_back(f.component(n + i).matrix());
  return ChainMap(s, t, a, std::move(comps));
}

/// A --f--> B --g--> C is exact at B.
inline bool is_exact_at(const GroupHom& f, const GroupHom& g) {
  if (!compose(g, f).is_zero()) return false;
  const IntMatrix ker = kernel_subgroup(g).inclusion;
  const LatticeSolver image(hstack(f.matrix(), f.dst().relation_lattice()));
  for (std::size_t j = 0; j < ker.cols(); ++j)
    if (!image.in_image(ker.column(j))) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Double complexes

/// Grid of groups with horizontal (p → p+1) and vertical (q → q+1)
/// differentials. Squares commute; the totalization inserts (-1)^p on the
/// vertical maps of column p.
class DoubleComplex {
 public:
  DoubleComplex(int p_lo, int p_hi, int q_lo, int q_hi)
      : p_lo_(p_lo), p_hi_(p_hi), q_lo_(q_lo), q_hi_(q_hi),
        groups_(static_cast<std::size_t>(std::max(0, (p_hi - p_lo + 1) * (q_hi - q_lo + 1)))),
        horizontal_(groups_.size()), vertical_(groups_.size()) {}

  int p_lo() const { return p_lo_; }
  int p_hi() const { return p_hi_; }
  int q_lo() const { return q_lo_; }
  int q_hi() const { return q_hi_; }

  void set_group(int p, int q, FgAbGroup g) { groups_[index(p, q)] = std::move(g); }
  /// (p, q) → (p+1, q)
  void set_horizontal(int p, int q, IntMatrix m) { horizontal_[index(p, q)] = std::move(m); }
  /// (p, q) → (p, q+1)
  void set_vertical(int p, int q, IntMatrix m) { vertical_[index(p, q)] = std::move(m); }

  FgAbGroup group(int p, int q) const {
    if (!inside(p, q)) return FgAbGroup::zero();
    return groups_[index(p, q)];
  }
  IntMatrix horizontal(int p, int q) const { return stored(horizontal_, p, q, p + 1, q); }
  IntMatrix vertical(int p, int q) const { return stored(vertical_, p, q, p, q + 1); }

  /// Validates d_h² = 0, d_v² = 0 and commuting squares.
  void validate() const {
    for (int p = p_lo_; p <= p_hi_; ++p)
      for (int q = q_lo_; q <= q_hi_; ++q) {
        const FgAbGroup src = group(p, q);
        auto zero_in = [&](const IntMatrix& m, const FgAbGroup& dst, const char* what) {
          if (!GroupHom(src, dst, m).is_zero())
            throw InvalidInput(std::string("double complex: ") + what + " fails at (" +
                               std::to_string(p) + ", " + std::to_string(q) + ")");
        };
        GroupHom(src, group(p + 1, q), horizontal(p, q));
        GroupHom(src, group(p, q + 1), vertical(p, q));
        zero_in(horizontal(p + 1, q) * horizontal(p, q), group(p + 2, q), "d_h o d_h = 0");
        zero_in(vertical(p, q + 1) * vertical(p, q), group(p, q + 2), "d_v o d_v = 0");
        zero_in(vertical(p + 1, q) * horizontal(p, q) - horizontal(p, q + 1) * vertical(p, q),
                group(p + 1, q + 1), "commuting square");
      }
  }

 private:
  bool inside(int p, int q) const {
    return p >= p_lo_ && p <= p_hi_ && q >= q_lo_ && q <= q_hi_;
  }
  std::size_t index(int p, int q) const {
    if (!inside(p, q)) throw InvalidInput("double complex index out of range");
    return static_cast<std::size_t>((p - p_lo_) * (q_hi_ - q_lo_ + 1) + (q - q_lo_));
  }
  IntMatrix stored(const std::vector<IntMatrix>& v, int p, int q, int p2, int q2) const {
    const std::size_t rows = group(p2, q2).n_gens();
    const std::size_t cols = group(p, q).n_gens();
    if (!inside(p, q)) return IntMatrix(rows, cols);
    const IntMatrix& m = v[index(p, q)];
    if (m.rows() == rows && m.cols() == cols) return m;
    if (m.rows() == 0 && m.cols() == 0) return IntMatrix(rows, cols);
    throw InvalidInput("double complex differential has the wrong shape at (" +
                       std::to_string(p) + ", " + std::to_string(q) + ")");
  }

  int p_lo_, p_hi_, q_lo_, q_hi_;
  std::vector<FgAbGroup> groups_;
  std::vector<IntMatrix> horizontal_;
  std::vector<IntMatrix> vertical_;
};

/// Tot^n = ⊕_{p+q=n} D^{p,q}, summands ordered by increasing p.
inline CochainComplex total_complex(const DoubleComplex& dc) {
  const int lo = dc.p_lo() + dc.q_lo();
  const int hi = dc.p_hi() + dc.q_hi();
  if (hi < lo) return CochainComplex();
  std::vector<FgAbGroup> groups;
  std::vector<std::vector<std::size_t>> offsets;
  for (int n = lo; n <= hi; ++n) {
    FgAbGroup g;
    std::vector<std::size_t> off;
    for (int p = dc.p_lo(); p <= dc.p_hi(); ++p) {
      off.push_back(g.n_gens());
      const int q = n - p;
      if (q < dc.q_lo() || q > dc.q_hi()) continue;
      g = direct_sum(g, dc.group(p, q));
    }
    groups.push_back(g);
    offsets.push_back(off);
  }
  std::vector<IntMatrix> diffs;
  for (int n = lo; n < hi; ++n) {
    const auto& src_off = offsets[static_cast<std::size_t>(n - lo)];
    const auto& dst_off = offsets[static_cast<std::size_t>(n + 1 - lo)];
    IntMatrix m(groups[static_cast<std::size_t>(n + 1 - lo)].n_gens(),
                groups[static_cast<std::size_t>(n - lo)].n_gens());
    for (int p = dc.p_lo(); p <= dc.p_hi(); ++p) {
      const int q = n - p;
      if (q < dc.q_lo() || q > dc.q_hi()) continue;
      const std::size_t col = src_off[static_cast<std::size_t>(p - dc.p_lo())];
      if (p + 1 <= dc.p_hi())
        m.set_block(dst_off[static_cast<std::size_t>(p + 1 - dc.p_lo())], col,
                    dc.horizontal(p, q));
      if (q + 1 <= dc.q_hi()) {
        const IntMatrix v = dc.vertical(p, q);
        m.set_block(dst_off[static_cast<std::size_t>(p - dc.p_lo())], col,
                    (p % 2 == 0) ? v : IntMatrix(-v));
      }
    }
    diffs.push_back(std::move(m));
  }
  return CochainComplex::from_matrices(lo, std::move(groups), diffs);
}

// ---------------------------------------------------------------------------
// Hom complexes

/// Layout of Hom(K, L)^n: one block per source degree p (ascending), block
/// entries are the matrix of φ : K^p → L^{p+n} stored column-major.
struct HomBlock {
  int p;
  std::size_t offset;
  std::size_t rows;  // generators of L^{p+n}
  std::size_t cols;  // rank of K^p
};

inline std::vector<HomBlock> hom_layout(const CochainComplex& k, const CochainComplex& l, int n) {
  std::vector<HomBlock> blocks;
  std::size_t off = 0;
  for (int p = k.lo(); p <= k.hi(); ++p) {
    const int q = p + n;
    if (q < l.lo() || q > l.hi()) continue;
    HomBlock b{p, off, l.group(q).n_gens(), k.group(p).n_gens()};
    blocks.push_back(b);
    off += b.rows * b.cols;
  }
  return blocks;
}

inline void require_free(const CochainComplex& k, const char* who) {
  if (!k.is_free())
    throw InvalidInput(std::string(who) + ": source complex must consist of free groups "
                       "without relations; free-replace it first");
}

/// Degree-n term of Hom(K, L) (K free).
inline FgAbGroup hom_term(const CochainComplex& k, const CochainComplex& l, int n) {
  FgAbGroup g;
  for (const auto& b : hom_layout(k, l, n)) {
    const FgAbGroup lq = l.group(b.p + n);
    g = direct_sum(g, FgAbGroup(b.rows * b.cols,
                                kronecker(IntMatrix::identity(b.cols), lq.relations())));
  }
  return g;
}

/// Matrix of d : Hom^n → Hom^{n+1}, dφ = d_L φ - (-1)^n φ d_K.
inline IntMatrix hom_differential(const CochainComplex& k, const CochainComplex& l, int n) {
  const auto src = hom_layout(k, l, n);
  const auto dst = hom_layout(k, l, n + 1);
  std::size_t src_size = 0, dst_size = 0;
  for (const auto& b : src) src_size += b.rows * b.cols;
  for (const auto& b : dst) dst_size += b.rows * b.cols;
  IntMatrix m(dst_size, src_size);
  auto find = [&](int p) -> const HomBlock* {
    for (const auto& b : dst)
      if (b.p == p) return &b;
    return nullptr;
  };
  const Integer sign = (n % 2 == 0) ? -1 : 1;  // -(-1)^n
  for (const auto& b : src) {
    const int q = b.p + n;
    // d_L ∘ φ lands in block p of degree n+1.
    if (const HomBlock* t = find(b.p)) {
      const IntMatrix dl = l.diff(q).matrix();
      m.set_block(t->offset, b.offset, kronecker(IntMatrix::identity(b.cols), dl));
    }
    // φ ∘ d_K^{p-1} lands in block p-1.
    if (const HomBlock* t = find(b.p - 1)) {
      const IntMatrix dk = k.diff(b.p - 1).matrix();
      IntMatrix piece = kronecker(dk.transpose(), IntMatrix::identity(b.rows));
      const IntMatrix cur = m.block(t->offset, piece.rows(), b.offset, piece.cols());
      m.set_block(t->offset, b.offset, cur + sign * piece);
    }
  }
  return m;
}

/// Hom(K, L) for K free. Degrees from L.lo - K.hi to L.hi - K.lo.
inline CochainComplex hom_complex(const CochainComplex& k, const CochainComplex& l) {
  require_free(k, "hom_complex");
  if (k.empty() || l.empty()) return CochainComplex();
  const int lo = l.lo() - k.hi();
  const int hi = l.hi() - k.lo();
  std::vector<FgAbGroup> g;
  std::vector<IntMatrix> d;
  for (int n = lo; n <= hi; ++n) g.push_back(hom_term(k, l, n));
  for (int n = lo; n < hi; ++n) d.push_back(hom_differential(k, l, n));
  return CochainComplex::from_matrices(lo, std::move(g), d);
}

/// The element of Hom^n(K, L) given by one matrix per source degree
/// (missing degrees are zero).
inline IntVector hom_element(const CochainComplex& k, const CochainComplex& l, int n,
                             const std::map<int, IntMatrix>& pieces) {
  IntVector v;
  for (const auto& b : hom_layout(k, l, n)) {
    auto it = pieces.find(b.p);
    for (std::size_t c = 0; c < b.cols; ++c)
      for (std::size_t r = 0; r < b.rows; ++r)
        v.push_back(it == pieces.end() ? Integer(0) : it->second(r, c));
  }
  return v;
}

/// Inverse of hom_element: φ's matrix for each source degree.
inline std::map<int, IntMatrix> hom_pieces(const CochainComplex& k, const CochainComplex& l,
                                           int n, const IntVector& v) {
  std::map<int, IntMatrix> out;
  for (const auto& b : hom_layout(k, l, n)) {
    IntMatrix m(b.rows, b.cols);
    for (std::size_t c = 0; c < b.cols; ++c)
      for (std::size_t r = 0; r < b.rows; ++r) m(r, c) = v.at(b.offset + c * b.rows + r);
    out.emplace(b.p, std::move(m));
  }
  return out;
}

/// Bicomplex D^{p,q} = Hom(K^{-q}, L^p) whose totalization is hom_complex(K, L):
/// d_h = d_L ∘ -, d_v = (-1)^{q+1} (- ∘ d_K).
inline DoubleComplex hom_bicomplex(const CochainComplex& k, const CochainComplex& l) {
  require_free(k, "hom_bicomplex");
  DoubleComplex dc(l.lo(), l.hi(), -k.hi(), -k.lo());
  for (int p = l.lo(); p <= l.hi(); ++p)
    for (int q = -k.hi(); q <= -k.lo(); ++q) {
      const std::size_t a = k.group(-q).n_gens();
      dc.set_group(p, q, FgAbGroup(a * l.group(p).n_gens(),
                                   kronecker(IntMatrix::identity(a), l.group(p).relations())));
      dc.set_horizontal(p, q, kronecker(IntMatrix::identity(a), l.diff(p).matrix()));
      const IntMatrix dk = k.diff(-q - 1).matrix();
      const IntMatrix v = kronecker(dk.transpose(), IntMatrix::identity(l.group(p).n_gens()));
      dc.set_vertical(p, q, (q % 2 == 0) ? IntMatrix(-v) : v);
    }
  return dc;
}

}  // namespace picard
