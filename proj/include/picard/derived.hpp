// Derived Hom between bounded complexes through free replacements, Ext
// groups, homotopy groups of length-3 models and extension classes.
#pragma once

#include "picard/complex.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <unordered_map>

namespace picard {

/// Text that identifies a complex up to equality of presentations.
inline std::string fingerprint(const CochainComplex& k) {
  std::ostringstream os;
  os << k.lo() << ':' << k.hi();
  for (int n = k.lo(); n <= k.hi(); ++n) {
    const FgAbGroup g = k.group(n);
    os << "|g" << g.n_gens() << 'r' << g.relations() << 'd' << k.diff(n).matrix();
  }
  return os.str();
}

/// F with every term free and a surjective quasi-isomorphism q : F → K.
struct FreeReplacement {
  CochainComplex complex;
  ChainMap quasi_iso;
};

namespace detail {

// F^n = Z^{g_n} ⊕ Z^{r_{n+1}} where the columns of B_n (g_n × r_n) are a
// basis of the relation lattice of K^n, and
//   d(x, y) = (D_n x + B_{n+1} y, -h_n x - X_{n+1} y)
// with D_{n+1} D_n = B_{n+2} h_n and D_{n+1} B_{n+1} = B_{n+2} X_{n+1}.
inline FreeReplacement build_free_replacement(const CochainComplex& k) {
  if (k.is_free()) return {k, ChainMap::identity(k)};
  const int lo = k.lo(), hi = k.hi();
  std::map<int, IntMatrix> basis;  // B_n
  for (int n = lo; n <= hi + 2; ++n) {
    const FgAbGroup g = k.group(n);
    basis[n] = hermite_column_basis(g.relation_lattice());
  }
  auto B = [&](int n) -> const IntMatrix& { return basis.at(n); };
  auto D = [&](int n) { return k.diff(n).matrix(); };
  auto express = [](const IntMatrix& lattice, const IntMatrix& m) {
    const LatticeSolver solver(lattice);
    IntMatrix out(lattice.cols(), m.cols());
    for (std::size_t j = 0; j < m.cols(); ++j) {
      auto x = solver.solve(m.column(j));
      if (!x) throw InternalError("free replacement: column outside the relation lattice");
      for (std::size_t i = 0; i < out.rows(); ++i) out(i, j) = (*x)[i];
    }
    return out;
  };

  const int flo = B(lo).cols() == 0 ? lo : lo - 1;
  std::vector<FgAbGroup> groups;
  std::vector<IntMatrix> diffs;
  std::vector<IntMatrix> q;
  for (int n = flo; n <= hi; ++n) {
    const std::size_t gn = k.group(n).n_gens();
    const std::size_t rn1 = B(n + 1).cols();
    groups.push_back(FgAbGroup::free(gn + rn1));
    IntMatrix qn(gn, gn + rn1);
    qn.set_block(0, 0, IntMatrix::identity(gn));
    q.push_back(std::move(qn));
  }
  for (int n = flo; n < hi; ++n) {
    const std::size_t gn = k.group(n).n_gens(), gn1 = k.group(n + 1).n_gens();
    const std::size_t rn1 = B(n + 1).cols(), rn2 = B(n + 2).cols();
    const IntMatrix h = express(B(n + 2), D(n + 1) * D(n));
    const IntMatrix x = express(B(n + 2), D(n + 1) * B(n + 1));
    IntMatrix d(gn1 + rn2, gn + rn1);
    d.set_block(0, 0, D(n));
    d.set_block(0, gn, B(n + 1));
    d.set_block(gn1, 0, -h);
    d.set_block(gn1, gn, -x);
    diffs.push_back(std::move(d));
  }
  CochainComplex f = CochainComplex::from_matrices(flo, std::move(groups), diffs);
  ChainMap qmap(f, k, flo, std::move(q));
  return {std::move(f), std::move(qmap)};
}

class FreeReplacementCache {
 public:
  FreeReplacement get(const CochainComplex& k) {
    const std::string key = fingerprint(k);
    {
      std::lock_guard<std::mutex> lock(mutex_);
      auto it = cache_.find(key);
      if (it != cache_.end()) return it->second;
    }
    FreeReplacement fr = build_free_replacement(k);
    std::lock_guard<std::mutex> lock(mutex_);
    // First writer wins; the construction is deterministic anyway.
    return cache_.emplace(key, std::move(fr)).first->second;
  }

 private:
  std::mutex mutex_;
  std::unordered_map<std::string, FreeReplacement> cache_;
};

inline FreeReplacementCache& free_replacement_cache() {
  static FreeReplacementCache cache;
  return cache;
}

}  // namespace detail

/// Deterministic and memoized: equal complexes get the identical replacement.
inline FreeReplacement free_replacement(const CochainComplex& k) {
  return detail::free_replacement_cache().get(k);
}

inline CochainComplex rhom(const CochainComplex& p, const CochainComplex& g) {
  return hom_complex(free_replacement(p).complex, g);
}

inline FgAbGroup ext_group(const CochainComplex& p, const CochainComplex& g, int i) {
  return cohomology_at(rhom(p, g), i);
}

inline void require_length_three(const CochainComplex& k, const char* what) {
  if (!k.empty() && (k.lo() < -2 || k.hi() > 0))
    throw InvalidInput(std::string(what) + " must live in degrees -2..0, got " +
                       std::to_string(k.lo()) + ".." + std::to_string(k.hi()));
}

/// τ≤0 RHom(P, G), the model of the Hom object between two Picard 2-stacks.
inline CochainComplex hom_2picard(const CochainComplex& p, const CochainComplex& g) {
  require_length_three(p, "P");
  require_length_three(g, "G");
  return good_truncate(rhom(p, g), 0);
}

struct HomotopyGroups {
  FgAbGroup pi0, pi1, pi2;
};

inline HomotopyGroups homotopy_groups(const CochainComplex& p) {
  require_length_three(p, "P");
  return {cohomology_at(p, 0), cohomology_at(p, -1), cohomology_at(p, -2)};
}

/// Ext^i(P, G) for i = 1, 0, -1, -2 (in that order).
inline std::vector<FgAbGroup> ext_homotopy_groups(const CochainComplex& p,
                                                  const CochainComplex& g) {
  require_length_three(p, "P");
  require_length_three(g, "G");
  const CochainComplex r = rhom(p, g);
  return {cohomology_at(r, 1), cohomology_at(r, 0), cohomology_at(r, -1), cohomology_at(r, -2)};
}

// ---------------------------------------------------------------------------
// Linear systems whose unknowns are matrices.

namespace detail {

/// Collects equations Σ A·X·B = C (entrywise, column-major vectorized) and
/// solves them over the integers.
class MatrixSystem {
 public:
  /// Registers an unknown of the given shape; returns its handle.
  std::size_t unknown(std::size_t rows, std::size_t cols) {
    vars_.push_back({offset_, rows, cols});
    offset_ += rows * cols;
    return vars_.size() - 1;
  }
  /// Starts an equation block of the given shape with right-hand side c.
  std::size_t equation(const IntMatrix& c) {
    eqs_.push_back({eq_offset_, c.rows(), c.cols()});
    rhs_.push_back(c);
    eq_offset_ += c.rows() * c.cols();
    return eqs_.size() - 1;
  }
  /// Adds A·X·B to the left side of equation e.
  void term(std::size_t e, const IntMatrix& a, std::size_t var, const IntMatrix& b) {
    const Var& v = vars_[var];
    const Eq& q = eqs_[e];
    if (a.cols() != v.rows || b.rows() != v.cols || a.rows() != q.rows || b.cols() != q.cols)
      throw InternalError("matrix system: term shape mismatch");
    terms_.push_back({e, var, a, b});
  }

  std::optional<std::vector<IntMatrix>> solve() const {
    IntMatrix m(eq_offset_, offset_);
    for (const auto& t : terms_) {
      const Var& v = vars_[t.var];
      const Eq& q = eqs_[t.eq];
      // vec(A X B) = (Bᵀ ⊗ A) vec(X)
      for (std::size_t bc = 0; bc < t.b.cols(); ++bc)
        for (std::size_t br = 0; br < t.b.rows(); ++br) {
          const Integer& beta = t.b(br, bc);
          if (beta == 0) continue;
          for (std::size_t ar = 0; ar < t.a.rows(); ++ar)
            for (std::size_t ac = 0; ac < t.a.cols(); ++ac) {
              const Integer& alpha = t.a(ar, ac);
              if (alpha == 0) continue;
              m(q.offset + bc * q.rows + ar, v.offset + br * v.rows + ac) += alpha * beta;
            }
        }
    }
    IntVector rhs(eq_offset_, Integer(0));
    for (std::size_t e = 0; e < eqs_.size(); ++e)
      for (std::size_t c = 0; c < eqs_[e].cols; ++c)
        for (std::size_t r = 0; r < eqs_[e].rows; ++r)
          rhs[eqs_[e].offset + c * eqs_[e].rows + r] = rhs_[e](r, c);
    auto x = solve_in_image(m, rhs);
    if (!x) return std::nullopt;
    std::vector<IntMatrix> out;
    for (const auto& v : vars_) {
      IntMatrix xm(v.rows, v.cols);
      for (std::size_t c = 0; c < v.cols; ++c)
        for (std::size_t r = 0; r < v.rows; ++r) xm(r, c) = (*x)[v.offset + c * v.rows + r];
      out.push_back(std::move(xm));
    }
    return out;
  }

 private:
  struct Var {
    std::size_t offset, rows, cols;
  };
  struct Eq {
    std::size_t offset, rows, cols;
  };
  struct Term {
    std::size_t eq, var;
    IntMatrix a, b;
  };
  std::size_t offset_ = 0;
  std::size_t eq_offset_ = 0;
  std::vector<Var> vars_;
  std::vector<Eq> eqs_;
  std::vector<IntMatrix> rhs_;
  std::vector<Term> terms_;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Extension classes

/// Ext^1(P, G) = H^1(Hom(F, G)) for the fixed free replacement F of P.
class ExtGroup {
 public:
  ExtGroup(CochainComplex p, CochainComplex g)
      : p_(std::move(p)), g_(std::move(g)), fr_(free_replacement(p_)),
        hom_(hom_complex(fr_.complex, g_)),
        h1_(std::make_shared<Cohomology>(hom_, 1)) {}

  const CochainComplex& source() const { return p_; }
  const CochainComplex& target() const { return g_; }
  const FreeReplacement& replacement() const { return fr_; }
  const CochainComplex& hom() const { return hom_; }
  const FgAbGroup& group() const { return h1_->group(); }

  /// A cocycle in Hom^1(F, G) representing the class with these coordinates.
  IntVector cocycle(const IntVector& coords) const { return h1_->representative(coords); }
  IntVector class_of(const IntVector& cocycle) const { return h1_->class_of(cocycle); }
  bool is_cocycle(const IntVector& x) const { return h1_->is_cocycle(x); }
  bool same_class(const IntVector& a, const IntVector& b) const {
    return group().equal_elements(class_of(a), class_of(b));
  }

  /// ξ^p : F^p → G^{p+1}, keyed by p.
  std::map<int, IntMatrix> pieces(const IntVector& cocycle) const {
    return hom_pieces(fr_.complex, g_, 1, cocycle);
  }
  IntVector from_pieces(const std::map<int, IntMatrix>& pieces) const {
    return hom_element(fr_.complex, g_, 1, pieces);
  }
  std::size_t cochain_size() const { return hom_.group(1).n_gens(); }

 private:
  CochainComplex p_;
  CochainComplex g_;
  FreeReplacement fr_;
  CochainComplex hom_;
  std::shared_ptr<Cohomology> h1_;
};

/// G --i--> E --j--> P
struct Extension {
  CochainComplex e;
  ChainMap i;
  ChainMap j;
};

/// E = Cone(ξ : F → G[1])[-1] truncated to degrees ≥ -2:
/// E^n = F^n ⊕ G^n, d(x, y) = (d_F x, d_G y - ξ x), i(y) = (0, y), j(x, y) = q(x).
inline Extension realize_extension(const ExtGroup& ext, const IntVector& cocycle) {
  if (cocycle.size() != ext.cochain_size())
    throw InvalidInput("class cocycle has length " + std::to_string(cocycle.size()) +
                       ", expected " + std::to_string(ext.cochain_size()));
  if (!ext.is_cocycle(cocycle)) throw InvalidInput("the given class is not a cocycle");
  const CochainComplex& f = ext.replacement().complex;
  const CochainComplex& g = ext.target();
  const CochainComplex& p = ext.source();
  const auto xi = ext.pieces(cocycle);
  auto piece = [&](int n) {
    auto it = xi.find(n);
    return it == xi.end() ? IntMatrix(g.group(n + 1).n_gens(), f.group(n).n_gens()) : it->second;
  };

  const int lo = std::min(f.empty() ? 0 : f.lo(), g.empty() ? 0 : g.lo());
  const int hi = std::max(f.empty() ? lo : f.hi(), g.empty() ? lo : g.hi());
  std::vector<FgAbGroup> groups;
  std::vector<IntMatrix> diffs;
  for (int n = lo; n <= hi; ++n) groups.push_back(direct_sum(f.group(n), g.group(n)));
  for (int n = lo; n < hi; ++n) {
    const std::size_t fn = f.group(n).n_gens(), fn1 = f.group(n + 1).n_gens();
    IntMatrix d(fn1 + g.group(n + 1).n_gens(), fn + g.group(n).n_gens());
    d.set_block(0, 0, f.diff(n).matrix());
    d.set_block(fn1, 0, -piece(n));
    d.set_block(fn1, fn, g.diff(n).matrix());
    diffs.push_back(std::move(d));
  }
  const CochainComplex full = CochainComplex::from_matrices(lo, groups, diffs);
  const Truncation t = good_truncate_above(full, std::min(-2, hi));
  const CochainComplex& e = t.complex;

  std::vector<IntMatrix> ic, jc;
  for (int n = e.lo(); n <= e.hi(); ++n) {
    const std::size_t fn = f.group(n).n_gens();
    IntMatrix im(e.group(n).n_gens(), g.group(n).n_gens());
    im.set_block(fn, 0, IntMatrix::identity(g.group(n).n_gens()));
    ic.push_back(std::move(im));
    IntMatrix jm(p.group(n).n_gens(), e.group(n).n_gens());
    jm.set_block(0, 0, ext.replacement().quasi_iso.component(n).matrix());
    jc.push_back(std::move(jm));
  }
  ChainMap i(g, e, e.lo(), std::move(ic));
  ChainMap j(e, p, e.lo(), std::move(jc));
  return {e, std::move(i), std::move(j)};
}

/// Degreewise kernel of j as a subcomplex of E, with i factored through it.
struct KernelComplex {
  CochainComplex complex;
  ChainMap from_g;
};

inline KernelComplex kernel_of(const ChainMap& j, const ChainMap& i) {
  const CochainComplex& e = j.src();
  const int lo = e.lo(), hi = e.hi();
  std::vector<Subgroup> subs;
  std::vector<FgAbGroup> groups;
  for (int n = lo; n <= hi; ++n) {
    subs.push_back(kernel_subgroup(j.component(n)));
    groups.push_back(subs.back().group);
  }
  std::vector<IntMatrix> diffs;
  for (int n = lo; n < hi; ++n) {
    const auto& s = subs[static_cast<std::size_t>(n - lo)];
    const auto& t = subs[static_cast<std::size_t>(n + 1 - lo)];
    diffs.push_back(coordinates_in_subgroup(t, e.group(n + 1), e.diff(n).matrix() * s.inclusion));
  }
  CochainComplex k = CochainComplex::from_matrices(lo, std::move(groups), diffs);
  const CochainComplex& g = i.src();
  const int a = std::min(lo, g.empty() ? lo : g.lo());
  const int b = std::max(hi, g.hi());
  std::vector<IntMatrix> comps;
  for (int n = a; n <= b; ++n) {
    if (n < lo || n > hi) {
      if (!i.component(n).is_zero())
        throw InvalidInput("extension: i is nonzero outside the degrees of E");
      comps.push_back(IntMatrix(k.group(n).n_gens(), g.group(n).n_gens()));
      continue;
    }
    comps.push_back(coordinates_in_subgroup(subs[static_cast<std::size_t>(n - lo)], e.group(n),
                                            i.component(n).matrix()));
  }
  ChainMap from_g(g, k, a, std::move(comps));
  return {std::move(k), std::move(from_g)};
}

/// Checks the extension contract: j degreewise surjective, i degreewise
/// injective, j∘i = 0, and G → ker j a quasi-isomorphism.
inline void validate_extension(const Extension& x) {
  const CochainComplex& e = x.e;
  if (!(x.i.dst() == e) || !(x.j.src() == e))
    throw InvalidInput("extension: i must land in E and j must start at E");
  const CochainComplex& p = x.j.dst();
  for (int n = std::min(e.lo(), p.lo()); n <= std::max(e.hi(), p.hi()); ++n) {
    const GroupHom jn = x.j.component(n);
    const LatticeSolver image(hstack(jn.matrix(), p.group(n).relation_lattice()));
    for (std::size_t k = 0; k < p.group(n).n_gens(); ++k) {
      IntVector unit(p.group(n).n_gens(), Integer(0));
      unit[k] = 1;
      if (!image.in_image(unit))
        throw InvalidInput("extension: j is not surjective in degree " + std::to_string(n));
    }
    if (!kernel_subgroup(x.i.component(n)).group.is_trivial())
      throw InvalidInput("extension: i is not injective in degree " + std::to_string(n));
    if (!compose(jn, x.i.component(n)).is_zero())
      throw InvalidInput("extension: j o i is not zero in degree " + std::to_string(n));
  }
  const KernelComplex k = kernel_of(x.j, x.i);
  if (!is_acyclic(cone(k.from_g)))
    throw InvalidInput("extension: G is not quasi-isomorphic to the kernel of j");
}

/// The connecting class: pick η : F → E of degree 0 with j η = q, then
/// η d_F - d_E η = i ξ for a 1-cocycle ξ : F → G, which is returned.
inline IntVector classify_extension(const ExtGroup& ext, const Extension& x) {
  validate_extension(x);
  if (!(x.j.dst() == ext.source()) || !(x.i.src() == ext.target()))
    throw InvalidInput("extension endpoints do not match the Ext group");
  const CochainComplex& f = ext.replacement().complex;
  const CochainComplex& e = x.e;
  const CochainComplex& g = ext.target();
  const CochainComplex& p = ext.source();
  const ChainMap& q = ext.replacement().quasi_iso;

  detail::MatrixSystem sys;
  const int lo = f.lo(), hi = f.hi();
  std::map<int, std::size_t> eta, xi, slack_p, slack_e;
  for (int n = lo; n <= hi; ++n) {
    const std::size_t fn = f.group(n).n_gens();
    eta[n] = sys.unknown(e.group(n).n_gens(), fn);
    xi[n] = sys.unknown(g.group(n + 1).n_gens(), fn);
    slack_p[n] = sys.unknown(p.group(n).relations().rows(), fn);
    slack_e[n] = sys.unknown(e.group(n + 1).relations().rows(), fn);
  }
  for (int n = lo; n <= hi; ++n) {
    const std::size_t fn = f.group(n).n_gens();
    const IntMatrix idf = IntMatrix::identity(fn);
    // j η^n - R_P s = q^n
    const std::size_t a = sys.equation(q.component(n).matrix());
    sys.term(a, x.j.component(n).matrix(), eta[n], idf);
    sys.term(a, -p.group(n).relation_lattice(), slack_p[n], idf);
    // η^{n+1} d_F^n - d_E^n η^n - i^{n+1} ξ^n - R_E t = 0
    const std::size_t b = sys.equation(IntMatrix(e.group(n + 1).n_gens(), fn));
    if (n + 1 <= hi)
      sys.term(b, IntMatrix::identity(e.group(n + 1).n_gens()), eta[n + 1], f.diff(n).matrix());
    sys.term(b, -e.diff(n).matrix(), eta[n], idf);
    sys.term(b, -x.i.component(n + 1).matrix(), xi[n], idf);
    sys.term(b, -e.group(n + 1).relation_lattice(), slack_e[n], idf);
  }
  const auto sol = sys.solve();
  if (!sol) throw InvalidInput("extension: no lift of the free replacement through j");
  std::map<int, IntMatrix> pieces;
  for (int n = lo; n <= hi; ++n) pieces[n] = (*sol)[xi[n]];
  const IntVector cocycle = ext.from_pieces(pieces);
  if (!ext.is_cocycle(cocycle)) throw InternalError("classify_extension: defect is not a cocycle");
  return cocycle;
}

/// Lift of f : P' → P to the free replacements, q ∘ f̃ = f ∘ q'.
inline ChainMap lift_to_replacements(const ChainMap& f) {
  const FreeReplacement src = free_replacement(f.src());
  const FreeReplacement dst = free_replacement(f.dst());
  const CochainComplex& a = src.complex;  // F'
  const CochainComplex& b = dst.complex;  // F
  const CochainComplex& p = f.dst();
  const int lo = std::min(a.lo(), b.lo()), hi = std::max(a.hi(), b.hi());
  detail::MatrixSystem sys;
  std::map<int, std::size_t> lift, slack;
  for (int n = lo; n <= hi; ++n) {
    lift[n] = sys.unknown(b.group(n).n_gens(), a.group(n).n_gens());
    slack[n] = sys.unknown(p.group(n).relations().rows(), a.group(n).n_gens());
  }
  for (int n = lo; n <= hi; ++n) {
    const std::size_t an = a.group(n).n_gens();
    const IntMatrix ida = IntMatrix::identity(an);
    const std::size_t e1 = sys.equation(f.component(n).matrix() * src.quasi_iso.component(n).matrix());
    sys.term(e1, dst.quasi_iso.component(n).matrix(), lift[n], ida);
    sys.term(e1, -p.group(n).relation_lattice(), slack[n], ida);
    const std::size_t e2 = sys.equation(IntMatrix(b.group(n + 1).n_gens(), an));
    sys.term(e2, b.diff(n).matrix(), lift[n], ida);
    if (n + 1 <= hi)
      sys.term(e2, -IntMatrix::identity(b.group(n + 1).n_gens()), lift[n + 1],
               a.diff(n).matrix());
  }
  const auto sol = sys.solve();
  if (!sol) throw InternalError("no chain lift between free replacements");
  std::vector<IntMatrix> comps;
  for (int n = lo; n <= hi; ++n) comps.push_back((*sol)[lift[n]]);
  return ChainMap(a, b, lo, std::move(comps));
}

/// f^* ξ = ξ ∘ f̃ as a cocycle of Ext^1(P', G).
inline IntVector pullback_class(const ChainMap& f, const ExtGroup& ext, const IntVector& cocycle,
                                const ExtGroup& target) {
  if (!(f.dst() == ext.source()) || !(target.source() == f.src()) ||
      !(target.target() == ext.target()))
    throw InvalidInput("pullback: endpoints do not match");
  const ChainMap lift = lift_to_replacements(f);
  const auto xi = ext.pieces(cocycle);
  std::map<int, IntMatrix> out;
  const CochainComplex& a = target.replacement().complex;
  for (int n = a.lo(); n <= a.hi(); ++n) {
    auto it = xi.find(n);
    if (it == xi.end()) continue;
    out[n] = it->second * lift.component(n).matrix();
  }
  return target.from_pieces(out);
}

/// g_* ξ = g ∘ ξ as a cocycle of Ext^1(P, G').
inline IntVector pushout_class(const ChainMap& g, const ExtGroup& ext, const IntVector& cocycle,
                               const ExtGroup& target) {
  if (!(g.src() == ext.target()) || !(target.target() == g.dst()) ||
      !(target.source() == ext.source()))
    throw InvalidInput("pushout: endpoints do not match");
  std::map<int, IntMatrix> out;
  for (const auto& [n, m] : ext.pieces(cocycle)) out[n] = g.component(n + 1).matrix() * m;
  return target.from_pieces(out);
}

/// Sum of classes; on extensions this is the Baer sum.
inline IntVector baer_sum(const IntVector& a, const IntVector& b) { return add(a, b); }

/// H^n(E) ≅ H^n(G) ⊕ H^n(P) in every degree.
inline bool splits_in_cohomology(const Extension& x) {
  const CochainComplex& g = x.i.src();
  const CochainComplex& p = x.j.dst();
  const int lo = std::min({x.e.lo(), g.lo(), p.lo()});
  const int hi = std::max({x.e.hi(), g.hi(), p.hi()});
  for (int n = lo; n <= hi; ++n)
    if (!is_isomorphic(cohomology_at(x.e, n),
                       direct_sum(cohomology_at(g, n), cohomology_at(p, n))))
      return false;
  return true;
}

}  // namespace picard
