// Finitely generated abelian groups given by presentations, and
// homomorphisms between them written on the stated generators.
#pragma once

#include "picard/smith.hpp"

#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

namespace picard {

/// Isomorphism invariant: Z^free_rank ⊕ Z/d1 ⊕ ... with d1 | d2 | ..., di > 1.
struct CanonicalForm {
  std::size_t free_rank = 0;
  IntVector invariant_factors;

  bool is_zero() const { return free_rank == 0 && invariant_factors.empty(); }
  friend bool operator==(const CanonicalForm&, const CanonicalForm&) = default;

  /// "Z^2 + Z/2 + Z/6", "Z", "0".
  std::string to_string() const {
    std::ostringstream os;
    bool first = true;
    if (free_rank > 0) {
      os << 'Z';
      if (free_rank > 1) os << '^' << free_rank;
      first = false;
    }
    for (const auto& d : invariant_factors) {
      os << (first ? "" : " + ") << "Z/" << d;
      first = false;
    }
    return first ? "0" : os.str();
  }
};

/// Coordinates adapted to the relation lattice: y = to_canonical · x, and
/// coordinate k is read modulo moduli[k] (0 = free coordinate, 1 = trivial).
struct SmithCoordinates {
  IntMatrix to_canonical;
  IntMatrix from_canonical;
  IntVector moduli;
};

/// A presentation ⟨x1..xn | relations⟩; each row of `relations` is one
/// relation written on the generators.
class FgAbGroup {
 public:
  FgAbGroup() : FgAbGroup(0, IntMatrix(0, 0)) {}
  FgAbGroup(std::size_t n_gens, IntMatrix relations)
      : n_gens_(n_gens), relations_(std::move(relations)),
        cache_(std::make_shared<Cache>()) {
    if (relations_.cols() != n_gens_)
      throw InvalidInput("relation matrix has " + std::to_string(relations_.cols()) +
                         " columns for " + std::to_string(n_gens_) + " generators");
  }

  static FgAbGroup zero() { return FgAbGroup(); }
  static FgAbGroup free(std::size_t rank) { return FgAbGroup(rank, IntMatrix(0, rank)); }
  /// Z/d for d > 0, Z for d = 0.
  static FgAbGroup cyclic(const Integer& d) {
    if (d < 0) throw InvalidInput("cyclic order must be nonnegative");
    if (d == 0) return free(1);
    return FgAbGroup(1, IntMatrix(1, 1, {d}));
  }
  /// Z^free_rank ⊕ Z/d1 ⊕ ... with one generator per summand (torsion first).
  static FgAbGroup from_factors(const IntVector& orders, std::size_t free_rank) {
    const std::size_t n = orders.size() + free_rank;
    IntMatrix rel(orders.size(), n);
    for (std::size_t k = 0; k < orders.size(); ++k) {
      if (orders[k] <= 0) throw InvalidInput("torsion order must be positive");
      rel(k, k) = orders[k];
    }
    return FgAbGroup(n, rel);
  }

  std::size_t n_gens() const { return n_gens_; }
  const IntMatrix& relations() const { return relations_; }
  /// Relations as columns: the relation lattice inside Z^n_gens.
  IntMatrix relation_lattice() const { return relations_.transpose(); }

  bool has_no_relations() const { return relations_.is_zero(); }
  bool is_free() const { return canonical_form().invariant_factors.empty(); }
  bool is_trivial() const { return canonical_form().is_zero(); }
  bool is_finite() const { return canonical_form().free_rank == 0; }

  const SmithCoordinates& coordinates() const {
    std::call_once(cache_->once, [this] { fill_cache(); });
    return cache_->coords;
  }
  const CanonicalForm& canonical_form() const {
    std::call_once(cache_->once, [this] { fill_cache(); });
    return cache_->form;
  }

  /// Is x (a vector on the generators) zero in the group?
  bool is_zero_element(const IntVector& x) const {
    return normalize(x) == IntVector(nontrivial_count(), Integer(0));
  }
  bool equal_elements(const IntVector& a, const IntVector& b) const {
    return is_zero_element(sub(a, b));
  }
  /// Reduced canonical coordinates of x: one entry per nontrivial summand,
  /// torsion entries in [0, d).
  IntVector normalize(const IntVector& x) const {
    if (x.size() != n_gens_) throw InvalidInput("element has wrong length");
    const auto& c = coordinates();
    const IntVector y = c.to_canonical.apply(x);
    IntVector out;
    for (std::size_t k = 0; k < y.size(); ++k) {
      if (c.moduli[k] == 1) continue;
      out.push_back(c.moduli[k] == 0 ? y[k] : mod_floor(y[k], c.moduli[k]));
    }
    return out;
  }
  /// Order of the element x (0 when infinite).
  Integer order_of(const IntVector& x) const {
    const auto& c = coordinates();
    const IntVector y = c.to_canonical.apply(x);
    Integer ord = 1;
    for (std::size_t k = 0; k < y.size(); ++k) {
      if (c.moduli[k] == 1) continue;
      if (c.moduli[k] == 0) {
        if (y[k] != 0) return 0;
        continue;
      }
      const Integer r = mod_floor(y[k], c.moduli[k]);
      const Integer o = c.moduli[k] / gcd(r, c.moduli[k]);
      ord = ord / gcd(ord, o) * o;
    }
    return ord;
  }

  /// Same generators and identical relation matrices.
  friend bool same_presentation(const FgAbGroup& a, const FgAbGroup& b) {
    return a.n_gens_ == b.n_gens_ && a.relations_ == b.relations_;
  }

  /// Number of summands in the canonical decomposition.
  std::size_t nontrivial_count() const {
    std::size_t k = 0;
    for (const auto& m : coordinates().moduli)
      if (m != 1) ++k;
    return k;
  }

 private:
  struct Cache {
    std::once_flag once;
    SmithCoordinates coords;
    CanonicalForm form;
  };

  void fill_cache() const {
    const SmithDecomposition d = smith_normal_form(relation_lattice());
    Cache& c = *cache_;
    c.coords.to_canonical = d.U;
    c.coords.from_canonical = d.U_inverse;
    c.coords.moduli.assign(n_gens_, Integer(0));
    const std::size_t r = d.rank();
    for (std::size_t k = 0; k < r; ++k) c.coords.moduli[k] = d.S(k, k);
    c.form.free_rank = n_gens_ - r;
    c.form.invariant_factors.clear();
    for (std::size_t k = 0; k < r; ++k)
      if (d.S(k, k) != 1) c.form.invariant_factors.push_back(d.S(k, k));
  }

  std::size_t n_gens_;
  IntMatrix relations_;
  std::shared_ptr<Cache> cache_;
};

inline CanonicalForm canonical_form(const FgAbGroup& g) { return g.canonical_form(); }

inline bool is_isomorphic(const FgAbGroup& a, const FgAbGroup& b) {
  return a.canonical_form() == b.canonical_form();
}

inline FgAbGroup direct_sum(const FgAbGroup& a, const FgAbGroup& b) {
  return FgAbGroup(a.n_gens() + b.n_gens(),
                   block_diagonal(a.relations(), b.relations()));
}

/// Homomorphism src → dst; column j is the image of generator j of src.
class GroupHom {
 public:
  GroupHom() = default;
  /// Checks that every relation of src lands in the relation lattice of dst.
  GroupHom(FgAbGroup src, FgAbGroup dst, IntMatrix matrix)
      : src_(std::move(src)), dst_(std::move(dst)), matrix_(std::move(matrix)) {
    if (matrix_.rows() != dst_.n_gens() || matrix_.cols() != src_.n_gens())
      throw InvalidInput("homomorphism matrix is " + std::to_string(matrix_.rows()) +
                         "x" + std::to_string(matrix_.cols()) + ", expected " +
                         std::to_string(dst_.n_gens()) + "x" +
                         std::to_string(src_.n_gens()));
    if (dst_.has_no_relations() && src_.has_no_relations()) return;
    for (std::size_t k = 0; k < src_.relations().rows(); ++k)
      if (!dst_.is_zero_element(matrix_.apply(src_.relations().row(k))))
        throw InvalidInput("homomorphism is not well defined: relation " +
                           std::to_string(k) + " of the source is not killed");
  }

  static GroupHom zero(const FgAbGroup& src, const FgAbGroup& dst) {
    return GroupHom(src, dst, IntMatrix(dst.n_gens(), src.n_gens()), Unchecked{});
  }
  static GroupHom identity(const FgAbGroup& g) {
    return GroupHom(g, g, IntMatrix::identity(g.n_gens()), Unchecked{});
  }

  const FgAbGroup& src() const { return src_; }
  const FgAbGroup& dst() const { return dst_; }
  const IntMatrix& matrix() const { return matrix_; }

  IntVector apply(const IntVector& x) const { return matrix_.apply(x); }

  bool is_zero() const {
    for (std::size_t j = 0; j < matrix_.cols(); ++j)
      if (!dst_.is_zero_element(matrix_.column(j))) return false;
    return true;
  }

  friend GroupHom operator+(const GroupHom& f, const GroupHom& g) {
    f.require_parallel(g);
    return GroupHom(f.src_, f.dst_, f.matrix_ + g.matrix_, Unchecked{});
  }
  friend GroupHom operator-(const GroupHom& f, const GroupHom& g) {
    f.require_parallel(g);
    return GroupHom(f.src_, f.dst_, f.matrix_ - g.matrix_, Unchecked{});
  }
  friend GroupHom operator*(const Integer& k, const GroupHom& f) {
    return GroupHom(f.src_, f.dst_, k * f.matrix_, Unchecked{});
  }

  /// Equal as maps (difference is the zero homomorphism).
  bool equals(const GroupHom& g) const { return (*this - g).is_zero(); }

 private:
  struct Unchecked {};
  GroupHom(FgAbGroup src, FgAbGroup dst, IntMatrix m, Unchecked)
      : src_(std::move(src)), dst_(std::move(dst)), matrix_(std::move(m)) {}

  void require_parallel(const GroupHom& g) const {
    if (!same_presentation(src_, g.src_) || !same_presentation(dst_, g.dst_))
      throw InvalidInput("homomorphisms have different endpoints");
  }

  friend GroupHom compose(const GroupHom& f, const GroupHom& g);

  FgAbGroup src_;
  FgAbGroup dst_;
  IntMatrix matrix_;
};

/// f ∘ g (apply g first).
inline GroupHom compose(const GroupHom& f, const GroupHom& g) {
  if (!same_presentation(g.dst(), f.src()))
    throw InvalidInput("compose: codomain of the inner map differs from the domain of the outer map");
  return GroupHom(g.src(), f.dst(), f.matrix() * g.matrix(), GroupHom::Unchecked{});
}

inline bool is_zero_hom(const GroupHom& f) { return f.is_zero(); }

/// Hom(A, B) with an explicit dictionary between its elements and maps.
struct HomGroup {
  FgAbGroup group;
  FgAbGroup src;
  FgAbGroup dst;
  /// One matrix per generator of `group`.
  std::vector<IntMatrix> generator_matrices;

  GroupHom to_hom(const IntVector& coords) const {
    if (coords.size() != generator_matrices.size())
      throw InvalidInput("Hom element has wrong length");
    IntMatrix m(dst.n_gens(), src.n_gens());
    for (std::size_t k = 0; k < coords.size(); ++k)
      if (coords[k] != 0) m = m + coords[k] * generator_matrices[k];
    return GroupHom(src, dst, m);
  }
};

namespace detail {
struct HomSlot {
  std::size_t src_coord;
  std::size_t dst_coord;
  Integer value;  // image of the src canonical generator, in dst coordinate
  Integer order;  // 0 = infinite cyclic
};

inline std::vector<HomSlot> hom_slots(const FgAbGroup& a, const FgAbGroup& b) {
  const auto& ca = a.coordinates();
  const auto& cb = b.coordinates();
  std::vector<HomSlot> slots;
  for (std::size_t i = 0; i < ca.moduli.size(); ++i) {
    const Integer& alpha = ca.moduli[i];
    if (alpha == 1) continue;
    for (std::size_t j = 0; j < cb.moduli.size(); ++j) {
      const Integer& beta = cb.moduli[j];
      if (beta == 1) continue;
      if (alpha == 0 && beta == 0) {
        slots.push_back({i, j, 1, 0});
      } else if (alpha == 0) {
        slots.push_back({i, j, 1, beta});
      } else if (beta != 0) {
        const Integer g = gcd(alpha, beta);
        slots.push_back({i, j, beta / g, g});
      }
    }
  }
  return slots;
}
}  // namespace detail

/// Hom(A, B) computed through the canonical decompositions of A and B.
inline HomGroup hom_group(const FgAbGroup& a, const FgAbGroup& b) {
  const auto slots = detail::hom_slots(a, b);
  const auto& ca = a.coordinates();
  const auto& cb = b.coordinates();
  HomGroup h;
  h.src = a;
  h.dst = b;
  IntVector orders;
  std::size_t free_count = 0;
  // Torsion generators first, matching from_factors.
  std::vector<const detail::HomSlot*> ordered;
  for (const auto& s : slots)
    if (s.order != 0) ordered.push_back(&s);
  for (const auto& s : slots)
    if (s.order == 0) ordered.push_back(&s);
  for (const auto* s : ordered) {
    IntMatrix c(b.n_gens(), a.n_gens());
    c(s->dst_coord, s->src_coord) = s->value;
    h.generator_matrices.push_back(cb.from_canonical * c * ca.to_canonical);
    if (s->order != 0)
      orders.push_back(s->order);
    else
      ++free_count;
  }
  h.group = FgAbGroup::from_factors(orders, free_count);
  return h;
}

/// (S + R) / (Q + R) inside container = Z^n / R, presented on the columns
/// of `sub_gens`. Requires Q ⊆ S + R.
inline FgAbGroup subquotient(const FgAbGroup& container, const IntMatrix& sub_gens,
                             const IntMatrix& quotient_rels) {
  const std::size_t n = container.n_gens();
  if (sub_gens.rows() != n || quotient_rels.rows() != n)
    throw InvalidInput("subquotient: generator matrices must have one row per container generator");
  const IntMatrix rel = container.relation_lattice();
  const IntMatrix span = hstack(sub_gens, rel);
  if (quotient_rels.cols() > 0) {
    const LatticeSolver in_sub(span);
    for (std::size_t j = 0; j < quotient_rels.cols(); ++j)
      if (!in_sub.in_image(quotient_rels.column(j)))
        throw InvalidInput("subquotient: quotient relation " + std::to_string(j) +
                           " does not lie in the sub lattice");
  }
  const std::size_t s = sub_gens.cols();
  const IntMatrix ker = kernel_basis(hstack(sub_gens, hstack(quotient_rels, rel)));
  const IntMatrix rels = hermite_column_basis(ker.block(0, s, 0, ker.cols()));
  return FgAbGroup(s, rels.transpose());
}

}  // namespace picard
