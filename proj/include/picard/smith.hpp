// Smith normal form, lattice bases, integer kernels and integer solving.
#pragma once

#include "picard/int_matrix.hpp"

#include <optional>

namespace picard {

/// U·A·V = S with U, V unimodular and S diagonal with d1 | d2 | ... .
struct SmithDecomposition {
  IntMatrix U;
  IntMatrix S;
  IntMatrix V;
  /// Inverse of U, recorded alongside the row operations.
  IntMatrix U_inverse;

  std::size_t rank() const {
    std::size_t r = 0;
    while (r < S.rows() && r < S.cols() && S(r, r) != 0) ++r;
    return r;
  }
  /// Nonzero diagonal entries d1 | d2 | ... .
  IntVector diagonal() const {
    IntVector d;
    for (std::size_t i = 0; i < rank(); ++i) d.push_back(S(i, i));
    return d;
  }
};

namespace detail {

// Reduces S in place. When Track is set, every row operation is mirrored on
// *U (and inversely on *Uinv) and every column operation on *V.
template <bool Track>
class SmithReducer {
 public:
  SmithReducer(IntMatrix& s, IntMatrix* u, IntMatrix* uinv, IntMatrix* v)
      : s_(s), u_(u), uinv_(uinv), v_(v) {}

  void run() {
    const std::size_t m = s_.rows();
    const std::size_t n = s_.cols();
    for (std::size_t t = 0; t < m && t < n; ++t) {
      std::size_t pi = 0, pj = 0;
      if (!smallest_entry(t, pi, pj)) return;
      swap_rows(t, pi);
      swap_cols(t, pj);
      for (;;) {
        bool clean = true;
        for (std::size_t i = t + 1; i < m; ++i) {
          if (s_(i, t) == 0) continue;
          add_row(i, t, -(s_(i, t) / s_(t, t)));
          if (s_(i, t) != 0) clean = false;
        }
        for (std::size_t j = t + 1; j < n; ++j) {
          if (s_(t, j) == 0) continue;
          add_col(j, t, -(s_(t, j) / s_(t, t)));
          if (s_(t, j) != 0) clean = false;
        }
        if (!clean) {
          repivot_cross(t);
          continue;
        }
        // Row and column are clear; enforce divisibility of the remainder.
        std::size_t bad_row = m;
        for (std::size_t i = t + 1; i < m && bad_row == m; ++i)
          for (std::size_t j = t + 1; j < n; ++j)
            if (s_(i, j) % s_(t, t) != 0) {
              bad_row = i;
              break;
            }
        if (bad_row == m) break;
        add_row(t, bad_row, 1);
      }
      if (s_(t, t) < 0) negate_row(t);
    }
  }

 private:
  // Smallest |entry| in the trailing block, ties broken by lowest (row, col).
  bool smallest_entry(std::size_t t, std::size_t& pi, std::size_t& pj) const {
    bool found = false;
    Integer best;
    for (std::size_t i = t; i < s_.rows(); ++i)
      for (std::size_t j = t; j < s_.cols(); ++j) {
        const Integer& x = s_(i, j);
        if (x == 0) continue;
        Integer a = abs_value(x);
        if (!found || a < best) {
          found = true;
          best = a;
          pi = i;
          pj = j;
        }
      }
    return found;
  }

  // Moves the smallest nonzero entry of row t / column t onto (t, t).
  void repivot_cross(std::size_t t) {
    std::size_t bi = t, bj = t;
    Integer best = abs_value(s_(t, t));
    for (std::size_t i = t + 1; i < s_.rows(); ++i)
      if (s_(i, t) != 0 && abs_value(s_(i, t)) < best) {
        best = abs_value(s_(i, t));
        bi = i;
        bj = t;
      }
    for (std::size_t j = t + 1; j < s_.cols(); ++j)
      if (s_(t, j) != 0 && abs_value(s_(t, j)) < best) {
        best = abs_value(s_(t, j));
        bi = t;
        bj = j;
      }
    swap_rows(t, bi);
    swap_cols(t, bj);
  }

  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    s_.swap_rows(a, b);
    if constexpr (Track) {
      u_->swap_rows(a, b);
      uinv_->swap_cols(a, b);
    }
  }
  void swap_cols(std::size_t a, std::size_t b) {
    if (a == b) return;
    s_.swap_cols(a, b);
    if constexpr (Track) v_->swap_cols(a, b);
  }
  // row[dst] += k * row[src]
  void add_row(std::size_t dst, std::size_t src, const Integer& k) {
    if (k == 0) return;
    s_.add_row_multiple(dst, src, k);
    if constexpr (Track) {
      u_->add_row_multiple(dst, src, k);
      uinv_->add_col_multiple(src, dst, -k);
    }
  }
  void add_col(std::size_t dst, std::size_t src, const Integer& k) {
    if (k == 0) return;
    s_.add_col_multiple(dst, src, k);
    if constexpr (Track) v_->add_col_multiple(dst, src, k);
  }
  void negate_row(std::size_t r) {
    s_.negate_row(r);
    if constexpr (Track) {
      u_->negate_row(r);
      uinv_->negate_col(r);
    }
  }

  IntMatrix& s_;
  IntMatrix* u_;
  IntMatrix* uinv_;
  IntMatrix* v_;
};

}  // namespace detail

/// Smallest-absolute-value pivoting with (row, col) tie-break; deterministic.
inline SmithDecomposition smith_normal_form(const IntMatrix& a) {
  SmithDecomposition d{IntMatrix::identity(a.rows()), a,
                       IntMatrix::identity(a.cols()),
                       IntMatrix::identity(a.rows())};
  detail::SmithReducer<true>(d.S, &d.U, &d.U_inverse, &d.V).run();
  return d;
}

/// Nonzero invariant factors only; skips the transform bookkeeping.
inline IntVector smith_diagonal(const IntMatrix& a) {
  IntMatrix s = a;
  detail::SmithReducer<false>(s, nullptr, nullptr, nullptr).run();
  IntVector d;
  for (std::size_t i = 0; i < s.rows() && i < s.cols() && s(i, i) != 0; ++i)
    d.push_back(s(i, i));
  return d;
}

/// Canonical (column Hermite) basis of the lattice spanned by the columns of
/// m. Lower echelon, positive pivots, entries left of a pivot reduced into
/// [0, pivot). Two generating sets give the same output iff they span the
/// same lattice.
inline IntMatrix hermite_column_basis(const IntMatrix& m) {
  IntMatrix w = m;
  const std::size_t rows = w.rows();
  const std::size_t cols = w.cols();
  std::size_t c = 0;
  for (std::size_t i = 0; i < rows && c < cols; ++i) {
    for (;;) {
      std::size_t best = cols;
      for (std::size_t k = c; k < cols; ++k)
        if (w(i, k) != 0 &&
            (best == cols || abs_value(w(i, k)) < abs_value(w(i, best))))
          best = k;
      if (best == cols) break;
      w.swap_cols(c, best);
      bool clean = true;
      for (std::size_t k = c + 1; k < cols; ++k) {
        if (w(i, k) == 0) continue;
        w.add_col_multiple(k, c, -(w(i, k) / w(i, c)));
        if (w(i, k) != 0) clean = false;
      }
      if (clean) break;
    }
    if (w(i, c) == 0) continue;
    if (w(i, c) < 0) w.negate_col(c);
    for (std::size_t k = 0; k < c; ++k)
      w.add_col_multiple(k, c, -floor_div(w(i, k), w(i, c)));
    ++c;
  }
  return w.block(0, rows, 0, c);
}

/// Basis (as columns, Hermite-canonical) of {x : A·x = 0}.
inline IntMatrix kernel_basis(const IntMatrix& a) {
  const SmithDecomposition d = smith_normal_form(a);
  const std::size_t r = d.rank();
  return hermite_column_basis(d.V.block(0, a.cols(), r, a.cols() - r));
}

/// Reusable solver for A·x = b over the integers.
class LatticeSolver {
 public:
  explicit LatticeSolver(const IntMatrix& a)
      : rows_(a.rows()), cols_(a.cols()), smith_(smith_normal_form(a)),
        rank_(smith_.rank()) {}

  std::size_t rank() const { return rank_; }

  std::optional<IntVector> solve(const IntVector& b) const {
    if (b.size() != rows_)
      throw InvalidInput("right-hand side length " + std::to_string(b.size()) +
                         " does not match " + std::to_string(rows_) + " rows");
    const IntVector c = smith_.U.apply(b);
    IntVector y(cols_, Integer(0));
    for (std::size_t i = 0; i < rows_; ++i) {
      if (i < rank_) {
        const Integer& di = smith_.S(i, i);
        if (c[i] % di != 0) return std::nullopt;
        y[i] = c[i] / di;
      } else if (c[i] != 0) {
        return std::nullopt;
      }
    }
    return smith_.V.apply(y);
  }

  bool in_image(const IntVector& b) const { return solve(b).has_value(); }

 private:
  std::size_t rows_;
  std::size_t cols_;
  SmithDecomposition smith_;
  std::size_t rank_;
};

/// x with A·x = b when b lies in the column lattice of A, else nullopt.
inline std::optional<IntVector> solve_in_image(const IntMatrix& a,
                                               const IntVector& b) {
  if (b.size() != a.rows())
    throw InvalidInput("solve_in_image: right-hand side has length " +
                       std::to_string(b.size()) + ", matrix has " +
                       std::to_string(a.rows()) + " rows");
  return LatticeSolver(a).solve(b);
}

}  // namespace picard
