// Dense matrices over the integers.
#pragma once

#include "picard/integer.hpp"

#include <algorithm>
#include <initializer_list>
#include <ostream>
#include <string>
#include <vector>

namespace picard {

/// Row-major dense integer matrix. Zero-sized dimensions are legal.
class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), entries_(rows * cols, Integer(0)) {}
  IntMatrix(std::size_t rows, std::size_t cols, std::vector<Integer> entries)
      : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (entries_.size() != rows_ * cols_)
      throw InvalidInput("matrix entry count does not match its shape");
  }
  /// Literal rows, e.g. IntMatrix{{1, 2}, {3, 4}}. Rows must be equally long.
  IntMatrix(std::initializer_list<std::initializer_list<long long>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    entries_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw InvalidInput("ragged matrix literal");
      for (long long x : r) entries_.emplace_back(x);
    }
  }

  static IntMatrix zero(std::size_t rows, std::size_t cols) {
    return IntMatrix(rows, cols);
  }
  static IntMatrix identity(std::size_t n) {
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }
  static IntMatrix scalar(std::size_t n, const Integer& k) {
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = k;
    return m;
  }
  static IntMatrix from_rows(const std::vector<IntVector>& rows,
                             std::size_t cols) {
    IntMatrix m(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != cols) throw InvalidInput("ragged matrix rows");
      for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
    }
    return m;
  }
  static IntMatrix from_columns(const std::vector<IntVector>& cols,
                                std::size_t rows) {
    IntMatrix m(rows, cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (cols[j].size() != rows) throw InvalidInput("ragged matrix columns");
      for (std::size_t i = 0; i < rows; ++i) m(i, j) = cols[j][i];
    }
    return m;
  }
  static IntMatrix column_vector(const IntVector& v) {
    return IntMatrix(v.size(), 1, v);
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const std::vector<Integer>& entries() const { return entries_; }

  Integer& operator()(std::size_t i, std::size_t j) {
    return entries_[i * cols_ + j];
  }
  const Integer& operator()(std::size_t i, std::size_t j) const {
    return entries_[i * cols_ + j];
  }

  IntVector row(std::size_t i) const {
    return IntVector(entries_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
                     entries_.begin() +
                         static_cast<std::ptrdiff_t>((i + 1) * cols_));
  }
  IntVector column(std::size_t j) const {
    IntVector c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }

  bool is_zero() const {
    return std::all_of(entries_.begin(), entries_.end(),
                       [](const Integer& x) { return x == 0; });
  }

  IntMatrix transpose() const {
    IntMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  IntVector apply(const IntVector& x) const {
    if (x.size() != cols_) throw InvalidInput("matrix-vector size mismatch");
    IntVector y(rows_, Integer(0));
    for (std::size_t j = 0; j < cols_; ++j) {
      if (x[j] == 0) continue;
      for (std::size_t i = 0; i < rows_; ++i) {
        const Integer& a = (*this)(i, j);
        if (a != 0) y[i] += a * x[j];
      }
    }
    return y;
  }

  /// Copy of rows [r0, r0+nr) and columns [c0, c0+nc).
  IntMatrix block(std::size_t r0, std::size_t nr, std::size_t c0,
                  std::size_t nc) const {
    if (r0 + nr > rows_ || c0 + nc > cols_)
      throw InvalidInput("matrix block out of range");
    IntMatrix b(nr, nc);
    for (std::size_t i = 0; i < nr; ++i)
      for (std::size_t j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
    return b;
  }

  void set_block(std::size_t r0, std::size_t c0, const IntMatrix& b) {
    if (r0 + b.rows() > rows_ || c0 + b.cols() > cols_)
      throw InvalidInput("matrix block out of range");
    for (std::size_t i = 0; i < b.rows(); ++i)
      for (std::size_t j = 0; j < b.cols(); ++j) (*this)(r0 + i, c0 + j) = b(i, j);
  }

  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t j = 0; j < cols_; ++j)
      std::swap((*this)(a, j), (*this)(b, j));
  }
  void swap_cols(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t i = 0; i < rows_; ++i)
      std::swap((*this)(i, a), (*this)(i, b));
  }
  /// row[dst] += k * row[src]
  void add_row_multiple(std::size_t dst, std::size_t src, const Integer& k) {
    if (k == 0) return;
    for (std::size_t j = 0; j < cols_; ++j) {
      const Integer& s = (*this)(src, j);
      if (s != 0) (*this)(dst, j) += k * s;
    }
  }
  /// col[dst] += k * col[src]
  void add_col_multiple(std::size_t dst, std::size_t src, const Integer& k) {
    if (k == 0) return;
    for (std::size_t i = 0; i < rows_; ++i) {
      const Integer& s = (*this)(i, src);
      if (s != 0) (*this)(i, dst) += k * s;
    }
  }
  void negate_row(std::size_t r) {
    for (std::size_t j = 0; j < cols_; ++j) (*this)(r, j) = -(*this)(r, j);
  }
  void negate_col(std::size_t c) {
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, c) = -(*this)(i, c);
  }

  friend bool operator==(const IntMatrix& a, const IntMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.entries_ == b.entries_;
  }
  friend bool operator!=(const IntMatrix& a, const IntMatrix& b) {
    return !(a == b);
  }

  friend IntMatrix operator+(const IntMatrix& a, const IntMatrix& b) {
    a.require_same_shape(b);
    IntMatrix r = a;
    for (std::size_t k = 0; k < r.entries_.size(); ++k) r.entries_[k] += b.entries_[k];
    return r;
  }
  friend IntMatrix operator-(const IntMatrix& a, const IntMatrix& b) {
    a.require_same_shape(b);
    IntMatrix r = a;
    for (std::size_t k = 0; k < r.entries_.size(); ++k) r.entries_[k] -= b.entries_[k];
    return r;
  }
  friend IntMatrix operator-(const IntMatrix& a) {
    IntMatrix r = a;
    for (auto& x : r.entries_) x = -x;
    return r;
  }
  friend IntMatrix operator*(const Integer& k, const IntMatrix& a) {
    IntMatrix r = a;
    for (auto& x : r.entries_) x *= k;
    return r;
  }
  friend IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
    if (a.cols_ != b.rows_) throw InvalidInput("matrix product shape mismatch");
    IntMatrix r(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const Integer& x = a(i, k);
        if (x == 0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) {
          const Integer& y = b(k, j);
          if (y != 0) r(i, j) += x * y;
        }
      }
    return r;
  }

  friend std::ostream& operator<<(std::ostream& os, const IntMatrix& m) {
    os << '[';
    for (std::size_t i = 0; i < m.rows_; ++i) {
      os << (i ? ", [" : "[");
      for (std::size_t j = 0; j < m.cols_; ++j) os << (j ? ", " : "") << m(i, j);
      os << ']';
    }
    return os << ']';
  }

 private:
  void require_same_shape(const IntMatrix& b) const {
    if (rows_ != b.rows_ || cols_ != b.cols_)
      throw InvalidInput("matrix shape mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Integer> entries_;
};

inline IntMatrix hstack(const IntMatrix& a, const IntMatrix& b) {
  if (a.rows() != b.rows()) throw InvalidInput("hstack row mismatch");
  IntMatrix r(a.rows(), a.cols() + b.cols());
  r.set_block(0, 0, a);
  r.set_block(0, a.cols(), b);
  return r;
}

inline IntMatrix vstack(const IntMatrix& a, const IntMatrix& b) {
  if (a.cols() != b.cols()) throw InvalidInput("vstack column mismatch");
  IntMatrix r(a.rows() + b.rows(), a.cols());
  r.set_block(0, 0, a);
  r.set_block(a.rows(), 0, b);
  return r;
}

inline IntMatrix block_diagonal(const IntMatrix& a, const IntMatrix& b) {
  IntMatrix r(a.rows() + b.rows(), a.cols() + b.cols());
  r.set_block(0, 0, a);
  r.set_block(a.rows(), a.cols(), b);
  return r;
}

/// Kronecker product a ⊗ b.
inline IntMatrix kronecker(const IntMatrix& a, const IntMatrix& b) {
  IntMatrix r(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const Integer& x = a(i, j);
      if (x == 0) continue;
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l)
          if (b(k, l) != 0) r(i * b.rows() + k, j * b.cols() + l) = x * b(k, l);
    }
  return r;
}

/// Fraction-free Bareiss determinant.
inline Integer determinant(IntMatrix m) {
  if (m.rows() != m.cols()) throw InvalidInput("determinant of non-square matrix");
  const std::size_t n = m.rows();
  if (n == 0) return 1;
  Integer sign = 1;
  Integer prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m(k, k) == 0) {
      std::size_t p = k + 1;
      while (p < n && m(p, k) == 0) ++p;
      if (p == n) return 0;
      m.swap_rows(k, p);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j)
        m(i, j) = (m(i, j) * m(k, k) - m(i, k) * m(k, j)) / prev;
    prev = m(k, k);
  }
  return sign * m(n - 1, n - 1);
}

}  // namespace picard
