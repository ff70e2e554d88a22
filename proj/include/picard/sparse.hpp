// Sparse integer matrices and invariant factors by unit-pivot elimination.
//
// The resolution complexes have thousands of generators but only a handful of
// nonzeros per column, almost all of them ±1. Unit pivots are eliminated
// sparsely (Markowitz-style choice); whatever remains goes through dense SNF.
#pragma once

#include "picard/smith.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

namespace picard {

class SparseMatrix {
 public:
  using Entry = std::pair<std::uint32_t, Integer>;

  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), columns_(cols) {}

  static SparseMatrix from_dense(const IntMatrix& m) {
    SparseMatrix s(m.rows(), m.cols());
    for (std::size_t j = 0; j < m.cols(); ++j)
      for (std::size_t i = 0; i < m.rows(); ++i)
        if (m(i, j) != 0) s.columns_[j].emplace_back(static_cast<std::uint32_t>(i), m(i, j));
    return s;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  /// Column j as sorted (row, value) pairs without zeros.
  const std::vector<Entry>& column(std::size_t j) const { return columns_[j]; }

  /// Replaces column j by the accumulated map (zeros dropped).
  void set_column(std::size_t j, const std::map<std::uint32_t, Integer>& col) {
    auto& c = columns_[j];
    c.clear();
    for (const auto& [r, v] : col) {
      if (r >= rows_) throw InvalidInput("sparse row index out of range");
      if (v != 0) c.emplace_back(r, v);
    }
  }

  std::size_t nonzeros() const {
    std::size_t n = 0;
    for (const auto& c : columns_) n += c.size();
    return n;
  }

  IntMatrix to_dense() const {
    IntMatrix m(rows_, cols_);
    for (std::size_t j = 0; j < cols_; ++j)
      for (const auto& [r, v] : columns_[j]) m(r, j) = v;
    return m;
  }

  /// this · other
  SparseMatrix multiply(const SparseMatrix& other) const {
    if (cols_ != other.rows_) throw InvalidInput("sparse product shape mismatch");
    SparseMatrix r(rows_, other.cols_);
    for (std::size_t j = 0; j < other.cols_; ++j) {
      std::map<std::uint32_t, Integer> acc;
      for (const auto& [k, b] : other.columns_[j])
        for (const auto& [i, a] : columns_[k]) acc[i] += a * b;
      r.set_column(j, acc);
    }
    return r;
  }

  bool is_zero() const {
    for (const auto& c : columns_)
      if (!c.empty()) return false;
    return true;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::vector<Entry>> columns_;
};

/// Rank and nonzero invariant factors (d1 | d2 | ...) of a sparse matrix.
struct InvariantFactors {
  std::size_t rank = 0;
  /// Invariant factors greater than one, ascending.
  IntVector torsion;
};

inline InvariantFactors invariant_factors(const SparseMatrix& a) {
  using Row = std::vector<SparseMatrix::Entry>;
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();

  std::vector<Row> rows(m);
  for (std::size_t j = 0; j < n; ++j)
    for (const auto& [i, v] : a.column(j))
      rows[i].emplace_back(static_cast<std::uint32_t>(j), v);
  // Columns were scanned in order, so each row is already sorted.

  std::vector<std::vector<std::uint32_t>> col_rows(n);
  std::vector<std::size_t> col_count(n, 0);
  for (std::size_t i = 0; i < m; ++i)
    for (const auto& e : rows[i]) {
      col_rows[e.first].push_back(static_cast<std::uint32_t>(i));
      ++col_count[e.first];
    }
  std::vector<char> row_alive(m, 1);

  auto find_in_row = [](const Row& row, std::uint32_t c) -> const Integer* {
    auto it = std::lower_bound(
        row.begin(), row.end(), c,
        [](const SparseMatrix::Entry& e, std::uint32_t key) { return e.first < key; });
    if (it == row.end() || it->first != c) return nullptr;
    return &it->second;
  };

  InvariantFactors out;
  Row merged;
  for (;;) {
    // Unit pivot with least Markowitz cost.
    std::size_t best_row = m;
    std::uint32_t best_col = 0;
    std::size_t best_cost = 0;
    for (std::size_t i = 0; i < m; ++i) {
      if (!row_alive[i] || rows[i].empty()) continue;
      const std::size_t rlen = rows[i].size() - 1;
      for (const auto& [c, v] : rows[i]) {
        if (!is_unit(v)) continue;
        const std::size_t cost = rlen * (col_count[c] - 1);
        if (best_row == m || cost < best_cost) {
          best_row = i;
          best_col = c;
          best_cost = cost;
        }
      }
      if (best_row != m && best_cost == 0) break;
    }
    if (best_row == m) break;

    const Row pivot_row = rows[best_row];
    const Integer unit = *find_in_row(pivot_row, best_col);
    row_alive[best_row] = 0;
    for (const auto& e : pivot_row) --col_count[e.first];

    std::vector<std::uint32_t> targets;
    for (std::uint32_t r : col_rows[best_col])
      if (row_alive[r] && find_in_row(rows[r], best_col) != nullptr) targets.push_back(r);
    std::sort(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end()), targets.end());

    for (std::uint32_t r : targets) {
      Row& row = rows[r];
      const Integer factor = *find_in_row(row, best_col) * unit;  // a / unit
      merged.clear();
      merged.reserve(row.size() + pivot_row.size());
      std::size_t p = 0, q = 0;
      while (p < row.size() || q < pivot_row.size()) {
        if (q == pivot_row.size() ||
            (p < row.size() && row[p].first < pivot_row[q].first)) {
          merged.push_back(std::move(row[p]));
          ++p;
        } else if (p == row.size() || pivot_row[q].first < row[p].first) {
          const std::uint32_t c = pivot_row[q].first;
          merged.emplace_back(c, -factor * pivot_row[q].second);
          ++col_count[c];
          col_rows[c].push_back(r);
          ++q;
        } else {
          const std::uint32_t c = row[p].first;
          Integer v = row[p].second - factor * pivot_row[q].second;
          if (v != 0)
            merged.emplace_back(c, std::move(v));
          else
            --col_count[c];
          ++p;
          ++q;
        }
      }
      row.swap(merged);
    }
    col_rows[best_col].clear();
    ++out.rank;
  }

  // Dense remainder.
  std::vector<std::size_t> live_rows;
  std::map<std::uint32_t, std::size_t> live_cols;
  for (std::size_t i = 0; i < m; ++i) {
    if (!row_alive[i] || rows[i].empty()) continue;
    live_rows.push_back(i);
    for (const auto& e : rows[i]) live_cols.emplace(e.first, 0);
  }
  if (!live_rows.empty()) {
    std::size_t k = 0;
    for (auto& [c, idx] : live_cols) idx = k++;
    IntMatrix rest(live_rows.size(), live_cols.size());
    for (std::size_t i = 0; i < live_rows.size(); ++i)
      for (const auto& [c, v] : rows[live_rows[i]]) rest(i, live_cols[c]) = v;
    for (const auto& d : smith_diagonal(rest)) {
      ++out.rank;
      if (d != 1) out.torsion.push_back(d);
    }
  }
  return out;
}

}  // namespace picard
