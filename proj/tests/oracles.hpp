// Independent reference computations used by the tests. Nothing here calls
// the Smith-form engine; everything is brute force or textbook formula.
#pragma once

#include "picard/int_matrix.hpp"

#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <vector>

namespace oracle {

using picard::Integer;
using picard::IntMatrix;
using picard::IntVector;

inline IntMatrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols,
                               int bound) {
  std::uniform_int_distribution<int> dist(-bound, bound);
  IntMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = dist(rng);
  return m;
}

inline bool is_smith_shape(const IntMatrix& s) {
  for (std::size_t i = 0; i < s.rows(); ++i)
    for (std::size_t j = 0; j < s.cols(); ++j)
      if (i != j && s(i, j) != 0) return false;
  const std::size_t n = std::min(s.rows(), s.cols());
  for (std::size_t i = 0; i < n; ++i) {
    if (s(i, i) < 0) return false;
    if (i + 1 < n) {
      const Integer& a = s(i, i);
      const Integer& b = s(i + 1, i + 1);
      if (a == 0 ? b != 0 : b % a != 0) return false;
    }
  }
  return true;
}

/// Determinant by cofactor expansion along the first row.
inline Integer cofactor_det(const IntMatrix& m) {
  const std::size_t n = m.rows();
  if (n == 0) return 1;
  if (n == 1) return m(0, 0);
  if (n == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  Integer sum = 0;
  for (std::size_t j = 0; j < n; ++j) {
    if (m(0, j) == 0) continue;
    IntMatrix minor(n - 1, n - 1);
    for (std::size_t i = 1; i < n; ++i)
      for (std::size_t k = 0, c = 0; k < n; ++k)
        if (k != j) minor(i - 1, c++) = m(i, k);
    const Integer term = m(0, j) * cofactor_det(minor);
    sum += (j % 2 == 0) ? term : Integer(-term);
  }
  return sum;
}

inline void subsets(std::size_t n, std::size_t k, std::vector<std::vector<std::size_t>>& out,
                    std::vector<std::size_t>& cur, std::size_t start = 0) {
  if (cur.size() == k) {
    out.push_back(cur);
    return;
  }
  for (std::size_t i = start; i < n; ++i) {
    cur.push_back(i);
    subsets(n, k, out, cur, i + 1);
    cur.pop_back();
  }
}

/// d_k = g_k / g_{k-1}, where g_k is the gcd of all k×k minors.
inline IntVector invariant_factors_by_minors(const IntMatrix& a) {
  IntVector out;
  Integer prev = 1;
  const std::size_t n = std::min(a.rows(), a.cols());
  for (std::size_t k = 1; k <= n; ++k) {
    std::vector<std::vector<std::size_t>> rs, cs;
    std::vector<std::size_t> cur;
    subsets(a.rows(), k, rs, cur);
    subsets(a.cols(), k, cs, cur);
    Integer g = 0;
    for (const auto& r : rs)
      for (const auto& c : cs) {
        IntMatrix m(k, k);
        for (std::size_t i = 0; i < k; ++i)
          for (std::size_t j = 0; j < k; ++j) m(i, j) = a(r[i], c[j]);
        g = boost::multiprecision::gcd(g, boost::multiprecision::abs(cofactor_det(m)));
      }
    if (g == 0) break;
    out.push_back(g / prev);
    prev = g;
  }
  return out;
}

/// A finite abelian group given as a product of cyclic groups Z/m_i; elements
/// are residue tuples. Small enough to enumerate.
struct FiniteGroup {
  std::vector<long> moduli;

  long order() const {
    long n = 1;
    for (long m : moduli) n *= m;
    return n;
  }
  std::vector<std::vector<long>> elements() const {
    std::vector<std::vector<long>> out{{}};
    for (long m : moduli) {
      std::vector<std::vector<long>> next;
      for (const auto& e : out)
        for (long r = 0; r < m; ++r) {
          auto f = e;
          f.push_back(r);
          next.push_back(f);
        }
      out = next;
    }
    return out;
  }
};

/// |Hom(Z/a1 + ..., Z/b1 + ...)| by enumerating generator images and testing
/// that each image has order dividing the source modulus.
inline long count_homs(const FiniteGroup& src, const FiniteGroup& dst) {
  const auto elems = dst.elements();
  long total = 1;
  for (long a : src.moduli) {
    long ok = 0;
    for (const auto& e : elems) {
      bool fine = true;
      for (std::size_t i = 0; i < e.size(); ++i)
        if ((a * e[i]) % dst.moduli[i] != 0) fine = false;
      if (fine) ++ok;
    }
    total *= ok;
  }
  return total;
}

/// Sizes of the subgroups k·G for k = 1..order; two finite abelian groups are
/// isomorphic iff these sequences agree for every k (counts of elements of
/// each order determine the group).
inline std::vector<long> order_profile(const FiniteGroup& g) {
  const long n = g.order();
  std::vector<long> profile;
  for (long k = 1; k <= n; ++k) {
    std::set<std::vector<long>> seen;
    for (const auto& e : g.elements()) {
      auto f = e;
      for (std::size_t i = 0; i < f.size(); ++i) f[i] = (k * f[i]) % g.moduli[i];
      seen.insert(f);
    }
    profile.push_back(static_cast<long>(seen.size()));
  }
  return profile;
}

}  // namespace oracle
