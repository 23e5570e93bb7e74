#pragma once

// Brute-force oracles for the exact linear algebra, independent of the
// elimination code under test. Invariant factors come from gcds of k x k
// minors, ranks and determinants from cofactor expansion; nothing here
// touches the Smith machinery.

#include "strata/matrix.hpp"

#include <vector>

namespace oracle {

using strata::Int;
using strata::ZMatrix;

inline Int det_cofactor(const ZMatrix& m) {
  const std::size_t n = m.rows();
  if (n != m.cols()) throw std::invalid_argument("det of nonsquare matrix");
  if (n == 0) return 1;
  if (n == 1) return m(0, 0);
  Int acc = 0;
  for (std::size_t j = 0; j < n; ++j) {
    if (m(0, j) == 0) continue;
    ZMatrix minor(n - 1, n - 1);
    for (std::size_t i = 1; i < n; ++i) {
      std::size_t cc = 0;
      for (std::size_t c = 0; c < n; ++c) {
        if (c == j) continue;
        minor(i - 1, cc++) = m(i, c);
      }
    }
    Int term = m(0, j) * det_cofactor(minor);
    acc += (j % 2 == 0) ? term : Int(-term);
  }
  return acc;
}

// All k-subsets of {0..n-1} in lexicographic order.
inline std::vector<std::vector<std::size_t>> subsets(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> cur;
  auto rec = [&](auto&& self, std::size_t start) -> void {
    if (cur.size() == k) {
      out.push_back(cur);
      return;
    }
    for (std::size_t i = start; i < n; ++i) {
      cur.push_back(i);
      self(self, i + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

// gcd of all k x k minors (0 when every minor vanishes).
inline Int minor_gcd(const ZMatrix& m, std::size_t k) {
  if (k == 0) return 1;
  Int g = 0;
  for (const auto& rs : subsets(m.rows(), k))
    for (const auto& cs : subsets(m.cols(), k)) {
      ZMatrix sub(k, k);
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) sub(i, j) = m(rs[i], cs[j]);
      g = gcd(g, det_cofactor(sub));
      if (g == 1) return 1;
    }
  return g < 0 ? Int(-g) : g;
}

inline std::size_t rank_by_minors(const ZMatrix& m) {
  std::size_t lim = std::min(m.rows(), m.cols());
  std::size_t r = 0;
  for (std::size_t k = 1; k <= lim; ++k) {
    if (minor_gcd(m, k) == 0) break;
    r = k;
  }
  return r;
}

// Full diagonal of the Smith form (including unit entries, excluding the
// trailing zeros): d_k = g_k / g_{k-1}.
inline std::vector<Int> smith_diagonal(const ZMatrix& m) {
  std::vector<Int> out;
  Int prev = 1;
  std::size_t lim = std::min(m.rows(), m.cols());
  for (std::size_t k = 1; k <= lim; ++k) {
    Int g = minor_gcd(m, k);
    if (g == 0) break;
    out.push_back(g / prev);
    prev = g;
  }
  return out;
}

// Nontrivial invariant factors only, as cached by the group layer.
inline std::vector<Int> invariant_factors(const ZMatrix& m) {
  std::vector<Int> out;
  for (const Int& d : smith_diagonal(m))
    if (d != 1) out.push_back(d);
  return out;
}

}  // namespace oracle
