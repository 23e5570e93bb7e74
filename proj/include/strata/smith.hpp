#pragma once

#include "strata/matrix.hpp"

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace strata {

// Smith normal form U*M*V = D with U, V unimodular (det +-1; over Q the
// same elementary operations are used, so dets stay +-1 there too) and D
// diagonal with d1 | d2 | ... | dk >= 0, trailing zeros last. Inverses of
// U and V are tracked alongside, since most lattice computations need
// them.
template <class R>
struct SmithDecomposition {
  Matrix<R> U, U_inv;
  Matrix<R> D;
  Matrix<R> V, V_inv;
  std::size_t source_rows = 0, source_cols = 0;
  std::size_t rank = 0;

  typename R::Scalar diag(std::size_t i) const { return D(i, i); }
};

namespace detail {

// Pivot rule: smallest nonzero absolute value in the trailing block, ties
// broken by lowest (row, col). Deterministic U, V, D across runs.
template <class R>
bool find_pivot(const Matrix<R>& D, std::size_t t, std::size_t& pi, std::size_t& pj) {
  using Scalar = typename R::Scalar;
  bool found = false;
  Scalar best{};
  for (std::size_t i = t; i < D.rows(); ++i)
    for (std::size_t j = t; j < D.cols(); ++j) {
      if (D(i, j) == 0) continue;
      Scalar a = ring_abs(D(i, j));
      if (!found || a < best) {
        found = true;
        best = a;
        pi = i;
        pj = j;
      }
    }
  return found;
}

}  // namespace detail

template <class R>
SmithDecomposition<R> smith_normal_form(const Matrix<R>& M) {
  using Scalar = typename R::Scalar;
  SmithDecomposition<R> s;
  s.source_rows = M.rows();
  s.source_cols = M.cols();
  s.U = Matrix<R>::identity(M.rows());
  s.U_inv = Matrix<R>::identity(M.rows());
  s.V = Matrix<R>::identity(M.cols());
  s.V_inv = Matrix<R>::identity(M.cols());
  s.D = M;

  auto row_op = [&s](std::size_t i, std::size_t j, const Scalar& q) {
    // D <- E D, U <- E U, U_inv <- U_inv E^{-1}
    s.D.add_row_multiple(i, j, q);
    s.U.add_row_multiple(i, j, q);
    s.U_inv.add_col_multiple(j, i, -q);
  };
  auto col_op = [&s](std::size_t i, std::size_t j, const Scalar& q) {
    s.D.add_col_multiple(i, j, q);
    s.V.add_col_multiple(i, j, q);
    s.V_inv.add_row_multiple(j, i, -q);
  };
  auto row_swap = [&s](std::size_t i, std::size_t j) {
    if (i == j) return;
    s.D.swap_rows(i, j);
    s.U.swap_rows(i, j);
    s.U_inv.swap_cols(i, j);
  };
  auto col_swap = [&s](std::size_t i, std::size_t j) {
    if (i == j) return;
    s.D.swap_cols(i, j);
    s.V.swap_cols(i, j);
    s.V_inv.swap_rows(i, j);
  };
  auto row_negate = [&s](std::size_t i) {
    s.D.negate_row(i);
    s.U.negate_row(i);
    s.U_inv.negate_col(i);
  };

  std::size_t limit = std::min(M.rows(), M.cols());
  for (std::size_t t = 0; t < limit; ++t) {
    std::size_t pi = t, pj = t;
    if (!detail::find_pivot(s.D, t, pi, pj)) break;
    row_swap(t, pi);
    col_swap(t, pj);

    for (;;) {
      // Clear column t below the pivot, then row t right of it. Imperfect
      // reductions move a smaller remainder into play; reselect and retry.
      bool dirty = false;
      for (std::size_t i = t + 1; i < s.D.rows(); ++i) {
        if (s.D(i, t) == 0) continue;
        Scalar q = reduction_quotient(s.D(i, t), s.D(t, t));
        row_op(i, t, q);
        if (s.D(i, t) != 0) dirty = true;
      }
      for (std::size_t j = t + 1; j < s.D.cols(); ++j) {
        if (s.D(t, j) == 0) continue;
        Scalar q = reduction_quotient(s.D(t, j), s.D(t, t));
        col_op(j, t, q);
        if (s.D(t, j) != 0) dirty = true;
      }
      if (dirty) {
        std::size_t qi = t, qj = t;
        detail::find_pivot(s.D, t, qi, qj);
        row_swap(t, qi);
        col_swap(t, qj);
        continue;
      }
      if (!R::is_field) {
        // Divisibility fix-up: absorb a non-divisible entry into row t.
        bool fixed = true;
        for (std::size_t i = t + 1; i < s.D.rows() && fixed; ++i)
          for (std::size_t j = t + 1; j < s.D.cols() && fixed; ++j)
            if (!ring_divides(s.D(t, t), s.D(i, j))) {
              row_op(t, i, Scalar(-1));
              fixed = false;
            }
        if (!fixed) continue;
      }
      break;
    }
    if (s.D(t, t) < 0) row_negate(t);
    ++s.rank;
  }
  return s;
}

// Solve M x = b exactly in the ring (over Z this demands an integral
// solution). Returns nullopt when none exists.
template <class R>
std::optional<Matrix<R>> solve_in_span(const SmithDecomposition<R>& s, const Matrix<R>& b) {
  using Scalar = typename R::Scalar;
  if (b.rows() != s.source_rows || b.cols() != 1)
    throw std::invalid_argument("solve_in_span: shape mismatch");
  Matrix<R> c = s.U * b;
  Matrix<R> y(s.source_cols, 1);
  std::size_t limit = std::min(s.source_rows, s.source_cols);
  for (std::size_t i = 0; i < limit; ++i) {
    Scalar d = s.D(i, i);
    if (d == 0) {
      if (c(i, 0) != 0) return std::nullopt;
    } else {
      if (!ring_divides(d, c(i, 0))) return std::nullopt;
      y(i, 0) = c(i, 0) / d;
    }
  }
  for (std::size_t i = limit; i < s.source_rows; ++i)
    if (c(i, 0) != 0) return std::nullopt;
  return s.V * y;
}

template <class R>
std::optional<Matrix<R>> solve_in_span(const Matrix<R>& M, const Matrix<R>& b) {
  return solve_in_span(smith_normal_form(M), b);
}

// Column-wise solve M X = B.
template <class R>
std::optional<Matrix<R>> solve_matrix(const Matrix<R>& M, const Matrix<R>& B) {
  if (B.rows() != M.rows()) throw std::invalid_argument("solve_matrix: shape mismatch");
  auto s = smith_normal_form(M);
  Matrix<R> X(M.cols(), B.cols());
  for (std::size_t j = 0; j < B.cols(); ++j) {
    auto x = solve_in_span(s, B.col(j));
    if (!x) return std::nullopt;
    X.set_col(j, *x);
  }
  return X;
}

template <class R>
bool in_column_span(const Matrix<R>& M, const Matrix<R>& b) {
  return solve_in_span(M, b).has_value();
}

// Basis of {x : M x = 0}. Over Z this is a basis of the (saturated)
// kernel lattice; the zero-diagonal columns of V provide one.
template <class R>
Matrix<R> kernel_basis(const Matrix<R>& M) {
  auto s = smith_normal_form(M);
  std::size_t k = s.source_cols - s.rank;
  return s.V.block(0, s.rank, s.source_cols, k);
}

// Basis of the column span of G (a lattice over Z, a subspace over Q):
// from U G V = D, the nonzero columns of U^{-1} D span the same columns.
template <class R>
Matrix<R> column_span_basis(const Matrix<R>& G) {
  auto s = smith_normal_form(G);
  Matrix<R> B(G.rows(), s.rank);
  for (std::size_t t = 0; t < s.rank; ++t) {
    for (std::size_t i = 0; i < G.rows(); ++i) B(i, t) = s.U_inv(i, t) * s.D(t, t);
  }
  return B;
}

template <class R>
std::size_t matrix_rank(const Matrix<R>& M) {
  return smith_normal_form(M).rank;
}

// Basis of {x : F x lies in the column span of L}.
template <class R>
Matrix<R> preimage_basis(const Matrix<R>& F, const Matrix<R>& L) {
  if (F.rows() != L.rows()) throw std::invalid_argument("preimage_basis: row mismatch");
  Matrix<R> FL = Matrix<R>::hstack(F, L);
  Matrix<R> K = kernel_basis(FL);
  Matrix<R> X = K.block(0, 0, F.cols(), K.cols());
  return column_span_basis(X);
}

}  // namespace strata
