#pragma once

#include "strata/rings.hpp"

#include <cstddef>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace strata {

// Dense matrix over an exact coefficient ring, row-major storage.
// 0xn and nx0 matrices are valid and show up constantly (empty relation
// sets, trivial groups), so every routine must tolerate them.
template <class R>
class Matrix {
 public:
  using Ring = R;
  using Scalar = typename R::Scalar;

  Matrix() : rows_(0), cols_(0) {}
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  static Matrix from_rows(std::initializer_list<std::initializer_list<long long>> rows) {
    std::size_t r = rows.size();
    std::size_t c = r == 0 ? 0 : rows.begin()->size();
    Matrix m(r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
      if (row.size() != c) throw std::invalid_argument("ragged row list");
      std::size_t j = 0;
      for (long long v : row) m(i, j++) = v;
      ++i;
    }
    return m;
  }

  static Matrix column(const std::vector<Scalar>& entries) {
    Matrix m(entries.size(), 1);
    for (std::size_t i = 0; i < entries.size(); ++i) m(i, 0) = entries[i];
    return m;
  }

  static Matrix basis_column(std::size_t n, std::size_t i) {
    Matrix m(n, 1);
    m(i, 0) = 1;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Scalar& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Scalar& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  bool operator==(const Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }
  bool operator!=(const Matrix& o) const { return !(*this == o); }

  bool is_zero() const {
    for (const auto& v : data_)
      if (v != 0) return false;
    return true;
  }

  bool is_identity() const {
    if (rows_ != cols_) return false;
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j)
        if ((*this)(i, j) != Scalar(i == j ? 1 : 0)) return false;
    return true;
  }

  Matrix operator*(const Matrix& o) const {
    if (cols_ != o.rows_) throw std::invalid_argument("matrix product shape mismatch");
    Matrix out(rows_, o.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t k = 0; k < cols_; ++k) {
        const Scalar& a = (*this)(i, k);
        if (a == 0) continue;
        for (std::size_t j = 0; j < o.cols_; ++j) out(i, j) += a * o(k, j);
      }
    return out;
  }

  Matrix operator+(const Matrix& o) const {
    require_same_shape(o, "sum");
    Matrix out(rows_, cols_);
    for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] = data_[i] + o.data_[i];
    return out;
  }

  Matrix operator-(const Matrix& o) const {
    require_same_shape(o, "difference");
    Matrix out(rows_, cols_);
    for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] = data_[i] - o.data_[i];
    return out;
  }

  Matrix operator-() const {
    Matrix out(rows_, cols_);
    for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] = -data_[i];
    return out;
  }

  Matrix operator*(const Scalar& s) const {
    Matrix out(rows_, cols_);
    for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] = data_[i] * s;
    return out;
  }

  Matrix transposed() const {
    Matrix out(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
    return out;
  }

  Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    if (r0 + nr > rows_ || c0 + nc > cols_) throw std::out_of_range("block out of range");
    Matrix out(nr, nc);
    for (std::size_t i = 0; i < nr; ++i)
      for (std::size_t j = 0; j < nc; ++j) out(i, j) = (*this)(r0 + i, c0 + j);
    return out;
  }

  Matrix col(std::size_t j) const { return block(0, j, rows_, 1); }

  void set_col(std::size_t j, const Matrix& v) {
    if (v.rows() != rows_ || v.cols() != 1) throw std::invalid_argument("set_col shape");
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v(i, 0);
  }

  static Matrix hstack(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) throw std::invalid_argument("hstack row mismatch");
    Matrix out(a.rows(), a.cols() + b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
      for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j);
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, a.cols() + j) = b(i, j);
    }
    return out;
  }

  static Matrix vstack(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) throw std::invalid_argument("vstack col mismatch");
    Matrix out(a.rows() + b.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j);
    for (std::size_t i = 0; i < b.rows(); ++i)
      for (std::size_t j = 0; j < b.cols(); ++j) out(a.rows() + i, j) = b(i, j);
    return out;
  }

  static Matrix block_diag(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() + b.rows(), a.cols() + b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j);
    for (std::size_t i = 0; i < b.rows(); ++i)
      for (std::size_t j = 0; j < b.cols(); ++j) out(a.rows() + i, a.cols() + j) = b(i, j);
    return out;
  }

  void swap_rows(std::size_t i, std::size_t j) {
    for (std::size_t c = 0; c < cols_; ++c) std::swap((*this)(i, c), (*this)(j, c));
  }
  void swap_cols(std::size_t i, std::size_t j) {
    for (std::size_t r = 0; r < rows_; ++r) std::swap((*this)(r, i), (*this)(r, j));
  }
  // row_i -= q * row_j
  void add_row_multiple(std::size_t i, std::size_t j, const Scalar& q) {
    if (q == 0) return;
    for (std::size_t c = 0; c < cols_; ++c) (*this)(i, c) -= q * (*this)(j, c);
  }
  void add_col_multiple(std::size_t i, std::size_t j, const Scalar& q) {
    if (q == 0) return;
    for (std::size_t r = 0; r < rows_; ++r) (*this)(r, i) -= q * (*this)(r, j);
  }
  void negate_row(std::size_t i) {
    for (std::size_t c = 0; c < cols_; ++c) (*this)(i, c) = -(*this)(i, c);
  }
  void negate_col(std::size_t j) {
    for (std::size_t r = 0; r < rows_; ++r) (*this)(r, j) = -(*this)(r, j);
  }

  // One matrix per line as a bracketed row, e.g. "[1 0 -2]".
  std::string to_string() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < rows_; ++i) {
      os << '[';
      for (std::size_t j = 0; j < cols_; ++j) {
        if (j) os << ' ';
        os << scalar_to_string((*this)(i, j));
      }
      os << ']';
      if (i + 1 < rows_) os << '\n';
    }
    if (rows_ == 0) os << "[]";
    return os.str();
  }

 private:
  void require_same_shape(const Matrix& o, const char* what) const {
    if (rows_ != o.rows_ || cols_ != o.cols_)
      throw std::invalid_argument(std::string("matrix ") + what + " shape mismatch");
  }

  std::size_t rows_, cols_;
  std::vector<Scalar> data_;
};

using ZMatrix = Matrix<ZRing>;
using QMatrix = Matrix<QRing>;

inline QMatrix to_rational(const ZMatrix& m) {
  QMatrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = Rat(m(i, j));
  return out;
}

inline QMatrix to_rational(const QMatrix& m) { return m; }

}  // namespace strata
