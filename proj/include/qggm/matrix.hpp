#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace qggm {

/// Dense row-major matrix of doubles.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  /// Takes ownership of `data`; throws ValidationError on a length mismatch
  /// or a non-finite entry.
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::vector<double> col(std::size_t c) const;

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  DenseMatrix transpose() const;
  bool all_finite() const;
  bool is_symmetric() const;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator*(double s, const DenseMatrix& a);

/// S = YᵀY. Exactly symmetric: the upper triangle is computed once and mirrored.
class GramMatrix {
 public:
  std::size_t p() const { return s_.rows(); }
  double operator()(std::size_t k, std::size_t j) const { return s_(k, j); }
  std::span<const double> row(std::size_t k) const { return s_.row(k); }
  const DenseMatrix& matrix() const { return s_; }

 private:
  explicit GramMatrix(DenseMatrix s) : s_(std::move(s)) {}
  friend GramMatrix gram(const DenseMatrix& y);
  DenseMatrix s_;
};

GramMatrix gram(const DenseMatrix& y);

/// Gibbs state for Ω: a fixed positive diagonal plus an off-diagonal part that
/// need not be symmetric. offdiag(i, i) is always zero.
class PrecisionDraw {
 public:
  PrecisionDraw() = default;
  /// Zero off-diagonal with the given diagonal.
  explicit PrecisionDraw(std::vector<double> diag);
  PrecisionDraw(std::vector<double> diag, DenseMatrix offdiag);

  std::size_t p() const { return diag_.size(); }
  double diag(std::size_t i) const { return diag_[i]; }
  std::span<const double> diag() const { return diag_; }
  double offdiag(std::size_t r, std::size_t c) const { return offdiag_(r, c); }
  const DenseMatrix& offdiag() const { return offdiag_; }

  /// Requires r != c.
  void set_offdiag(std::size_t r, std::size_t c, double value);

  /// Full p×p matrix, diagonal included.
  DenseMatrix to_dense() const;

 private:
  std::vector<double> diag_;
  DenseMatrix offdiag_;
};

}  // namespace qggm
