#include "qggm/matrix.hpp"

#include <cmath>
#include <string>

#include "qggm/errors.hpp"

namespace qggm {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {
  if (!std::isfinite(fill)) throw ValidationError("DenseMatrix: non-finite fill value");
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw ValidationError("DenseMatrix: data length " + std::to_string(data_.size()) +
                          " does not match " + std::to_string(rows) + "x" + std::to_string(cols));
  }
  if (!all_finite()) throw ValidationError("DenseMatrix: non-finite entry");
}

DenseMatrix::DenseMatrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw ValidationError("DenseMatrix: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
  if (!all_finite()) throw ValidationError("DenseMatrix: non-finite entry");
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

std::vector<double> DenseMatrix::col(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

DenseMatrix DenseMatrix::transpose() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

bool DenseMatrix::all_finite() const {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

bool DenseMatrix::is_symmetric() const {
  if (!is_square()) return false;
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = r + 1; c < cols_; ++c)
      if ((*this)(r, c) != (*this)(c, r)) return false;
  return true;
}

namespace {
void require_same_shape(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ValidationError("matrix shape mismatch");
}
}  // namespace

DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b) {
  require_same_shape(a, b);
  DenseMatrix out = a;
  auto od = out.data();
  auto bd = b.data();
  for (std::size_t k = 0; k < od.size(); ++k) od[k] -= bd[k];
  return out;
}

DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b) {
  require_same_shape(a, b);
  DenseMatrix out = a;
  auto od = out.data();
  auto bd = b.data();
  for (std::size_t k = 0; k < od.size(); ++k) od[k] += bd[k];
  return out;
}

DenseMatrix operator*(double s, const DenseMatrix& a) {
  DenseMatrix out = a;
  for (double& v : out.data()) v *= s;
  return out;
}

GramMatrix gram(const DenseMatrix& y) {
  if (y.rows() == 0 || y.cols() == 0) throw ValidationError("gram: empty data matrix");
  if (!y.all_finite()) throw ValidationError("gram: non-finite entry in data matrix");
  const std::size_t n = y.rows();
  const std::size_t p = y.cols();
  DenseMatrix s(p, p);
  // Accumulate row by row into the upper triangle, then mirror.
  for (std::size_t r = 0; r < n; ++r) {
    auto yr = y.row(r);
    for (std::size_t k = 0; k < p; ++k) {
      const double yk = yr[k];
      if (yk == 0.0) continue;
      auto srow = s.row(k);
      for (std::size_t j = k; j < p; ++j) srow[j] += yk * yr[j];
    }
  }
  for (std::size_t k = 0; k < p; ++k)
    for (std::size_t j = k + 1; j < p; ++j) s(j, k) = s(k, j);
  return GramMatrix(std::move(s));
}

PrecisionDraw::PrecisionDraw(std::vector<double> diag)
    : PrecisionDraw(diag, DenseMatrix(diag.size(), diag.size())) {}

PrecisionDraw::PrecisionDraw(std::vector<double> diag, DenseMatrix offdiag)
    : diag_(std::move(diag)), offdiag_(std::move(offdiag)) {
  const std::size_t p = diag_.size();
  if (p == 0) throw ValidationError("PrecisionDraw: empty diagonal");
  if (offdiag_.rows() != p || offdiag_.cols() != p)
    throw ValidationError("PrecisionDraw: off-diagonal block must be p x p");
  for (std::size_t i = 0; i < p; ++i) {
    if (!(diag_[i] > 0.0) || !std::isfinite(diag_[i]))
      throw ValidationError("PrecisionDraw: diagonal entry " + std::to_string(i) +
                            " must be positive and finite");
    if (offdiag_(i, i) != 0.0)
      throw ValidationError("PrecisionDraw: off-diagonal block has a nonzero diagonal");
  }
  if (!offdiag_.all_finite()) throw ValidationError("PrecisionDraw: non-finite entry");
}

void PrecisionDraw::set_offdiag(std::size_t r, std::size_t c, double value) {
  if (r == c) throw ValidationError("PrecisionDraw: cannot set a diagonal entry");
  offdiag_(r, c) = value;
}

DenseMatrix PrecisionDraw::to_dense() const {
  DenseMatrix out = offdiag_;
  for (std::size_t i = 0; i < p(); ++i) out(i, i) = diag_[i];
  return out;
}

}  // namespace qggm
