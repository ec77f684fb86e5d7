#include "lmv/core/matrix.hpp"

#include <Eigen/Core>
#include <cmath>
#include <string>

#include "lmv/core/errors.hpp"

namespace lmv {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMat>;
using MutMap = Eigen::Map<RowMat>;

ConstMap view(MatrixView m) {
  return ConstMap(m.data, static_cast<Eigen::Index>(m.rows), static_cast<Eigen::Index>(m.cols));
}
MutMap view(DenseMatrix& m) {
  return MutMap(m.data(), static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols()));
}

[[noreturn]] void shape_fail(const char* op, MatrixView a, MatrixView b) {
  throw ShapeError(std::string(op) + ": incompatible shapes " + std::to_string(a.rows) + "x" +
                   std::to_string(a.cols) + " and " + std::to_string(b.rows) + "x" +
                   std::to_string(b.cols));
}

}  // namespace

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw ShapeError("DenseMatrix: data length " + std::to_string(data_.size()) + " != " +
                     std::to_string(rows) + "x" + std::to_string(cols));
  }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return {};
  DenseMatrix m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != m.cols()) throw ShapeError("DenseMatrix::from_rows: ragged rows");
    for (std::size_t c = 0; c < m.cols(); ++c) m(r, c) = rows[r][c];
  }
  return m;
}

DenseMatrix DenseMatrix::transposed() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

double DenseMatrix::frobenius_norm() const { return norm2(data_); }

bool DenseMatrix::all_finite() const {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

DenseMatrix matmul(MatrixView a, MatrixView b) {
  if (a.cols != b.rows) shape_fail("matmul", a, b);
  DenseMatrix c(a.rows, b.cols);
  if (c.empty() || a.cols == 0) return c;
  view(c).noalias() = view(a) * view(b);
  return c;
}

DenseMatrix matmul_nt(MatrixView a, MatrixView b) {
  if (a.cols != b.cols) shape_fail("matmul_nt", a, b);
  DenseMatrix c(a.rows, b.rows);
  if (c.empty() || a.cols == 0) return c;
  view(c).noalias() = view(a) * view(b).transpose();
  return c;
}

DenseMatrix matmul_tn(MatrixView a, MatrixView b) {
  if (a.rows != b.rows) shape_fail("matmul_tn", a, b);
  DenseMatrix c(a.cols, b.cols);
  if (c.empty() || a.rows == 0) return c;
  view(c).noalias() = view(a).transpose() * view(b);
  return c;
}

void accumulate_tn(MatrixView a, MatrixView b, std::span<double> out) {
  if (a.rows != b.rows) shape_fail("accumulate_tn", a, b);
  if (out.size() != a.cols * b.cols) throw ShapeError("accumulate_tn: output block size mismatch");
  if (a.rows == 0) return;
  MutMap dst(out.data(), static_cast<Eigen::Index>(a.cols), static_cast<Eigen::Index>(b.cols));
  dst.noalias() += view(a).transpose() * view(b);
}

std::vector<double> matvec(const DenseMatrix& a, std::span<const double> x) {
  if (x.size() != a.cols()) throw ShapeError("matvec: vector length mismatch");
  std::vector<double> y(a.rows(), 0.0);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < a.cols(); ++c) s += a(r, c) * x[c];
    y[r] = s;
  }
  return y;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ShapeError("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ShapeError("distance: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

DenseMatrix cholesky_solve(const DenseMatrix& a, const DenseMatrix& b) {
  const std::size_t n = a.rows();
  if (a.cols() != n || b.rows() != n) shape_fail("cholesky_solve", a.view(), b.view());
  DenseMatrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0)) throw NumericalError("cholesky_solve: matrix not positive definite at pivot " + std::to_string(j));
    l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  DenseMatrix x = b;
  for (std::size_t c = 0; c < b.cols(); ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = x(i, c);
      for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * x(k, c);
      x(i, c) = s / l(i, i);
    }
    for (std::size_t ii = n; ii-- > 0;) {
      double s = x(ii, c);
      for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * x(k, c);
      x(ii, c) = s / l(ii, ii);
    }
  }
  return x;
}

}  // namespace lmv
