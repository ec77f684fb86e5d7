#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace lmv {

/// Non-owning row-major view; lets layer weights be used in place inside a
/// flat parameter vector.
struct MatrixView {
  const double* data = nullptr;
  std::size_t rows = 0;
  std::size_t cols = 0;
};

/// Row-major dense matrix of doubles.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static DenseMatrix identity(std::size_t n);
  static DenseMatrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }
  std::vector<double>& values() noexcept { return data_; }
  const std::vector<double>& values() const noexcept { return data_; }

  MatrixView view() const noexcept { return {data_.data(), rows_, cols_}; }
  operator MatrixView() const noexcept { return view(); }  // NOLINT(google-explicit-constructor)

  DenseMatrix transposed() const;
  double frobenius_norm() const;
  bool all_finite() const;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Products used by the MLP kernels. C is resized as needed.
// matmul:     C = A * B
// matmul_nt:  C = A * B^T
// matmul_tn:  C = A^T * B
DenseMatrix matmul(MatrixView a, MatrixView b);
DenseMatrix matmul_nt(MatrixView a, MatrixView b);
DenseMatrix matmul_tn(MatrixView a, MatrixView b);

/// Accumulates A^T * B into the row-major block `out` (a.cols x b.cols).
void accumulate_tn(MatrixView a, MatrixView b, std::span<double> out);

std::vector<double> matvec(const DenseMatrix& a, std::span<const double> x);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double distance(std::span<const double> a, std::span<const double> b);

/// Solves (A) x = B for symmetric positive definite A via Cholesky. Columns of
/// B are independent right-hand sides. Throws NumericalError if A is not SPD.
DenseMatrix cholesky_solve(const DenseMatrix& a, const DenseMatrix& b);

}  // namespace lmv
