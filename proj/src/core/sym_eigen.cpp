#include "lmv/core/sym_eigen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "lmv/core/errors.hpp"

namespace lmv {

namespace {

double off_diagonal_norm(const DenseMatrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

}  // namespace

SymmetricEigen symmetric_eigen(const DenseMatrix& input) {
  const std::size_t n = input.rows();
  if (input.cols() != n) throw ValidationError("symmetric_eigen: matrix is not square");
  if (!input.all_finite()) throw ValidationError("symmetric_eigen: matrix has non-finite entries");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(input(i, j) - input(j, i)) > 1e-12)
        throw ValidationError("symmetric_eigen: matrix is not symmetric at (" + std::to_string(i) + ", " +
                              std::to_string(j) + ")");

  DenseMatrix a = input;
  // Work on the exactly symmetrized copy.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) a(i, j) = a(j, i) = 0.5 * (input(i, j) + input(j, i));
  DenseMatrix v = DenseMatrix::identity(n);

  const double scale = std::max(a.frobenius_norm(), 1e-300);
  for (int sweep = 0; sweep < 100; ++sweep) {
    if (off_diagonal_norm(a) <= 1e-15 * scale) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

  SymmetricEigen out;
  out.values.resize(n);
  out.vectors = DenseMatrix(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    const std::size_t src = order[c];
    out.values[c] = a(src, src);
    double sign = 1.0;
    for (std::size_t r = 0; r < n; ++r) {
      if (std::abs(v(r, src)) > 1e-12) {
        sign = v(r, src) < 0.0 ? -1.0 : 1.0;
        break;
      }
    }
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, c) = sign * v(r, src);
  }
  return out;
}

}  // namespace lmv
