#pragma once

#include <vector>

#include "lmv/core/matrix.hpp"

namespace lmv {

struct SymmetricEigen {
  std::vector<double> values;  // ascending
  DenseMatrix vectors;         // column i pairs with values[i]
};

/// Cyclic Jacobi eigen-decomposition of a symmetric matrix. Eigenvector signs
/// are fixed so the first non-negligible component of each is positive.
SymmetricEigen symmetric_eigen(const DenseMatrix& a);

}  // namespace lmv
