#include "lmv/core/finite_diff.hpp"

#include <algorithm>
#include <cmath>

#include "lmv/core/errors.hpp"

namespace lmv {

std::vector<double> finite_diff_gradient(const ScalarFn& f, std::span<const double> theta, double h,
                                         std::span<const std::size_t> coords) {
  if (!(h > 0.0)) throw ValidationError("finite_diff_gradient: step must be positive");
  std::vector<double> x(theta.begin(), theta.end());
  std::vector<double> g(theta.size(), 0.0);
  for (std::size_t i : coords) {
    if (i >= x.size()) throw ShapeError("finite_diff_gradient: coordinate out of range");
    const double orig = x[i];
    x[i] = orig + h;
    const double fp = f(x);
    x[i] = orig - h;
    const double fm = f(x);
    x[i] = orig;
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

std::vector<double> finite_diff_gradient(const ScalarFn& f, std::span<const double> theta, double h) {
  std::vector<std::size_t> all(theta.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return finite_diff_gradient(f, theta, h, all);
}

double gradient_relative_error(std::span<const double> analytic, std::span<const double> numeric, double floor) {
  if (analytic.size() != numeric.size()) throw ShapeError("gradient_relative_error: length mismatch");
  double diff = 0.0;
  double scale = floor;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    diff = std::max(diff, std::abs(analytic[i] - numeric[i]));
    scale = std::max({scale, std::abs(analytic[i]), std::abs(numeric[i])});
  }
  return diff / scale;
}

}  // namespace lmv
