#pragma once

#include <functional>
#include <span>
#include <vector>

namespace lmv {

using ScalarFn = std::function<double(std::span<const double>)>;

/// Central-difference gradient estimate of f at theta.
std::vector<double> finite_diff_gradient(const ScalarFn& f, std::span<const double> theta, double h = 1e-6);

/// Same, restricted to the listed coordinates (others left 0).
std::vector<double> finite_diff_gradient(const ScalarFn& f, std::span<const double> theta, double h,
                                         std::span<const std::size_t> coords);

/// max_i |a_i - b_i| / max(max_i |a_i|, max_i |b_i|, floor): gradient error
/// measured against the gradient's own scale.
double gradient_relative_error(std::span<const double> analytic, std::span<const double> numeric,
                               double floor = 1e-12);

}  // namespace lmv
