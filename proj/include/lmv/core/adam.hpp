#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace lmv {

struct AdamState {
  std::uint64_t step = 0;
  std::vector<double> m;
  std::vector<double> v;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  static AdamState for_size(std::size_t n, double lr);
};

/// One bias-corrected Adam update of `theta` in place. Throws NumericalError
/// naming the first non-finite gradient entry.
void adam_step(AdamState& state, std::span<double> theta, std::span<const double> grad);

}  // namespace lmv
