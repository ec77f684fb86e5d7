#include "lmv/core/adam.hpp"

#include <cmath>
#include <string>

#include "lmv/core/errors.hpp"

namespace lmv {

AdamState AdamState::for_size(std::size_t n, double lr) {
  AdamState s;
  s.m.assign(n, 0.0);
  s.v.assign(n, 0.0);
  s.lr = lr;
  return s;
}

void adam_step(AdamState& state, std::span<double> theta, std::span<const double> grad) {
  if (theta.size() != grad.size() || state.m.size() != theta.size() || state.v.size() != theta.size())
    throw ShapeError("adam_step: theta, grad and moment lengths differ");
  if (!(state.lr > 0.0)) throw ValidationError("adam_step: learning rate must be positive");
  for (std::size_t i = 0; i < grad.size(); ++i)
    if (!std::isfinite(grad[i])) throw NumericalError("adam_step: non-finite gradient at index " + std::to_string(i));

  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double g = grad[i];
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g;
    state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g * g;
    const double mhat = state.m[i] / c1;
    const double vhat = state.v[i] / c2;
    theta[i] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
  }
}

}  // namespace lmv
