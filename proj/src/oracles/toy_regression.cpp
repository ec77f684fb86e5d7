#include "lmv/oracles/toy_regression.hpp"

#include <cmath>
#include <numbers>

#include "lmv/core/errors.hpp"
#include "lmv/core/rng.hpp"

namespace lmv {

namespace {

constexpr double kPi = std::numbers::pi;

double squared_error(const FlatParams& net, const DenseMatrix& x, const std::vector<double>& y,
                     std::vector<double>* grad) {
  if (net.spec.input_size() != 1 || net.spec.output_size() != 1)
    throw ShapeError("toy: network must map one input to one output");
  ForwardCache cache;
  const DenseMatrix u = mlp_forward(net, x, grad ? &cache : nullptr);
  const double n = static_cast<double>(x.rows());
  double loss = 0.0;
  DenseMatrix up(x.rows(), 1);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double d = u(i, 0) - y[i];
    loss += d * d;
    up(i, 0) = 2.0 * d / n;
  }
  if (grad) mlp_backward(net, cache, up, *grad);
  return loss / n;
}

}  // namespace

void ToyConfig::validate() const {
  if (n_train < 1) throw ConfigError("toy: n_train must be >= 1");
  if (n_test < 2) throw ConfigError("toy: n_test must be >= 2");
  if (!(noise >= 0.0)) throw ConfigError("toy: noise must be >= 0");
  for (std::size_t h : hidden)
    if (h < 1) throw ConfigError("toy: hidden sizes must be >= 1");
}

void to_json(Json& j, const ToyConfig& c) {
  j = Json{{"kind", "toy"}, {"seed", c.seed}, {"n_train", c.n_train},
           {"n_test", c.n_test}, {"noise", c.noise}, {"hidden", c.hidden}};
}

void from_json(const Json& j, ToyConfig& c) {
  read_optional(j, "seed", c.seed);
  read_optional(j, "n_train", c.n_train);
  read_optional(j, "n_test", c.n_test);
  read_optional(j, "noise", c.noise);
  read_optional(j, "hidden", c.hidden);
}

ToyRegression::ToyRegression(ToyConfig config) : config_(std::move(config)) {
  config_.validate();
  CounterRng rng(config_.seed, streams::kToyData);
  train_x_ = DenseMatrix(config_.n_train, 1);
  train_y_.resize(config_.n_train);
  for (std::size_t i = 0; i < config_.n_train; ++i) {
    train_x_(i, 0) = rng.uniform(-kPi, kPi);
    train_y_[i] = std::sin(train_x_(i, 0));
  }
  if (config_.noise > 0.0)
    for (double& y : train_y_) y += config_.noise * rng.normal();
  test_x_ = DenseMatrix(config_.n_test, 1);
  test_y_.resize(config_.n_test);
  for (std::size_t i = 0; i < config_.n_test; ++i) {
    test_x_(i, 0) = -kPi + 2.0 * kPi * static_cast<double>(i) / static_cast<double>(config_.n_test - 1);
    test_y_[i] = std::sin(test_x_(i, 0));
  }
}

Json ToyRegression::to_json() const { return Json(config_); }

MlpSpec ToyRegression::net_spec() const {
  MlpSpec spec;
  spec.layer_sizes.push_back(1);
  for (std::size_t h : config_.hidden) spec.layer_sizes.push_back(h);
  spec.layer_sizes.push_back(1);
  return spec;
}

double ToyRegression::train_loss(const FlatParams& net, std::vector<double>* grad) const {
  return squared_error(net, train_x_, train_y_, grad);
}

double ToyRegression::test_loss(const FlatParams& net) const { return squared_error(net, test_x_, test_y_, nullptr); }

TermValues ToyRegression::evaluate_terms(const FlatParams& net, bool with_grad) const {
  TermValues tv;
  if (with_grad) tv.grads.assign(1, std::vector<double>(net.theta.size(), 0.0));
  tv.values.push_back(train_loss(net, with_grad ? &tv.grads[0] : nullptr));
  return tv;
}

double ToyRegression::evaluate_oracle(const std::string& name, const FlatParams& net) const {
  if (name == "MSE") return train_loss(net);
  if (name == "Test-MSE") return test_loss(net);
  throw NotFoundError("toy: no oracle named '" + name + "'");
}

DenseMatrix ToyRegression::probe_inputs(std::size_t count, std::uint64_t seed) const {
  CounterRng rng(seed, streams::kProbes);
  DenseMatrix x(count, 1);
  for (std::size_t i = 0; i < count; ++i) x(i, 0) = rng.uniform(-kPi, kPi);
  return x;
}

}  // namespace lmv
