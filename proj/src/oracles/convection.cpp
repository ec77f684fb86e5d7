#include "lmv/oracles/convection.hpp"

#include <cmath>
#include <numbers>

#include "lmv/core/errors.hpp"
#include "lmv/core/rng.hpp"

namespace lmv {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

void ConvectionConfig::validate() const {
  if (!std::isfinite(beta)) throw ConfigError("convection: beta must be finite");
  if (n_interior < 1 || n_initial < 1 || n_boundary < 1) throw ConfigError("convection: collocation counts must be >= 1");
  if (test_resolution < 2) throw ConfigError("convection: test_resolution must be >= 2");
  if (!(c_r >= 0.0) || !(c_ic >= 0.0) || !(c_bc >= 0.0)) throw ConfigError("convection: loss weights must be >= 0");
  for (std::size_t h : hidden)
    if (h < 1) throw ConfigError("convection: hidden sizes must be >= 1");
}

void to_json(Json& j, const ConvectionConfig& c) {
  j = Json{{"kind", "convection"},   {"beta", c.beta},          {"seed", c.seed},
           {"n_interior", c.n_interior}, {"n_initial", c.n_initial}, {"n_boundary", c.n_boundary},
           {"test_resolution", c.test_resolution}, {"c_r", c.c_r}, {"c_ic", c.c_ic},
           {"c_bc", c.c_bc},          {"hidden", c.hidden}};
}

void from_json(const Json& j, ConvectionConfig& c) {
  read_optional(j, "beta", c.beta);
  read_optional(j, "seed", c.seed);
  read_optional(j, "n_interior", c.n_interior);
  read_optional(j, "n_initial", c.n_initial);
  read_optional(j, "n_boundary", c.n_boundary);
  read_optional(j, "test_resolution", c.test_resolution);
  read_optional(j, "c_r", c.c_r);
  read_optional(j, "c_ic", c.c_ic);
  read_optional(j, "c_bc", c.c_bc);
  read_optional(j, "hidden", c.hidden);
}

ConvectionProblem::ConvectionProblem(ConvectionConfig config) : config_(std::move(config)) {
  config_.validate();
  CounterRng r_rng(config_.seed, streams::kCollocation);
  interior_ = DenseMatrix(config_.n_interior, 2);
  for (std::size_t i = 0; i < config_.n_interior; ++i) {
    interior_(i, 0) = r_rng.uniform(0.0, kTwoPi);
    interior_(i, 1) = r_rng.uniform(0.0, 1.0);
  }
  CounterRng ic_rng(config_.seed, streams::kIcPoints);
  initial_ = DenseMatrix(config_.n_initial, 2);
  initial_target_.resize(config_.n_initial);
  for (std::size_t i = 0; i < config_.n_initial; ++i) {
    initial_(i, 0) = ic_rng.uniform(0.0, kTwoPi);
    initial_target_[i] = std::sin(initial_(i, 0));
  }
  CounterRng bc_rng(config_.seed, streams::kBcPoints);
  boundary_t_.resize(config_.n_boundary);
  boundary_left_ = DenseMatrix(config_.n_boundary, 2);
  boundary_right_ = DenseMatrix(config_.n_boundary, 2);
  for (std::size_t i = 0; i < config_.n_boundary; ++i) {
    boundary_t_[i] = bc_rng.uniform(0.0, 1.0);
    boundary_left_(i, 1) = boundary_t_[i];
    boundary_right_(i, 0) = kTwoPi;
    boundary_right_(i, 1) = boundary_t_[i];
  }
  const std::size_t n = config_.test_resolution;
  test_ = DenseMatrix(n * n, 2);
  test_target_.resize(n * n);
  for (std::size_t it = 0; it < n; ++it) {
    for (std::size_t ix = 0; ix < n; ++ix) {
      const double x = kTwoPi * static_cast<double>(ix) / static_cast<double>(n - 1);
      const double t = static_cast<double>(it) / static_cast<double>(n - 1);
      test_(it * n + ix, 0) = x;
      test_(it * n + ix, 1) = t;
      test_target_[it * n + ix] = exact_solution(config_.beta, x, t);
    }
  }
}

double ConvectionProblem::exact_solution(double beta, double x, double t) { return std::sin(x + beta * t); }

Json ConvectionProblem::to_json() const { return Json(config_); }

MlpSpec ConvectionProblem::net_spec() const {
  MlpSpec spec;
  spec.layer_sizes.push_back(2);
  for (std::size_t h : config_.hidden) spec.layer_sizes.push_back(h);
  spec.layer_sizes.push_back(1);
  return spec;
}

std::vector<double> ConvectionProblem::term_coefficients(std::size_t) const {
  return {config_.c_r, config_.c_ic, config_.c_bc};
}

void ConvectionProblem::check_net(const FlatParams& net) const {
  if (net.spec.input_size() != 2 || net.spec.output_size() != 1)
    throw ShapeError("convection: network must map (x, t) to a scalar u");
  net.validate();
}

double ConvectionProblem::residual_loss(const FlatParams& net, std::vector<double>* grad) const {
  check_net(net);
  // f = u_t - beta u_x is the derivative of u along (-beta, 1) in (x, t).
  const std::vector<double> dir{-config_.beta, 1.0};
  const TangentForward tf = mlp_forward_tangent(net, interior_, dir);
  const double n = static_cast<double>(interior_.rows());
  double loss = 0.0;
  for (std::size_t i = 0; i < interior_.rows(); ++i) loss += tf.tangents(i, 0) * tf.tangents(i, 0);
  loss /= n;
  if (grad) {
    DenseMatrix g_out(interior_.rows(), 1, 0.0);
    DenseMatrix g_tan(interior_.rows(), 1);
    for (std::size_t i = 0; i < interior_.rows(); ++i) g_tan(i, 0) = 2.0 * tf.tangents(i, 0) / n;
    mlp_backward_tangent(net, tf.cache, g_out, g_tan, *grad);
  }
  return loss;
}

double ConvectionProblem::initial_loss(const FlatParams& net, std::vector<double>* grad) const {
  check_net(net);
  ForwardCache cache;
  const DenseMatrix u = mlp_forward(net, initial_, grad ? &cache : nullptr);
  const double n = static_cast<double>(initial_.rows());
  double loss = 0.0;
  DenseMatrix up(initial_.rows(), 1);
  for (std::size_t i = 0; i < initial_.rows(); ++i) {
    const double d = u(i, 0) - initial_target_[i];
    loss += d * d;
    up(i, 0) = 2.0 * d / n;
  }
  if (grad) mlp_backward(net, cache, up, *grad);
  return loss / n;
}

double ConvectionProblem::boundary_loss(const FlatParams& net, std::vector<double>* grad) const {
  check_net(net);
  ForwardCache left_cache;
  ForwardCache right_cache;
  const DenseMatrix ul = mlp_forward(net, boundary_left_, grad ? &left_cache : nullptr);
  const DenseMatrix ur = mlp_forward(net, boundary_right_, grad ? &right_cache : nullptr);
  const double n = static_cast<double>(boundary_t_.size());
  double loss = 0.0;
  DenseMatrix gl(boundary_t_.size(), 1);
  DenseMatrix gr(boundary_t_.size(), 1);
  for (std::size_t i = 0; i < boundary_t_.size(); ++i) {
    const double d = ul(i, 0) - ur(i, 0);
    loss += d * d;
    gl(i, 0) = 2.0 * d / n;
    gr(i, 0) = -2.0 * d / n;
  }
  if (grad) {
    mlp_backward(net, left_cache, gl, *grad);
    mlp_backward(net, right_cache, gr, *grad);
  }
  return loss / n;
}

double ConvectionProblem::test_loss(const FlatParams& net) const {
  check_net(net);
  const DenseMatrix u = mlp_forward(net, test_);
  double loss = 0.0;
  for (std::size_t i = 0; i < test_.rows(); ++i) {
    const double d = u(i, 0) - test_target_[i];
    loss += d * d;
  }
  return loss / static_cast<double>(test_.rows());
}

double ConvectionProblem::total_loss(const FlatParams& net) const {
  return config_.c_r * residual_loss(net) + config_.c_ic * initial_loss(net) + config_.c_bc * boundary_loss(net);
}

TermValues ConvectionProblem::evaluate_terms(const FlatParams& net, bool with_grad) const {
  TermValues tv;
  tv.values.resize(3);
  if (with_grad) tv.grads.assign(3, std::vector<double>(net.theta.size(), 0.0));
  tv.values[0] = residual_loss(net, with_grad ? &tv.grads[0] : nullptr);
  tv.values[1] = initial_loss(net, with_grad ? &tv.grads[1] : nullptr);
  tv.values[2] = boundary_loss(net, with_grad ? &tv.grads[2] : nullptr);
  return tv;
}

std::vector<std::string> ConvectionProblem::oracle_names() const {
  return {"L_r", "L_ic", "L_bc", "L_total", "L_total_physics", "L_test"};
}

double ConvectionProblem::evaluate_oracle(const std::string& name, const FlatParams& net) const {
  if (name == "L_r") return residual_loss(net);
  if (name == "L_ic") return initial_loss(net);
  if (name == "L_bc") return boundary_loss(net);
  if (name == "L_total") return total_loss(net);
  if (name == "L_total_physics") return residual_loss(net) + initial_loss(net) + boundary_loss(net);
  if (name == "L_test") return test_loss(net);
  throw NotFoundError("convection: no oracle named '" + name + "'");
}

DenseMatrix ConvectionProblem::probe_inputs(std::size_t count, std::uint64_t seed) const {
  CounterRng rng(seed, streams::kProbes);
  DenseMatrix x(count, 2);
  for (std::size_t i = 0; i < count; ++i) {
    x(i, 0) = rng.uniform(0.0, kTwoPi);
    x(i, 1) = rng.uniform(0.0, 1.0);
  }
  return x;
}

}  // namespace lmv
