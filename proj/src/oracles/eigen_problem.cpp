#include "lmv/oracles/eigen_problem.hpp"

#include <cmath>

#include "lmv/core/errors.hpp"
#include "lmv/core/rng.hpp"
#include "lmv/core/sym_eigen.hpp"

namespace lmv {

namespace {

DenseMatrix random_symmetric(std::size_t k, CounterRng& rng) {
  DenseMatrix a(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) a(i, j) = rng.uniform(-1.0, 1.0);
  DenseMatrix s(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) s(i, j) = 0.5 * (a(i, j) + a(j, i));
  return s;
}

}  // namespace

void EigenConfig::validate() const {
  if (k < 2) throw ConfigError("eigen: k must be >= 2");
  if (n_matrices < 2) throw ConfigError("eigen: n_matrices must be >= 2");
  if (n_labeled < 1 || n_labeled >= n_matrices)
    throw ConfigError("eigen: n_labeled must lie in [1, n_matrices) so a held-out set remains");
  if (!(c_C >= 0.0) || !(c_S >= 0.0)) throw ConfigError("eigen: c_C and c_S must be >= 0");
  if (!(tau >= 0.0)) throw ConfigError("eigen: tau must be >= 0");
  if (tau == 0.0 && total_epochs == 0) throw ConfigError("eigen: tau or total_epochs must be positive");
  for (std::size_t h : hidden)
    if (h < 1) throw ConfigError("eigen: hidden sizes must be >= 1");
}

double EigenConfig::effective_tau() const { return tau > 0.0 ? tau : 0.2 * static_cast<double>(total_epochs); }

double EigenConfig::lambda_C(double epoch) const {
  if (!physics_guided) return 0.0;
  return c_C * (1.0 - std::exp(-epoch / effective_tau()));
}

double EigenConfig::lambda_S(double epoch) const {
  if (!physics_guided) return 0.0;
  return c_S * std::exp(-epoch / effective_tau());
}

void to_json(Json& j, const EigenConfig& c) {
  j = Json{{"kind", "eigen"},       {"k", c.k},
           {"seed", c.seed},        {"n_matrices", c.n_matrices},
           {"n_labeled", c.n_labeled}, {"c_C", c.c_C},
           {"c_S", c.c_S},          {"tau", c.tau},
           {"total_epochs", c.total_epochs}, {"physics_guided", c.physics_guided},
           {"hidden", c.hidden}};
}

void from_json(const Json& j, EigenConfig& c) {
  read_optional(j, "k", c.k);
  read_optional(j, "seed", c.seed);
  read_optional(j, "n_matrices", c.n_matrices);
  read_optional(j, "n_labeled", c.n_labeled);
  read_optional(j, "c_C", c.c_C);
  read_optional(j, "c_S", c.c_S);
  read_optional(j, "tau", c.tau);
  read_optional(j, "total_epochs", c.total_epochs);
  read_optional(j, "physics_guided", c.physics_guided);
  read_optional(j, "hidden", c.hidden);
}

EigenProblem::EigenProblem(EigenConfig config) : config_(std::move(config)) {
  config_.validate();
  const std::size_t k = config_.k;
  CounterRng rng(config_.seed, streams::kMatrices);
  inputs_ = DenseMatrix(config_.n_matrices, k * k);
  for (std::size_t m = 0; m < config_.n_matrices; ++m) {
    DenseMatrix a = random_symmetric(k, rng);
    const SymmetricEigen eig = symmetric_eigen(a);
    std::vector<double> v(k);
    for (std::size_t i = 0; i < k; ++i) v[i] = eig.vectors(i, 0);
    for (std::size_t i = 0; i < k * k; ++i) inputs_(m, i) = a.values()[i];
    values_.push_back(eig.values[0]);
    vectors_.push_back(std::move(v));
    matrices_.push_back(std::move(a));
  }
}

Json EigenProblem::to_json() const { return Json(config_); }

MlpSpec EigenProblem::net_spec() const {
  MlpSpec spec;
  spec.layer_sizes.push_back(config_.k * config_.k);
  for (std::size_t h : config_.hidden) spec.layer_sizes.push_back(h);
  spec.layer_sizes.push_back(config_.k + 1);
  return spec;
}

std::vector<double> EigenProblem::term_coefficients(std::size_t epoch) const {
  const double t = static_cast<double>(epoch);
  return {1.0, config_.lambda_C(t), config_.lambda_S(t)};
}

std::vector<EigenPrediction> EigenProblem::predict(const FlatParams& net) const {
  if (net.spec.input_size() != config_.k * config_.k || net.spec.output_size() != config_.k + 1)
    throw ShapeError("eigen: network must map k*k inputs to k+1 outputs");
  const DenseMatrix out = mlp_forward(net, inputs_);
  std::vector<EigenPrediction> preds(out.rows());
  for (std::size_t m = 0; m < out.rows(); ++m) {
    preds[m].y_hat.assign(out.row(m).begin(), out.row(m).begin() + static_cast<std::ptrdiff_t>(config_.k));
    preds[m].lambda_hat = out(m, config_.k);
  }
  return preds;
}

double EigenProblem::aligned_mse(std::span<const double> y_hat, std::span<const double> y_true,
                                 std::vector<double>* d_y_hat) {
  const std::size_t k = y_hat.size();
  const double norm = norm2(y_hat);
  if (norm < 1e-12) throw DegenerateError("eigen: predicted eigenvector has norm below 1e-12");
  std::vector<double> n(k);
  for (std::size_t i = 0; i < k; ++i) n[i] = y_hat[i] / norm;
  const double s = dot(n, y_true) < 0.0 ? -1.0 : 1.0;
  double loss = 0.0;
  std::vector<double> g(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double e = s * n[i] - y_true[i];
    loss += e * e;
    g[i] = 2.0 * s * e / static_cast<double>(k);
  }
  if (d_y_hat) {
    const double ng = dot(n, g);
    d_y_hat->resize(k);
    for (std::size_t i = 0; i < k; ++i) (*d_y_hat)[i] = (g[i] - n[i] * ng) / norm;
  }
  return loss / static_cast<double>(k);
}

double EigenProblem::eigen_residual(const DenseMatrix& a, std::span<const double> y_hat, double lambda_hat,
                                    std::vector<double>* d_y_hat, double* d_lambda) {
  const std::size_t k = y_hat.size();
  const double q = dot(y_hat, y_hat);
  if (std::sqrt(q) < 1e-12) throw DegenerateError("eigen: predicted eigenvector has norm below 1e-12");
  std::vector<double> r = matvec(a, y_hat);
  for (std::size_t i = 0; i < k; ++i) r[i] -= lambda_hat * y_hat[i];
  const double c = dot(r, r) / q;
  if (d_y_hat) {
    // A symmetric, so (A - l I)^T r = A r - l r.
    std::vector<double> ar = matvec(a, r);
    d_y_hat->resize(k);
    for (std::size_t i = 0; i < k; ++i) (*d_y_hat)[i] = (2.0 * (ar[i] - lambda_hat * r[i]) - 2.0 * c * y_hat[i]) / q;
  }
  if (d_lambda) *d_lambda = -2.0 * dot(y_hat, r) / q;
  return c;
}

double EigenProblem::mse_over(const FlatParams& net, std::size_t begin, std::size_t end,
                              std::vector<double>* grad) const {
  const std::size_t k = config_.k;
  const std::size_t count = end - begin;
  DenseMatrix in(count, k * k);
  for (std::size_t m = 0; m < count; ++m)
    for (std::size_t i = 0; i < k * k; ++i) in(m, i) = inputs_(begin + m, i);
  ForwardCache cache;
  const DenseMatrix out = mlp_forward(net, in, grad ? &cache : nullptr);
  DenseMatrix up(count, k + 1, 0.0);
  double loss = 0.0;
  std::vector<double> d;
  for (std::size_t m = 0; m < count; ++m) {
    std::span<const double> y_hat(out.row(m).data(), k);
    loss += aligned_mse(y_hat, vectors_[begin + m], grad ? &d : nullptr);
    if (grad)
      for (std::size_t i = 0; i < k; ++i) up(m, i) = d[i] / static_cast<double>(count);
  }
  if (grad) mlp_backward(net, cache, up, *grad);
  return loss / static_cast<double>(count);
}

double EigenProblem::train_mse(const FlatParams& net, std::vector<double>* grad) const {
  if (net.spec.input_size() != config_.k * config_.k || net.spec.output_size() != config_.k + 1)
    throw ShapeError("eigen: network must map k*k inputs to k+1 outputs");
  return mse_over(net, 0, config_.n_labeled, grad);
}

double EigenProblem::test_mse(const FlatParams& net) const {
  if (net.spec.input_size() != config_.k * config_.k || net.spec.output_size() != config_.k + 1)
    throw ShapeError("eigen: network must map k*k inputs to k+1 outputs");
  return mse_over(net, config_.n_labeled, config_.n_matrices, nullptr);
}

double EigenProblem::c_loss(const FlatParams& net, std::vector<double>* grad) const {
  if (net.spec.input_size() != config_.k * config_.k || net.spec.output_size() != config_.k + 1)
    throw ShapeError("eigen: network must map k*k inputs to k+1 outputs");
  const std::size_t k = config_.k;
  const std::size_t count = matrices_.size();
  ForwardCache cache;
  const DenseMatrix out = mlp_forward(net, inputs_, grad ? &cache : nullptr);
  DenseMatrix up(count, k + 1, 0.0);
  double loss = 0.0;
  std::vector<double> dy;
  double dl = 0.0;
  for (std::size_t m = 0; m < count; ++m) {
    std::span<const double> y_hat(out.row(m).data(), k);
    loss += eigen_residual(matrices_[m], y_hat, out(m, k), grad ? &dy : nullptr, grad ? &dl : nullptr);
    if (grad) {
      for (std::size_t i = 0; i < k; ++i) up(m, i) = dy[i] / static_cast<double>(count);
      up(m, k) = dl / static_cast<double>(count);
    }
  }
  if (grad) mlp_backward(net, cache, up, *grad);
  return loss / static_cast<double>(count);
}

double EigenProblem::s_loss(const FlatParams& net, std::vector<double>* grad) const {
  if (net.spec.input_size() != config_.k * config_.k || net.spec.output_size() != config_.k + 1)
    throw ShapeError("eigen: network must map k*k inputs to k+1 outputs");
  const std::size_t k = config_.k;
  const std::size_t count = matrices_.size();
  ForwardCache cache;
  const DenseMatrix out = mlp_forward(net, inputs_, grad ? &cache : nullptr);
  DenseMatrix up(count, k + 1, 0.0);
  double loss = 0.0;
  for (std::size_t m = 0; m < count; ++m) {
    const double d = out(m, k) - values_[m];
    loss += d * d;
    up(m, k) = 2.0 * d / static_cast<double>(count);
  }
  if (grad) mlp_backward(net, cache, up, *grad);
  return loss / static_cast<double>(count);
}

double EigenProblem::objective(const FlatParams& net, double epoch) const {
  double e = train_mse(net);
  const double lc = config_.lambda_C(epoch);
  const double ls = config_.lambda_S(epoch);
  if (lc != 0.0) e += lc * c_loss(net);
  if (ls != 0.0) e += ls * s_loss(net);
  return e;
}

TermValues EigenProblem::evaluate_terms(const FlatParams& net, bool with_grad) const {
  TermValues tv;
  tv.values.resize(3);
  if (with_grad) tv.grads.assign(3, std::vector<double>(net.theta.size(), 0.0));
  tv.values[0] = train_mse(net, with_grad ? &tv.grads[0] : nullptr);
  tv.values[1] = c_loss(net, with_grad ? &tv.grads[1] : nullptr);
  tv.values[2] = s_loss(net, with_grad ? &tv.grads[2] : nullptr);
  return tv;
}

std::vector<std::string> EigenProblem::oracle_names() const {
  return {"Train-MSE", "C-Loss", "S-Loss", "E", "Test-MSE", "L_total_physics"};
}

double EigenProblem::evaluate_oracle(const std::string& name, const FlatParams& net) const {
  if (name == "Train-MSE") return train_mse(net);
  if (name == "C-Loss") return c_loss(net);
  if (name == "S-Loss") return s_loss(net);
  if (name == "E") return objective(net, static_cast<double>(config_.total_epochs));
  if (name == "Test-MSE") return test_mse(net);
  if (name == "L_total_physics") return c_loss(net) + s_loss(net);
  throw NotFoundError("eigen: no oracle named '" + name + "'");
}

DenseMatrix EigenProblem::probe_inputs(std::size_t count, std::uint64_t seed) const {
  CounterRng rng(seed, streams::kProbes);
  const std::size_t k = config_.k;
  DenseMatrix x(count, k * k);
  for (std::size_t m = 0; m < count; ++m) {
    const DenseMatrix a = random_symmetric(k, rng);
    for (std::size_t i = 0; i < k * k; ++i) x(m, i) = a.values()[i];
  }
  return x;
}

}  // namespace lmv
