#include "lmv/harness/training.hpp"

#include <cmath>

#include "lmv/core/adam.hpp"
#include "lmv/core/errors.hpp"

namespace lmv {

void TrainSettings::validate() const {
  if (stride < 1) throw ConfigError("training: stride must be >= 1");
  if (epochs < 1) throw ConfigError("training: epochs must be >= 1");
  if (!(lr > 0.0)) throw ConfigError("training: lr must be > 0");
}

void to_json(Json& j, const TrainSettings& s) {
  j = Json{{"epochs", s.epochs}, {"lr", s.lr}, {"stride", s.stride}, {"seed", s.seed}};
}

void from_json(const Json& j, TrainSettings& s) {
  read_optional(j, "epochs", s.epochs);
  read_optional(j, "lr", s.lr);
  read_optional(j, "stride", s.stride);
  read_optional(j, "seed", s.seed);
}

FlatParams initial_network(const TargetProblem& problem, std::uint64_t seed) {
  return init_params(problem.net_spec(), seed, streams::kTargetInit);
}

Trajectory run_training(const TargetProblem& problem, const OracleSet& oracles, const FlatParams& net_init,
                        const BalancingScheme& scheme, const TrainSettings& settings) {
  settings.validate();
  if (!(net_init.spec == problem.net_spec())) throw ShapeError("run_training: initial network does not match the problem");
  net_init.validate();
  const std::vector<std::string> terms = problem.term_names();
  Balancer balancer(scheme, terms, settings.seed);

  Trajectory traj;
  traj.spec = net_init.spec;
  traj.stride = settings.stride;
  traj.loss_names = oracles.names();
  traj.metadata = Json{{"problem", problem.to_json()}, {"scheme", scheme}, {"train", settings}};
  std::vector<double> loss_rows;

  FlatParams net = net_init;
  auto record = [&](std::size_t epoch) {
    traj.checkpoints.push_back(net.theta);
    traj.epochs.push_back(epoch);
    const std::vector<double> values = oracles.evaluate_all(net);
    loss_rows.insert(loss_rows.end(), values.begin(), values.end());
  };

  AdamState adam = AdamState::for_size(net.theta.size(), settings.lr);
  std::vector<double> grad(net.theta.size());
  for (std::size_t epoch = 0; epoch < settings.epochs; ++epoch) {
    if (epoch % settings.stride == 0) record(epoch);
    TermValues tv = problem.evaluate_terms(net, true);
    for (std::size_t i = 0; i < terms.size(); ++i)
      if (!std::isfinite(tv.values[i]))
        throw NumericalError("training diverged at epoch " + std::to_string(epoch) + ": loss '" + terms[i] +
                             "' is non-finite");
    const std::vector<double> coeff = problem.term_coefficients(epoch);
    TermStats stats{tv.values, balancer.needs_gradients() ? tv.grads : std::vector<std::vector<double>>{}};
    const std::vector<double> w = balancer.weights(epoch, stats);
    std::fill(grad.begin(), grad.end(), 0.0);
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const double c = coeff[i] * w[i];
      if (c == 0.0) continue;
      for (std::size_t j = 0; j < grad.size(); ++j) grad[j] += c * tv.grads[i][j];
    }
    try {
      adam_step(adam, net.theta, grad);
    } catch (const NumericalError& e) {
      throw NumericalError("training diverged at epoch " + std::to_string(epoch) + ": " + e.what());
    }
  }
  record(settings.epochs);
  traj.losses = DenseMatrix(traj.checkpoints.size(), traj.loss_names.size(), std::move(loss_rows));
  return traj;
}

Trajectory run_training(std::shared_ptr<const TargetProblem> problem, const FlatParams& net_init,
                        const BalancingScheme& scheme, const TrainSettings& settings) {
  const OracleSet oracles = register_oracles(problem);
  return run_training(*problem, oracles, net_init, scheme, settings);
}

}  // namespace lmv
