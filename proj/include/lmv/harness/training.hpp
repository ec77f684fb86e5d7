#pragma once

#include <cstdint>
#include <functional>

#include "lmv/harness/balancing.hpp"
#include "lmv/harness/trajectory.hpp"
#include "lmv/oracles/problem.hpp"

namespace lmv {

struct TrainSettings {
  std::size_t epochs = 1000;
  double lr = 1e-3;
  std::size_t stride = 10;
  std::uint64_t seed = 0;

  void validate() const;
};

void to_json(Json& j, const TrainSettings& s);
void from_json(const Json& j, TrainSettings& s);

/// Full-batch Adam on sum_i c_i(epoch) * w_i(epoch) * L_i. A checkpoint is
/// recorded before every epoch divisible by the stride and after the last
/// one, with every oracle of `oracles` evaluated on it.
Trajectory run_training(const TargetProblem& problem, const OracleSet& oracles, const FlatParams& net_init,
                        const BalancingScheme& scheme, const TrainSettings& settings);

/// Convenience overload registering the problem's own oracles.
Trajectory run_training(std::shared_ptr<const TargetProblem> problem, const FlatParams& net_init,
                        const BalancingScheme& scheme, const TrainSettings& settings);

/// Initial network for a problem: Glorot weights from the target-init stream.
FlatParams initial_network(const TargetProblem& problem, std::uint64_t seed);

}  // namespace lmv
