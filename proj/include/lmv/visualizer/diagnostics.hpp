#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lmv/harness/projector.hpp"
#include "lmv/harness/trajectory.hpp"

namespace lmv {

double pearson(std::span<const double> a, std::span<const double> b);

/// Latent distance l and log parameter distance log(d + eps) to the nearest
/// checkpoint for fresh uniform latent samples, and their correlation.
struct ScalingCheck {
  std::vector<double> l;
  std::vector<double> log_d;
  double correlation = 0.0;
};

ScalingCheck grid_scaling_check(const Projector& model, const Trajectory& traj, std::size_t count, std::uint64_t seed);

}  // namespace lmv
