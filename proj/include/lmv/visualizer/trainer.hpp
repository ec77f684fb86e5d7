#pragma once

#include <functional>
#include <vector>

#include "lmv/visualizer/losses.hpp"
#include "lmv/visualizer/model.hpp"

namespace lmv {

struct VisualizerLog {
  std::vector<LossBreakdown> epochs;  // per-epoch means over steps
};

struct VisualizerFit {
  VisualizerModel model;
  VisualizerLog log;
};

/// Trains the constrained auto-encoder on the normalized trajectory with Adam.
/// Each step uses one shuffled minibatch for the reconstruction term, all
/// anchors, the full trajectory for the spacing term and fresh uniform latent
/// samples for the grid term.
VisualizerFit train_visualizer(const Trajectory& traj, const VisualizerConfig& config);

/// Uniform samples on [-1, 1]^2 from the grid-sample stream.
DenseMatrix latent_samples(std::size_t count, std::uint64_t seed, std::uint64_t index);

}  // namespace lmv
