#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lmv/core/json_io.hpp"
#include "lmv/harness/projector.hpp"
#include "lmv/harness/trajectory.hpp"

namespace lmv {

enum class AnchorMode { none, polar, center, circle };

std::string to_string(AnchorMode m);
AnchorMode anchor_mode_from_string(const std::string& s);

struct VisualizerConfig {
  std::vector<std::size_t> hidden{64, 16};  // encoder; the decoder mirrors it
  double lr = 1e-3;
  std::size_t batch_size = 32;
  std::size_t epochs = 20000;  // passes over the checkpoints
  double c_rec = 1.0;
  double c_anch = 0.0;
  double c_traj = 0.0;
  double c_grid = 0.0;
  AnchorMode anchor_mode = AnchorMode::none;
  double anchor_radius = 0.8;
  std::size_t circle_count = 0;               // 0 pins the whole designated set
  std::vector<std::size_t> circle_models;     // empty: segment ends, or all checkpoints for one run
  double l_max = 2.0;
  std::size_t grid_samples = 64;
  std::uint64_t seed = 0;

  void validate() const;
  /// Large-scale setup (hidden sizes, batch, lr, c_rec) used for the loss-balancing study.
  static VisualizerConfig reference_preset();
};

void to_json(Json& j, const VisualizerConfig& c);
void from_json(const Json& j, VisualizerConfig& c);

struct AnchorSet {
  std::vector<std::size_t> indices;
  std::vector<Latent> targets;

  std::size_t size() const { return indices.size(); }
};

/// Pins selected checkpoints to target points in the latent square.
AnchorSet build_anchors(AnchorMode mode, const Trajectory& traj, double r, std::size_t n_circle = 0,
                        const std::vector<std::size_t>& designated = {});
AnchorSet build_anchors(const VisualizerConfig& config, const Trajectory& traj);

}  // namespace lmv
