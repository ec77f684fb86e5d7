#pragma once

#include <string>
#include <vector>

#include "lmv/core/json_io.hpp"
#include "lmv/core/matrix.hpp"
#include "lmv/core/mlp.hpp"
#include "lmv/core/nvtj.hpp"

namespace lmv {

/// Ordered checkpoints of one (or several concatenated) training runs, with
/// the oracle values recorded at each checkpoint.
struct Trajectory {
  MlpSpec spec;
  std::vector<std::vector<double>> checkpoints;  // theta per checkpoint
  std::vector<std::size_t> epochs;               // training epoch of each checkpoint
  std::size_t stride = 10;
  std::vector<std::string> loss_names;
  DenseMatrix losses;  // checkpoints x loss_names
  std::vector<std::size_t> segment_starts{0};  // first checkpoint of each run
  Json metadata = Json::object();

  std::size_t size() const { return checkpoints.size(); }
  std::size_t dimension() const { return spec.param_count(); }
  FlatParams checkpoint(std::size_t i) const;
  bool has_loss(const std::string& name) const;
  std::vector<double> loss_column(const std::string& name) const;
  double loss(const std::string& name, std::size_t i) const;

  /// Throws ValidationError when shapes are inconsistent.
  void validate() const;
};

/// Per-coordinate z-score statistics. Coordinates whose std falls below 1e-8
/// use the floor and are flagged.
struct NormStats {
  std::vector<double> mean;
  std::vector<double> std;
  std::vector<bool> floored;

  std::size_t floored_count() const;
  std::vector<double> normalize(std::span<const double> theta) const;
  std::vector<double> denormalize(std::span<const double> z) const;
};

inline constexpr double kStdFloor = 1e-8;

struct NormalizedTrajectory {
  DenseMatrix points;  // checkpoints x n, z-scored
  NormStats stats;
  double d_max = 0.0;  // distance between first and last normalized checkpoint
};

NormStats compute_norm_stats(const Trajectory& traj);
/// Throws DegenerateError if the first and last checkpoints coincide.
NormalizedTrajectory normalize(const Trajectory& traj);
FlatParams denormalize(const NormStats& stats, const MlpSpec& spec, std::span<const double> z);

/// Concatenates runs that share a layout (e.g. several schemes from one
/// init), recording where each starts.
Trajectory concatenate(const std::vector<Trajectory>& runs);

NvtjFile trajectory_to_nvtj(const Trajectory& traj);
Trajectory trajectory_from_nvtj(const NvtjFile& file);
void save_trajectory(const std::string& path, const Trajectory& traj);
Trajectory load_trajectory(const std::string& path);
/// SHA-256 of the serialized trajectory.
std::string trajectory_hash(const Trajectory& traj);

}  // namespace lmv
