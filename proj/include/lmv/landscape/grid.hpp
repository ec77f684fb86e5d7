#pragma once

#include <array>
#include <string>
#include <vector>

#include "lmv/core/json_io.hpp"
#include "lmv/harness/projector.hpp"
#include "lmv/harness/trajectory.hpp"
#include "lmv/oracles/loss_oracle.hpp"

namespace lmv {

/// Mesh over a latent window inside [-1, 1]^2.
struct GridSpec {
  std::size_t resolution = 25;
  std::array<double, 4> window{-1.0, 1.0, -1.0, 1.0};  // x1, x2, y1, y2

  void validate() const;
  double x(std::size_t ix) const;
  double y(std::size_t iy) const;
  /// resolution^2 x 2, row index iy * resolution + ix.
  DenseMatrix mesh() const;
};

void to_json(Json& j, const GridSpec& g);
void from_json(const Json& j, GridSpec& g);

struct OverlayPoint {
  std::size_t index = 0;  // checkpoint
  Latent z{0.0, 0.0};
  double value = 0.0;
};

/// A scalar field over a mesh plus the encoded trajectory. field(iy, ix).
struct LandscapeGrid {
  GridSpec spec;
  std::string field_name;
  DenseMatrix field;
  std::string overlay_name;
  std::vector<OverlayPoint> overlay;
  std::vector<std::size_t> segment_starts{0};  // overlay positions where a run begins
  std::size_t failed_points = 0;  // mesh points holding the NaN sentinel
  Json provenance = Json::object();
};

/// Decodes every mesh point, evaluates the oracle on the denormalized network
/// and overlays the encoded checkpoints with their recorded losses. An oracle
/// failure at a mesh point leaves a quiet NaN.
LandscapeGrid evaluate_grid(const Projector& model, const GridSpec& spec, const LossOracle& oracle,
                            const Trajectory& traj);

/// Encoded checkpoints under a projector's own normalization.
DenseMatrix encode_trajectory(const Projector& model, const Trajectory& traj);

/// Mean field value over mesh points within latent distance `radius` of any
/// row of `codes`. Throws ValidationError when no finite mesh value qualifies.
double mean_field_near(const LandscapeGrid& grid, const DenseMatrix& codes, double radius);

Json grid_to_json(const LandscapeGrid& grid);
LandscapeGrid grid_from_json(const Json& j);
/// "x,y,value" rows, shortest round-trip decimals.
std::string grid_to_csv(const LandscapeGrid& grid);
std::string format_double(double v);

}  // namespace lmv
