#pragma once

#include "lmv/core/nvtj.hpp"
#include "lmv/harness/projector.hpp"

namespace lmv {

/// Maps raw 2-D coordinates into the latent square: one isotropic scale so
/// every fitted point lands inside [-1, 1]^2 with a 10% margin.
struct LatentFrame {
  Latent center{0.0, 0.0};
  double half = 1.0;

  static LatentFrame fit(const DenseMatrix& coords, double margin = 1.1);
  Latent to_latent(double a, double b) const { return {(a - center[0]) / half, (b - center[1]) / half}; }
  std::array<double, 2> to_coords(const Latent& z) const { return {center[0] + half * z[0], center[1] + half * z[1]}; }
};

/// Plane spanned by the top two principal directions of the normalized
/// checkpoints, passing through the final checkpoint.
class PcaPlane final : public Projector {
 public:
  PcaPlane(MlpSpec target_spec, NormStats stats, std::vector<double> origin, DenseMatrix basis,
           std::array<double, 2> variances, LatentFrame frame);

  std::string name() const override { return "pca"; }
  Latent encode(std::span<const double> normalized) const override;
  std::vector<double> decode(const Latent& z) const override;
  const MlpSpec& target_spec() const override { return target_spec_; }
  const NormStats& norm_stats() const override { return stats_; }

  /// Coordinates in the orthonormal basis relative to the origin, before rescaling.
  std::array<double, 2> raw_coordinates(std::span<const double> normalized) const;
  const std::vector<double>& origin() const { return origin_; }
  const DenseMatrix& basis() const { return basis_; }  // 2 x n, orthonormal rows
  const std::array<double, 2>& variances() const { return variances_; }
  const LatentFrame& frame() const { return frame_; }

 private:
  MlpSpec target_spec_;
  NormStats stats_;
  std::vector<double> origin_;
  DenseMatrix basis_;
  std::array<double, 2> variances_;
  LatentFrame frame_;
};

/// Throws DegenerateError unless the checkpoints span at least two directions.
PcaPlane fit_pca(const Trajectory& traj);
/// Fit on already-normalized rows.
PcaPlane fit_pca(const DenseMatrix& normalized, const MlpSpec& target_spec, const NormStats& stats);

NvtjFile pca_to_nvtj(const PcaPlane& plane);
PcaPlane pca_from_nvtj(const NvtjFile& file);

/// Top two eigenpairs of the centered Gram matrix of `rows`, as unit vectors in
/// row space (2 x cols) and their eigenvalues. Shared with the kernel baseline tests.
struct TopTwo {
  DenseMatrix directions;
  std::array<double, 2> eigenvalues;
};
TopTwo principal_directions(const DenseMatrix& centered_rows);

}  // namespace lmv
