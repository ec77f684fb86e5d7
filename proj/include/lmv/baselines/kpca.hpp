#pragma once

#include "lmv/baselines/pca.hpp"

namespace lmv {

enum class KernelKind { rbf, linear };

struct KpcaOptions {
  KernelKind kernel = KernelKind::rbf;
  double gamma = 0.0;          // 0 selects 1 / (2 median^2) of pairwise checkpoint distances
  double ridge = 1e-6;         // inverse-map regularization
  // Bandwidth of the inverse map, which regresses checkpoints on the raw
  // (unscaled) kernel coordinates. 0 reuses gamma for the RBF kernel and the
  // median heuristic on the coordinates otherwise.
  double decoder_gamma = 0.0;
};

void to_json(Json& j, const KpcaOptions& o);
void from_json(const Json& j, KpcaOptions& o);

/// Kernel PCA on the normalized checkpoints with a kernel-ridge inverse map
/// from latent codes back to parameter space.
class KpcaModel final : public Projector {
 public:
  KpcaModel(MlpSpec target_spec, NormStats stats, KpcaOptions options, DenseMatrix support, DenseMatrix alphas,
            std::vector<double> kernel_col_mean, double kernel_mean, LatentFrame frame, DenseMatrix codes,
            DenseMatrix inverse_coef);

  std::string name() const override { return "kpca"; }
  Latent encode(std::span<const double> normalized) const override;
  std::vector<double> decode(const Latent& z) const override;
  const MlpSpec& target_spec() const override { return target_spec_; }
  const NormStats& norm_stats() const override { return stats_; }

  /// Projections onto the two kernel principal directions before rescaling.
  std::array<double, 2> raw_coordinates(std::span<const double> normalized) const;
  const KpcaOptions& options() const { return options_; }
  const DenseMatrix& codes() const { return codes_; }  // latent codes of the support points
  double kernel(std::span<const double> a, std::span<const double> b) const;
  /// Residual of the ridge fit at each support point (normalized-space distance).
  std::vector<double> inverse_residuals() const;

  // Raw state, for serialization.
  const DenseMatrix& support() const { return support_; }
  const DenseMatrix& alphas() const { return alphas_; }
  const std::vector<double>& kernel_col_mean() const { return kernel_col_mean_; }
  double kernel_mean() const { return kernel_mean_; }
  const LatentFrame& frame() const { return frame_; }
  const DenseMatrix& inverse_coef() const { return inverse_coef_; }

 private:
  MlpSpec target_spec_;
  NormStats stats_;
  KpcaOptions options_;
  DenseMatrix support_;  // K x n
  DenseMatrix alphas_;   // K x 2
  std::vector<double> kernel_col_mean_;
  double kernel_mean_;
  LatentFrame frame_;
  DenseMatrix codes_;         // K x 2
  DenseMatrix inverse_coef_;  // K x n
};

KpcaModel fit_kpca(const Trajectory& traj, KpcaOptions options = {});
KpcaModel fit_kpca(const DenseMatrix& normalized, const MlpSpec& target_spec, const NormStats& stats,
                   KpcaOptions options = {});

/// Median of pairwise Euclidean distances between rows.
double median_pairwise_distance(const DenseMatrix& rows);

NvtjFile kpca_to_nvtj(const KpcaModel& model);
KpcaModel kpca_from_nvtj(const NvtjFile& file);

}  // namespace lmv
