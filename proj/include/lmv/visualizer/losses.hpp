#pragma once

#include <vector>

#include "lmv/visualizer/config.hpp"
#include "lmv/visualizer/model.hpp"

namespace lmv {

/// Parameter gradients of the auto-encoder, accumulated by the loss functions.
struct AeGradient {
  std::vector<double> encoder;
  std::vector<double> decoder;

  static AeGradient zeros(const AutoEncoder& ae);
};

inline constexpr double kGridLogEps = 1e-12;

/// Mean over batch rows and coordinates of (m - D(E(m)))^2.
double loss_rec(const AutoEncoder& ae, const DenseMatrix& batch, AeGradient* grad = nullptr);

/// Mean over anchors and both coordinates of (E(m_i) - A_i)^2; 0 without anchors.
double loss_anch(const AutoEncoder& ae, const DenseMatrix& points, const AnchorSet& anchors,
                 AeGradient* grad = nullptr);

/// Population variance of the latent step sizes between consecutive
/// checkpoints of each run; 0 with fewer than two steps.
double loss_traj(const AutoEncoder& ae, const DenseMatrix& points, const std::vector<std::size_t>& segment_starts,
                 AeGradient* grad = nullptr);

/// mean_g (log(d_g + eps) - l_g - log d_max + l_max)^2 where d_g is the
/// distance from D(g) to its nearest checkpoint and l_g the latent distance
/// from g to that checkpoint's code.
double loss_grid(const AutoEncoder& ae, const DenseMatrix& points, const DenseMatrix& samples, double d_max,
                 double l_max, AeGradient* grad = nullptr);

// Forms acting on precomputed latents Z (rows = checkpoints); they add
// dLoss/dZ into dz when given.
double anchor_loss_latent(const DenseMatrix& z, const AnchorSet& anchors, DenseMatrix* dz);
double traj_loss_latent(const DenseMatrix& z, const std::vector<std::size_t>& segment_starts, DenseMatrix* dz);

struct GridMatch {
  std::vector<std::size_t> nearest;  // checkpoint index per sample (ties to lowest index)
  std::vector<double> d;             // parameter-space distance
  std::vector<double> l;             // latent distance to the nearest checkpoint's code
};

/// Nearest checkpoints of decoded samples, with both distances.
GridMatch match_grid(const DenseMatrix& decoded, const DenseMatrix& samples, const DenseMatrix& points,
                     const DenseMatrix& codes);

struct LossBreakdown {
  double rec = 0.0;
  double anch = 0.0;
  double traj = 0.0;
  double grid = 0.0;
  double total = 0.0;
};

/// Everything one training step needs, with a single encoder pass over the
/// full trajectory shared by the anchor, spacing and grid terms.
struct StepInputs {
  const DenseMatrix* points = nullptr;  // all normalized checkpoints
  const std::vector<std::size_t>* segment_starts = nullptr;
  const AnchorSet* anchors = nullptr;
  const DenseMatrix* batch = nullptr;    // rows for the reconstruction term
  const DenseMatrix* samples = nullptr;  // latent samples for the grid term
  double d_max = 1.0;
};

LossBreakdown weighted_loss(const AutoEncoder& ae, const VisualizerConfig& config, const StepInputs& in,
                            AeGradient* grad = nullptr);

}  // namespace lmv
