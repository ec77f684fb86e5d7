#include "lmv/visualizer/trainer.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "lmv/core/adam.hpp"
#include "lmv/core/errors.hpp"
#include "lmv/core/rng.hpp"

namespace lmv {

DenseMatrix latent_samples(std::size_t count, std::uint64_t seed, std::uint64_t index) {
  CounterRng rng(seed, sub_stream(streams::kGridSamples, index));
  DenseMatrix s(count, 2);
  for (double& v : s.values()) v = rng.uniform(-1.0, 1.0);
  return s;
}

VisualizerFit train_visualizer(const Trajectory& traj, const VisualizerConfig& config) {
  config.validate();
  const NormalizedTrajectory norm = normalize(traj);
  const AnchorSet anchors = build_anchors(config, traj);
  const std::size_t k = traj.size();
  const std::size_t n = traj.dimension();

  AutoEncoder ae = AutoEncoder::create(n, config.hidden, config.seed);
  AdamState enc_adam = AdamState::for_size(ae.encoder.theta.size(), config.lr);
  AdamState dec_adam = AdamState::for_size(ae.decoder.theta.size(), config.lr);

  const std::size_t batch = std::min(config.batch_size, k);
  const std::size_t steps_per_epoch = (k + batch - 1) / batch;
  std::vector<std::size_t> order(k);
  VisualizerLog log;
  log.epochs.reserve(config.epochs);
  std::uint64_t step = 0;
  DenseMatrix rows;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    CounterRng shuffle(config.seed, sub_stream(streams::kBatchShuffle, epoch));
    for (std::size_t i = k; i > 1; --i) std::swap(order[i - 1], order[shuffle.below(i)]);

    LossBreakdown mean;
    for (std::size_t b = 0; b < steps_per_epoch; ++b) {
      const std::size_t begin = b * batch;
      const std::size_t end = std::min(begin + batch, k);
      rows = DenseMatrix(end - begin, n);
      for (std::size_t i = begin; i < end; ++i) {
        const auto src = norm.points.row(order[i]);
        std::copy(src.begin(), src.end(), rows.row(i - begin).begin());
      }
      DenseMatrix samples;
      if (config.c_grid > 0.0) samples = latent_samples(config.grid_samples, config.seed, step);
      StepInputs in{&norm.points, &traj.segment_starts, &anchors, &rows, config.c_grid > 0.0 ? &samples : nullptr,
                    norm.d_max};
      AeGradient grad = AeGradient::zeros(ae);
      const LossBreakdown lb = weighted_loss(ae, config, in, &grad);
      if (!std::isfinite(lb.total)) {
        std::ostringstream msg;
        msg << "visualizer training diverged at epoch " << epoch << ": rec=" << lb.rec << " anch=" << lb.anch
            << " traj=" << lb.traj << " grid=" << lb.grid;
        throw NumericalError(msg.str());
      }
      adam_step(enc_adam, ae.encoder.theta, grad.encoder);
      adam_step(dec_adam, ae.decoder.theta, grad.decoder);
      const double w = 1.0 / static_cast<double>(steps_per_epoch);
      mean.rec += w * lb.rec;
      mean.anch += w * lb.anch;
      mean.traj += w * lb.traj;
      mean.grid += w * lb.grid;
      mean.total += w * lb.total;
      ++step;
    }
    log.epochs.push_back(mean);
  }
  VisualizerModel model(std::move(ae), traj.spec, norm.stats, norm.d_max, config, trajectory_hash(traj));
  return {std::move(model), std::move(log)};
}

}  // namespace lmv
