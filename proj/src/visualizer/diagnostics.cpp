#include "lmv/visualizer/diagnostics.hpp"

#include <cmath>

#include "lmv/core/errors.hpp"
#include "lmv/core/rng.hpp"
#include "lmv/visualizer/losses.hpp"

namespace lmv {

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) throw ValidationError("pearson: need two equal-length samples of size >= 2");
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i] / n;
    mb += b[i] / n;
  }
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) throw DegenerateError("pearson: a sample has zero variance");
  return sab / std::sqrt(saa * sbb);
}

ScalingCheck grid_scaling_check(const Projector& model, const Trajectory& traj, std::size_t count, std::uint64_t seed) {
  const NormStats& stats = model.norm_stats();
  DenseMatrix points(traj.size(), traj.dimension());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto z = stats.normalize(traj.checkpoints[i]);
    std::copy(z.begin(), z.end(), points.row(i).begin());
  }
  CounterRng rng(seed, streams::kEvalSamples);
  DenseMatrix samples(count, 2);
  for (double& v : samples.values()) v = rng.uniform(-1.0, 1.0);
  const GridMatch m = match_grid(model.decode_rows(samples), samples, points, model.encode_rows(points));
  ScalingCheck out;
  out.l = m.l;
  for (double d : m.d) out.log_d.push_back(std::log(d + kGridLogEps));
  out.correlation = pearson(out.l, out.log_d);
  return out;
}

}  // namespace lmv
