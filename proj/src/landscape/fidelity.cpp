#include "lmv/landscape/fidelity.hpp"

#include <cmath>

#include "lmv/core/errors.hpp"

namespace lmv {

FidelityReport fidelity(const Projector& model, const Trajectory& traj, const LossOracle& oracle) {
  if (!(traj.spec == model.target_spec())) throw ShapeError(model.name() + ": trajectory layout differs from the fitted one");
  if (traj.size() < 2) throw ValidationError("fidelity: need at least 2 checkpoints");
  FidelityReport r;
  r.method = model.name();
  r.oracle = oracle.name;
  r.loss_true = traj.loss_column(oracle.name);
  const NormStats& stats = model.norm_stats();
  DenseMatrix normalized(traj.size(), traj.dimension());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto z = stats.normalize(traj.checkpoints[i]);
    std::copy(z.begin(), z.end(), normalized.row(i).begin());
  }
  r.d_max = distance(normalized.row(0), normalized.row(traj.size() - 1));
  if (!(r.d_max > 0.0)) throw DegenerateError("fidelity: d_max is 0");
  const DenseMatrix recon = model.decode_rows(model.encode_rows(normalized));
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const FlatParams net{traj.spec, stats.denormalize(recon.row(i))};
    const double lp = oracle.eval(net);
    const double err = std::abs(lp - r.loss_true[i]);
    r.loss_projected.push_back(lp);
    r.loss_error.push_back(err);
    r.relative_error.push_back(err / (std::abs(r.loss_true[i]) + kRelativeEps));
    r.distance.push_back(distance(recon.row(i), normalized.row(i)));
  }
  for (std::size_t i = 0; i < traj.size(); ++i) {
    r.e_relative += r.relative_error[i];
    r.e_proj += r.distance[i] / r.d_max;
  }
  r.e_relative /= static_cast<double>(traj.size());
  r.e_proj /= static_cast<double>(traj.size());
  return r;
}

LandscapeGrid error_grid(const Projector& model, const Trajectory& traj, const LossOracle& oracle, ErrorKind kind,
                         const GridSpec& spec) {
  LandscapeGrid g = evaluate_grid(model, spec, oracle, traj);
  const FidelityReport r = fidelity(model, traj, oracle);
  const auto& values = kind == ErrorKind::loss_error ? r.loss_error : r.distance;
  for (auto& p : g.overlay) p.value = values[p.index];
  g.overlay_name = kind == ErrorKind::loss_error ? "abs_loss_error" : "param_distance";
  g.provenance["overlay"] = g.overlay_name;
  return g;
}

Json fidelity_to_json(const FidelityReport& r) {
  return Json{{"method", r.method},
              {"oracle", r.oracle},
              {"e_relative", r.e_relative},
              {"e_proj", r.e_proj},
              {"e_proj_normalization", "d_max in z-scored parameter space"},
              {"d_max", r.d_max},
              {"loss_true", r.loss_true},
              {"loss_projected", r.loss_projected},
              {"loss_error", r.loss_error},
              {"relative_error", r.relative_error},
              {"distance", r.distance}};
}

}  // namespace lmv
