#include "lmv/visualizer/config.hpp"

#include <cmath>
#include <numbers>

#include "lmv/core/errors.hpp"

namespace lmv {

std::string to_string(AnchorMode m) {
  switch (m) {
    case AnchorMode::none: return "none";
    case AnchorMode::polar: return "polar";
    case AnchorMode::center: return "center";
    case AnchorMode::circle: return "circle";
  }
  return "?";
}

AnchorMode anchor_mode_from_string(const std::string& s) {
  for (AnchorMode m : {AnchorMode::none, AnchorMode::polar, AnchorMode::center, AnchorMode::circle})
    if (to_string(m) == s) return m;
  throw ConfigError("unknown anchor mode '" + s + "'");
}

void VisualizerConfig::validate() const {
  if (hidden.empty()) throw ConfigError("visualizer: need at least one hidden layer");
  for (std::size_t h : hidden)
    if (h < 1) throw ConfigError("visualizer: hidden sizes must be >= 1");
  if (!(lr > 0.0)) throw ConfigError("visualizer: lr must be > 0");
  if (batch_size < 1) throw ConfigError("visualizer: batch size must be >= 1");
  for (double c : {c_rec, c_anch, c_traj, c_grid})
    if (!(c >= 0.0) || !std::isfinite(c)) throw ConfigError("visualizer: constraint weights must be finite and >= 0");
  if (!(anchor_radius > 0.0 && anchor_radius <= 1.0)) throw ConfigError("visualizer: anchor radius must lie in (0, 1]");
  if (c_grid > 0.0 && !(l_max > 0.0)) throw ConfigError("visualizer: l_max must be > 0 when c_grid > 0");
  if (c_grid > 0.0 && grid_samples < 1) throw ConfigError("visualizer: grid_samples must be >= 1");
}

VisualizerConfig VisualizerConfig::reference_preset() {
  VisualizerConfig c;
  c.hidden = {991, 125, 15};
  c.batch_size = 32;
  c.lr = 5e-4;
  c.c_rec = 1e4;
  return c;
}

void to_json(Json& j, const VisualizerConfig& c) {
  j = Json{{"hidden", c.hidden},
           {"lr", c.lr},
           {"batch_size", c.batch_size},
           {"epochs", c.epochs},
           {"c_rec", c.c_rec},
           {"c_anch", c.c_anch},
           {"c_traj", c.c_traj},
           {"c_grid", c.c_grid},
           {"anchor_mode", to_string(c.anchor_mode)},
           {"anchor_radius", c.anchor_radius},
           {"circle_count", c.circle_count},
           {"circle_models", c.circle_models},
           {"l_max", c.l_max},
           {"grid_samples", c.grid_samples},
           {"seed", c.seed}};
}

void from_json(const Json& j, VisualizerConfig& c) {
  read_optional(j, "hidden", c.hidden);
  read_optional(j, "lr", c.lr);
  read_optional(j, "batch_size", c.batch_size);
  read_optional(j, "epochs", c.epochs);
  read_optional(j, "c_rec", c.c_rec);
  read_optional(j, "c_anch", c.c_anch);
  read_optional(j, "c_traj", c.c_traj);
  read_optional(j, "c_grid", c.c_grid);
  if (j.contains("anchor_mode")) c.anchor_mode = anchor_mode_from_string(j.at("anchor_mode").get<std::string>());
  read_optional(j, "anchor_radius", c.anchor_radius);
  read_optional(j, "circle_count", c.circle_count);
  read_optional(j, "circle_models", c.circle_models);
  read_optional(j, "l_max", c.l_max);
  read_optional(j, "grid_samples", c.grid_samples);
  read_optional(j, "seed", c.seed);
}

AnchorSet build_anchors(AnchorMode mode, const Trajectory& traj, double r, std::size_t n_circle,
                        const std::vector<std::size_t>& designated) {
  if (traj.size() < 2) throw ValidationError("anchors: trajectory needs at least 2 checkpoints");
  if (!(r > 0.0 && r <= 1.0)) throw ConfigError("anchors: radius must lie in (0, 1]");
  AnchorSet a;
  const std::size_t last = traj.size() - 1;
  switch (mode) {
    case AnchorMode::none:
      break;
    case AnchorMode::polar:
      a.indices = {0, last};
      a.targets = {Latent{-r, -r}, Latent{r, r}};
      break;
    case AnchorMode::center:
      a.indices = {last};
      a.targets = {Latent{0.0, 0.0}};
      break;
    case AnchorMode::circle: {
      std::vector<std::size_t> pool = designated;
      if (pool.empty()) {
        if (traj.segment_starts.size() > 1) {
          for (std::size_t s = 1; s < traj.segment_starts.size(); ++s) pool.push_back(traj.segment_starts[s] - 1);
          pool.push_back(last);
        } else {
          for (std::size_t i = 0; i <= last; ++i) pool.push_back(i);
        }
      }
      for (std::size_t i : pool)
        if (i > last) throw ConfigError("anchors: designated checkpoint " + std::to_string(i) + " out of range");
      const std::size_t n = n_circle == 0 ? pool.size() : n_circle;
      if (n > pool.size())
        throw ConfigError("anchors: circle pinning asks for " + std::to_string(n) + " models but only " +
                          std::to_string(pool.size()) + " are designated");
      if (n == 0) throw ConfigError("anchors: circle pinning needs at least one model");
      for (std::size_t k = 0; k < n; ++k) {
        // evenly spaced picks from the designated set, always including its ends
        const std::size_t pick = n == 1 ? pool.size() - 1 : (k * (pool.size() - 1)) / (n - 1);
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
        a.indices.push_back(pool[pick]);
        a.targets.push_back(Latent{r * std::sin(angle), r * std::cos(angle)});
      }
      break;
    }
  }
  return a;
}

AnchorSet build_anchors(const VisualizerConfig& config, const Trajectory& traj) {
  return build_anchors(config.anchor_mode, traj, config.anchor_radius, config.circle_count, config.circle_models);
}

}  // namespace lmv
