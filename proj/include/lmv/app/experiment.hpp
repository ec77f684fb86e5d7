#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lmv/baselines/kpca.hpp"
#include "lmv/core/json_io.hpp"
#include "lmv/harness/balancing.hpp"
#include "lmv/harness/training.hpp"
#include "lmv/landscape/grid.hpp"
#include "lmv/render/svg.hpp"
#include "lmv/visualizer/config.hpp"

namespace lmv {

inline constexpr int kExperimentVersion = 1;

struct DensitySettings {
  std::size_t resolution = 21;
  std::size_t probes = 64;
};

/// One end-to-end run: problem, training, projectors, grids and rendering.
struct ExperimentConfig {
  std::uint64_t seed = 0;
  Json problem;
  BalancingScheme scheme;
  TrainSettings train;
  VisualizerConfig visualizer;
  std::vector<std::string> baselines{"pca", "kpca"};
  KpcaOptions kpca;
  std::vector<std::string> oracles;  // empty: every oracle of the problem
  std::vector<GridSpec> grids{GridSpec{}};
  DensitySettings density;
  std::optional<RenderStyle> render;  // unset: a default per field
  std::vector<std::string> formats{"json", "csv", "svg"};
  std::filesystem::path out = "lmviz_out";

  void validate() const;
  /// Overrides every seed in the config.
  void set_seed(std::uint64_t s);
  Json seeds() const;
};

void to_json(Json& j, const ExperimentConfig& c);
/// Section seeds default to the global seed; `out` stays as written.
ExperimentConfig experiment_from_json(const Json& j);
/// Reads a config file; a relative `out` resolves against the file's directory.
ExperimentConfig load_experiment(const std::filesystem::path& path);

const std::vector<std::string>& projector_methods();

}  // namespace lmv
