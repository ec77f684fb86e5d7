#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "lmv/app/experiment.hpp"
#include "lmv/core/json_io.hpp"
#include "lmv/harness/trajectory.hpp"
#include "lmv/oracles/problem.hpp"

namespace lmv {

struct RecipeOptions {
  std::uint64_t seed = 0;
  std::filesystem::path out;
  std::vector<std::string> formats{"json", "csv", "svg"};
  std::ostream* log = nullptr;  // progress lines
};

const std::vector<std::string>& recipe_names();

/// Runs a canned experiment under `options.out` and returns its summary,
/// which is also written to summary.json.
Json run_recipe(const std::string& name, const RecipeOptions& options);

// Desk-scale building blocks shared by the recipes and the acceptance suite.
VisualizerConfig desk_visualizer(std::uint64_t seed);
ExperimentConfig convection_experiment(double beta, double c_r, std::uint64_t seed);
ExperimentConfig eigen_experiment(bool physics_guided, std::uint64_t seed);

/// One trajectory per balancing scheme, all from `init`, keyed by scheme name.
/// CW uses `cw_weights`.
std::map<std::string, Trajectory> balancing_runs(std::shared_ptr<const TargetProblem> problem, const FlatParams& init,
                                                 const TrainSettings& settings,
                                                 const std::map<std::string, double>& cw_weights);

}  // namespace lmv
