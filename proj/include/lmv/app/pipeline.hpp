#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lmv/app/experiment.hpp"
#include "lmv/app/workspace.hpp"
#include "lmv/harness/projector.hpp"
#include "lmv/harness/trajectory.hpp"
#include "lmv/landscape/fidelity.hpp"
#include "lmv/oracles/problem.hpp"

namespace lmv {

inline constexpr const char* kTrajectoryFile = "trajectory.nvtj";
std::string model_file(const std::string& method);

/// Oracles of the problem a trajectory was generated on. For concatenated
/// runs the first run's problem is used.
OracleSet trajectory_oracles(const Trajectory& traj);
std::shared_ptr<const TargetProblem> trajectory_problem(const Trajectory& traj);

Trajectory generate_stage(const ExperimentConfig& config, Workspace& ws);
Trajectory load_trajectory_artifact(const Workspace& ws);

/// Fits and saves each method; an empty list means the visualizer plus the
/// configured baselines.
void fit_stage(const ExperimentConfig& config, Workspace& ws, std::vector<std::string> methods = {});
std::unique_ptr<Projector> fit_projector(const std::string& method, const Trajectory& traj,
                                         const ExperimentConfig& config, Workspace* ws = nullptr);
std::unique_ptr<Projector> load_projector(const Workspace& ws, const std::string& method);
std::vector<std::string> fitted_methods(const Workspace& ws);

struct GridRequest {
  std::vector<std::string> methods;  // empty: every fitted method
  std::vector<std::string> oracles;  // empty: the config's oracles
  std::vector<GridSpec> grids;       // empty: the config's grids
  std::vector<std::string> formats;  // empty: the config's formats
};

/// Writes landscapes/<method>/<oracle>[_w<k>].<fmt>; returns the stems written.
std::vector<std::string> landscape_stage(const ExperimentConfig& config, Workspace& ws, const GridRequest& req);
std::vector<std::string> density_stage(const ExperimentConfig& config, Workspace& ws, const GridRequest& req);
/// Reports every fitted method on each oracle and writes fidelity.json.
std::vector<FidelityReport> fidelity_stage(const ExperimentConfig& config, Workspace& ws, const GridRequest& req);

/// Serializes a grid in the requested formats under `stem`.
void emit_grid(Workspace& ws, const std::string& stem, const LandscapeGrid& grid,
               const std::vector<std::string>& formats, const std::optional<RenderStyle>& style);

/// Fixed-width text table of fidelity reports.
std::string fidelity_table(const std::vector<FidelityReport>& reports);

}  // namespace lmv
