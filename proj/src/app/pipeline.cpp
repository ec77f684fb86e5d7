#include "lmv/app/pipeline.hpp"

#include <algorithm>
#include <cstdio>

#include "lmv/baselines/kpca.hpp"
#include "lmv/baselines/pca.hpp"
#include "lmv/core/errors.hpp"
#include "lmv/core/hash.hpp"
#include "lmv/harness/training.hpp"
#include "lmv/landscape/cka.hpp"
#include "lmv/render/svg.hpp"
#include "lmv/visualizer/trainer.hpp"

namespace lmv {

namespace {

Json log_to_json(const VisualizerLog& log) {
  Json rows = Json::array();
  for (const auto& e : log.epochs)
    rows.push_back(Json{{"rec", e.rec}, {"anch", e.anch}, {"traj", e.traj}, {"grid", e.grid}, {"total", e.total}});
  return rows;
}

std::vector<std::string> pick(const std::vector<std::string>& requested, const std::vector<std::string>& fallback) {
  return requested.empty() ? fallback : requested;
}

std::vector<std::string> resolve_oracles(const ExperimentConfig& config, const Trajectory& traj,
                                         const std::vector<std::string>& requested) {
  if (!requested.empty()) return requested;
  if (!config.oracles.empty()) return config.oracles;
  return trajectory_oracles(traj).names();
}

std::vector<std::string> resolve_methods(const Workspace& ws, const std::vector<std::string>& requested) {
  if (!requested.empty()) return requested;
  auto m = fitted_methods(ws);
  if (m.empty()) throw NotFoundError("no fitted models under " + ws.path("models").string() + "; run 'fit' first");
  return m;
}

std::string grid_stem(const std::string& method, const std::string& name, std::size_t k) {
  return "landscapes/" + method + "/" + name + (k == 0 ? "" : "_w" + std::to_string(k));
}

}  // namespace

std::string model_file(const std::string& method) { return "models/" + method + ".nvtj"; }

std::shared_ptr<const TargetProblem> trajectory_problem(const Trajectory& traj) {
  const Json* meta = &traj.metadata;
  if (meta->contains("runs") && !meta->at("runs").empty()) meta = &meta->at("runs").at(0);
  if (!meta->contains("problem")) throw NotFoundError("trajectory metadata does not name its problem");
  return make_problem(meta->at("problem"));
}

OracleSet trajectory_oracles(const Trajectory& traj) { return register_oracles(trajectory_problem(traj)); }

Trajectory generate_stage(const ExperimentConfig& config, Workspace& ws) {
  const auto problem = make_problem(config.problem);
  Trajectory t = run_training(problem, initial_network(*problem, config.train.seed), config.scheme, config.train);
  ws.write(kTrajectoryFile, encode_nvtj(trajectory_to_nvtj(t)));
  ws.record_seeds(config.seeds());
  return t;
}

Trajectory load_trajectory_artifact(const Workspace& ws) {
  if (!ws.exists(kTrajectoryFile))
    throw NotFoundError("missing " + ws.path(kTrajectoryFile).string() + "; run 'generate' first");
  return trajectory_from_nvtj(decode_nvtj(ws.read(kTrajectoryFile)));
}

std::unique_ptr<Projector> fit_projector(const std::string& method, const Trajectory& traj,
                                         const ExperimentConfig& config, Workspace* ws) {
  if (method == "visualizer") {
    VisualizerFit fit = train_visualizer(traj, config.visualizer);
    if (ws) {
      ws->write(model_file(method), encode_nvtj(visualizer_to_nvtj(fit.model)));
      ws->write("models/visualizer_log.json", log_to_json(fit.log).dump(1) + "\n");
    }
    return std::make_unique<VisualizerModel>(std::move(fit.model));
  }
  if (method == "pca") {
    auto m = std::make_unique<PcaPlane>(fit_pca(traj));
    if (ws) ws->write(model_file(method), encode_nvtj(pca_to_nvtj(*m)));
    return m;
  }
  if (method == "kpca") {
    auto m = std::make_unique<KpcaModel>(fit_kpca(traj, config.kpca));
    if (ws) ws->write(model_file(method), encode_nvtj(kpca_to_nvtj(*m)));
    return m;
  }
  throw UsageError("unknown method '" + method + "' (expected visualizer, pca or kpca)");
}

void fit_stage(const ExperimentConfig& config, Workspace& ws, std::vector<std::string> methods) {
  const Trajectory traj = load_trajectory_artifact(ws);
  if (methods.empty()) {
    methods.push_back("visualizer");
    methods.insert(methods.end(), config.baselines.begin(), config.baselines.end());
  }
  ws.record_input(kTrajectoryFile, sha256_hex(ws.read(kTrajectoryFile)));
  for (const auto& m : methods) fit_projector(m, traj, config, &ws);
  ws.record_seeds(config.seeds());
}

std::unique_ptr<Projector> load_projector(const Workspace& ws, const std::string& method) {
  const std::string rel = model_file(method);
  if (std::find(projector_methods().begin(), projector_methods().end(), method) == projector_methods().end())
    throw UsageError("unknown method '" + method + "' (expected visualizer, pca or kpca)");
  if (!ws.exists(rel)) throw NotFoundError("missing " + ws.path(rel).string() + "; run 'fit' first");
  const NvtjFile f = decode_nvtj(ws.read(rel));
  if (method == "visualizer") return std::make_unique<VisualizerModel>(visualizer_from_nvtj(f));
  if (method == "pca") return std::make_unique<PcaPlane>(pca_from_nvtj(f));
  return std::make_unique<KpcaModel>(kpca_from_nvtj(f));
}

std::vector<std::string> fitted_methods(const Workspace& ws) {
  std::vector<std::string> out;
  for (const auto& m : projector_methods())
    if (ws.exists(model_file(m))) out.push_back(m);
  return out;
}

void emit_grid(Workspace& ws, const std::string& stem, const LandscapeGrid& grid,
               const std::vector<std::string>& formats, const std::optional<RenderStyle>& style) {
  for (const auto& f : formats) {
    if (f == "json") ws.write(stem + ".json", grid_to_json(grid).dump(1) + "\n");
    else if (f == "csv") ws.write(stem + ".csv", grid_to_csv(grid));
    else if (f == "svg") ws.write(stem + ".svg", render_svg(grid, style ? *style : default_style(grid.field_name)));
    else throw UsageError("unknown format '" + f + "' (expected svg, json or csv)");
  }
}

std::vector<std::string> landscape_stage(const ExperimentConfig& config, Workspace& ws, const GridRequest& req) {
  const Trajectory traj = load_trajectory_artifact(ws);
  const OracleSet oracles = trajectory_oracles(traj);
  const auto methods = resolve_methods(ws, req.methods);
  const auto names = resolve_oracles(config, traj, req.oracles);
  const auto grids = req.grids.empty() ? config.grids : req.grids;
  const auto formats = pick(req.formats, config.formats);
  const std::string traj_hash = trajectory_hash(traj);
  std::vector<std::string> stems;
  for (const auto& m : methods) {
    const auto model = load_projector(ws, m);
    for (const auto& name : names)
      for (std::size_t k = 0; k < grids.size(); ++k) {
        LandscapeGrid g = evaluate_grid(*model, grids[k], oracles.get(name), traj);
        g.provenance["trajectory_sha256"] = traj_hash;
        const std::string stem = grid_stem(m, name, k);
        emit_grid(ws, stem, g, formats, config.render);
        stems.push_back(stem);
      }
  }
  return stems;
}

std::vector<std::string> density_stage(const ExperimentConfig& config, Workspace& ws, const GridRequest& req) {
  const Trajectory traj = load_trajectory_artifact(ws);
  const auto problem = trajectory_problem(traj);
  const DenseMatrix probes = problem->probe_inputs(config.density.probes, config.seed);
  const auto methods = resolve_methods(ws, req.methods);
  std::vector<GridSpec> grids = req.grids;
  if (grids.empty()) {
    GridSpec g;
    g.resolution = config.density.resolution;
    grids.push_back(g);
  }
  const auto formats = pick(req.formats, config.formats);
  std::vector<std::string> stems;
  for (const auto& m : methods) {
    const auto model = load_projector(ws, m);
    for (std::size_t k = 0; k < grids.size(); ++k) {
      LandscapeGrid g = density_grid(*model, grids[k], probes, &traj);
      g.provenance["trajectory_sha256"] = trajectory_hash(traj);
      g.provenance["probe_seed"] = config.seed;
      const std::string stem = grid_stem(m, "density", k);
      emit_grid(ws, stem, g, formats, config.render);
      stems.push_back(stem);
    }
  }
  return stems;
}

std::vector<FidelityReport> fidelity_stage(const ExperimentConfig& config, Workspace& ws, const GridRequest& req) {
  const Trajectory traj = load_trajectory_artifact(ws);
  const OracleSet oracles = trajectory_oracles(traj);
  const auto methods = resolve_methods(ws, req.methods);
  const auto names = resolve_oracles(config, traj, req.oracles);
  std::vector<FidelityReport> reports;
  Json rows = Json::array();
  for (const auto& m : methods) {
    const auto model = load_projector(ws, m);
    for (const auto& name : names) {
      reports.push_back(fidelity(*model, traj, oracles.get(name)));
      rows.push_back(fidelity_to_json(reports.back()));
    }
  }
  const Json out{{"trajectory_sha256", trajectory_hash(traj)}, {"reports", rows}};
  ws.write("fidelity.json", out.dump(1) + "\n");
  return reports;
}

std::string fidelity_table(const std::vector<FidelityReport>& reports) {
  std::string s = "method      oracle                 e_relative      e_proj\n";
  char buf[160];
  for (const auto& r : reports) {
    std::snprintf(buf, sizeof buf, "%-11s %-22s %-15.6g %-.6g\n", r.method.c_str(), r.oracle.c_str(), r.e_relative,
                  r.e_proj);
    s += buf;
  }
  return s;
}

}  // namespace lmv
