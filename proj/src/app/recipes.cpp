#include "lmv/app/recipes.hpp"

#include <algorithm>
#include <cmath>

#include "lmv/app/pipeline.hpp"
#include "lmv/app/workspace.hpp"
#include "lmv/core/errors.hpp"
#include "lmv/harness/training.hpp"
#include "lmv/landscape/cka.hpp"
#include "lmv/oracles/convection.hpp"
#include "lmv/oracles/eigen_problem.hpp"
#include "lmv/oracles/toy_regression.hpp"
#include "lmv/visualizer/diagnostics.hpp"

namespace lmv {

namespace {

constexpr std::size_t kConvectionEpochs = 3000;
constexpr std::size_t kConvectionStride = 50;
constexpr std::size_t kEigenEpochs = 2000;
constexpr std::size_t kEigenStride = 40;
constexpr std::size_t kVisualizerEpochs = 2000;
constexpr std::size_t kLandscapeResolution = 25;
constexpr std::size_t kDensityResolution = 21;
constexpr std::size_t kScalingSamples = 500;
constexpr double kDensityRadius = 0.2;
constexpr double kZoomHalfWidth = 0.25;

void say(const RecipeOptions& o, const std::string& msg) {
  if (o.log) *o.log << msg << std::endl;
}

double final_loss(const Trajectory& t, const std::string& name) { return t.loss(name, t.size() - 1); }

GridSpec full_grid(std::size_t resolution) {
  GridSpec g;
  g.resolution = resolution;
  return g;
}

// Square sub-window centered on z, shifted to stay inside the latent square.
GridSpec zoom_grid(const Latent& z, std::size_t resolution) {
  GridSpec g;
  g.resolution = resolution;
  auto span = [](double c) {
    const double lo = std::clamp(c - kZoomHalfWidth, -1.0, 1.0 - 2 * kZoomHalfWidth);
    return std::pair{lo, lo + 2 * kZoomHalfWidth};
  };
  const auto [x1, x2] = span(z[0]);
  const auto [y1, y2] = span(z[1]);
  g.window = {x1, x2, y1, y2};
  return g;
}

// Explicit levels spanning the union of several fields, for panels drawn on one scale.
RenderStyle shared_style(const std::vector<LandscapeGrid>& grids) {
  std::vector<double> all;
  for (const auto& g : grids) all.insert(all.end(), g.field.values().begin(), g.field.values().end());
  RenderStyle style = default_style(grids.front().field_name);
  const LevelScale scale = compute_levels(DenseMatrix(1, all.size(), all), style);
  if (scale.levels.size() >= 2) {
    style.levels = scale.levels;
    style.spacing = scale.log ? LevelSpacing::log : LevelSpacing::linear;
  }
  return style;
}

std::string tag(const std::string& prefix, double v) { return prefix + format_double(v); }

Json sweep_run(const ExperimentConfig& cfg, Workspace& ws, const RecipeOptions& o) {
  const Trajectory t = generate_stage(cfg, ws);
  fit_stage(cfg, ws, {"visualizer"});
  GridRequest req;
  req.methods = {"visualizer"};
  req.oracles = {"L_total"};
  req.grids = {full_grid(kLandscapeResolution)};
  req.formats = o.formats;
  landscape_stage(cfg, ws, req);
  return Json{{"L_test", final_loss(t, "L_test")}, {"L_total", final_loss(t, "L_total")},
              {"L_total_physics", final_loss(t, "L_total_physics")}};
}

Json fig1(const RecipeOptions& o) {
  ExperimentConfig cfg = convection_experiment(10.0, 1.0, o.seed);
  cfg.oracles = {"L_total_physics"};
  cfg.formats = o.formats;
  Workspace ws(o.out);
  say(o, "fig1: training the beta = 10 convection network");
  const Trajectory traj = generate_stage(cfg, ws);
  say(o, "fig1: fitting visualizer, pca and kpca");
  fit_stage(cfg, ws, {"visualizer", "pca", "kpca"});
  const OracleSet oracles = trajectory_oracles(traj);
  const LossOracle& oracle = oracles.get("L_total_physics");

  std::vector<LandscapeGrid> full;
  std::vector<GridSpec> zooms;
  for (const auto& m : projector_methods()) {
    const auto model = load_projector(ws, m);
    full.push_back(evaluate_grid(*model, full_grid(kLandscapeResolution), oracle, traj));
    const Latent last = model->encode(model->norm_stats().normalize(traj.checkpoints.back()));
    zooms.push_back(zoom_grid(last, kLandscapeResolution));
  }
  const RenderStyle shared = shared_style(full);
  for (std::size_t i = 0; i < full.size(); ++i) {
    const std::string& m = projector_methods()[i];
    emit_grid(ws, "landscapes/" + m + "/L_total_physics", full[i], o.formats, shared);
    const auto model = load_projector(ws, m);
    emit_grid(ws, "landscapes/" + m + "/L_total_physics_zoom", evaluate_grid(*model, zooms[i], oracle, traj), o.formats,
              std::nullopt);
  }
  const auto reports = fidelity_stage(cfg, ws, GridRequest{});
  say(o, fidelity_table(reports));
  Json fid = Json::array();
  for (const auto& r : reports) fid.push_back(Json{{"method", r.method}, {"oracle", r.oracle}, {"e_relative", r.e_relative}, {"e_proj", r.e_proj}});
  return Json{{"fidelity", fid}, {"checkpoints", traj.size()}};
}

Json fig4(const RecipeOptions& o) {
  Workspace top(o.out);
  Json runs = Json::object();
  std::vector<double> tests;
  for (double beta : {1.0, 10.0, 30.0}) {
    say(o, "fig4-beta-sweep: beta = " + format_double(beta));
    ExperimentConfig cfg = convection_experiment(beta, 1.0, o.seed);
    cfg.visualizer.c_traj = 1.0;
    const std::string name = tag("beta", beta);
    Workspace ws(top.path(name));
    runs[name] = sweep_run(cfg, ws, o);
    runs[name]["beta"] = beta;
    tests.push_back(runs[name]["L_test"].get<double>());
    top.track(name + "/" + kManifestName);
  }
  return Json{{"runs", runs}, {"L_test_increasing_in_beta", tests[0] < tests[1] && tests[1] < tests[2]}};
}

Json fig8(const RecipeOptions& o) {
  Workspace top(o.out);
  Json runs = Json::object();
  std::vector<double> tests;
  for (double c_r : {1e-6, 1e-3, 1e-1}) {
    say(o, "fig8-creg-sweep: c_r = " + format_double(c_r));
    const ExperimentConfig cfg = convection_experiment(10.0, c_r, o.seed);
    const std::string name = tag("cr", c_r);
    Workspace ws(top.path(name));
    runs[name] = sweep_run(cfg, ws, o);
    runs[name]["c_r"] = c_r;
    tests.push_back(runs[name]["L_test"].get<double>());
    top.track(name + "/" + kManifestName);
  }
  return Json{{"runs", runs}, {"L_test_nondecreasing_in_c_r", tests[0] <= tests[1] && tests[1] <= tests[2]}};
}

Json fig5(const RecipeOptions& o) {
  Workspace top(o.out);
  ExperimentConfig base = convection_experiment(10.0, 1.0, o.seed);
  std::string traj_bytes;
  Json runs = Json::object();
  for (double l_max : {2.0, 8.0}) {
    ExperimentConfig cfg = base;
    cfg.visualizer.anchor_mode = AnchorMode::center;
    cfg.visualizer.c_anch = 1e2;
    cfg.visualizer.c_grid = 1.0;
    cfg.visualizer.l_max = l_max;
    const std::string name = tag("lmax", l_max);
    Workspace ws(top.path(name));
    if (traj_bytes.empty()) {
      say(o, "fig5-lmax: training the beta = 10 network");
      generate_stage(cfg, ws);
      traj_bytes = ws.read(kTrajectoryFile);
    } else {
      ws.write(kTrajectoryFile, traj_bytes);
      ws.record_seeds(cfg.seeds());
    }
    say(o, "fig5-lmax: fitting with l_max = " + format_double(l_max));
    fit_stage(cfg, ws, {"visualizer"});
    const Trajectory traj = load_trajectory_artifact(ws);
    const auto model = load_projector(ws, "visualizer");
    GridRequest req;
    req.methods = {"visualizer"};
    req.oracles = {"L_total"};
    req.grids = {full_grid(kLandscapeResolution)};
    req.formats = o.formats;
    landscape_stage(cfg, ws, req);
    const DenseMatrix probes = trajectory_problem(traj)->probe_inputs(cfg.density.probes, cfg.seed);
    LandscapeGrid density = density_grid(*model, full_grid(kDensityResolution), probes, &traj);
    emit_grid(ws, "landscapes/visualizer/density", density, o.formats, std::nullopt);
    const ScalingCheck scaling = grid_scaling_check(*model, traj, kScalingSamples, o.seed);
    runs[name] = Json{{"l_max", l_max},
                      {"scaling_correlation", scaling.correlation},
                      {"mean_density_near_trajectory", mean_field_near(density, encode_trajectory(*model, traj), kDensityRadius)}};
    top.track(name + "/" + kManifestName);
  }
  return Json{{"runs", runs},
              {"density_grows_with_l_max", runs["lmax8"]["mean_density_near_trajectory"].get<double>() >
                                               runs["lmax2"]["mean_density_near_trajectory"].get<double>()}};
}

Json mtl(const RecipeOptions& o) {
  ExperimentConfig cfg = convection_experiment(10.0, 1.0, o.seed);
  cfg.train.stride = 100;
  cfg.visualizer.anchor_mode = AnchorMode::circle;
  cfg.visualizer.circle_count = all_schemes().size();
  cfg.visualizer.c_anch = 1e2;
  cfg.oracles = {"L_total"};
  cfg.formats = o.formats;
  Workspace ws(o.out);
  const auto problem = make_problem(cfg.problem);
  const FlatParams init = initial_network(*problem, cfg.train.seed);
  say(o, "mtl-balancing: training one network per scheme");
  const auto runs = balancing_runs(problem, init, cfg.train, {{"L_r", 1.0}, {"L_ic", 100.0}, {"L_bc", 100.0}});
  std::vector<Trajectory> ordered;
  Json finals = Json::object();
  for (SchemeKind k : all_schemes()) {
    const Trajectory& t = runs.at(to_string(k));
    ws.write("runs/" + to_string(k) + ".nvtj", encode_nvtj(trajectory_to_nvtj(t)));
    finals[to_string(k)] = Json{{"L_total", final_loss(t, "L_total")}, {"L_test", final_loss(t, "L_test")}};
    ordered.push_back(t);
  }
  ws.write(kTrajectoryFile, encode_nvtj(trajectory_to_nvtj(concatenate(ordered))));
  ws.record_seeds(cfg.seeds());
  say(o, "mtl-balancing: fitting the shared manifold");
  fit_stage(cfg, ws, {"visualizer", "pca"});
  landscape_stage(cfg, ws, GridRequest{});

  // With a single loss term every scheme reduces to plain descent.
  const auto toy = std::make_shared<ToyRegression>(ToyConfig{});
  TrainSettings short_run;
  short_run.epochs = 200;
  short_run.stride = 20;
  short_run.seed = o.seed;
  const auto single = balancing_runs(toy, initial_network(*toy, o.seed), short_run, {});
  bool identical = true;
  for (const auto& [name, t] : single) identical = identical && t.checkpoints == single.at("EW").checkpoints;
  return Json{{"schemes", finals}, {"single_term_identical", identical}};
}

Json cophy(const RecipeOptions& o) {
  ExperimentConfig cfg = eigen_experiment(true, o.seed);
  const ExperimentConfig black = eigen_experiment(false, o.seed);
  cfg.oracles = {"Test-MSE", "S-Loss"};
  cfg.formats = o.formats;
  Workspace ws(o.out);
  const auto guided = make_problem(cfg.problem);
  const auto plain = make_problem(black.problem);
  const FlatParams init = initial_network(*guided, cfg.train.seed);
  say(o, "cophy-vs-blackbox: training both networks from one init");
  const Trajectory a = run_training(guided, init, cfg.scheme, cfg.train);
  const Trajectory b = run_training(plain, init, black.scheme, black.train);
  ws.write("runs/cophy.nvtj", encode_nvtj(trajectory_to_nvtj(a)));
  ws.write("runs/blackbox.nvtj", encode_nvtj(trajectory_to_nvtj(b)));
  ws.write(kTrajectoryFile, encode_nvtj(trajectory_to_nvtj(concatenate({a, b}))));
  ws.record_seeds(cfg.seeds());
  say(o, "cophy-vs-blackbox: fitting visualizer and pca");
  fit_stage(cfg, ws, {"visualizer", "pca"});
  landscape_stage(cfg, ws, GridRequest{});
  const double ta = final_loss(a, "Test-MSE"), tb = final_loss(b, "Test-MSE");
  return Json{{"cophy", Json{{"Test-MSE", ta}, {"S-Loss", final_loss(a, "S-Loss")}}},
              {"blackbox", Json{{"Test-MSE", tb}, {"S-Loss", final_loss(b, "S-Loss")}}},
              {"cophy_better_on_test", ta < tb}};
}

}  // namespace

const std::vector<std::string>& recipe_names() {
  static const std::vector<std::string> names{"fig1",       "fig4-beta-sweep", "fig5-lmax", "fig8-creg-sweep",
                                              "mtl-balancing", "cophy-vs-blackbox"};
  return names;
}

VisualizerConfig desk_visualizer(std::uint64_t seed) {
  VisualizerConfig v;
  v.hidden = {64, 16};
  v.lr = 1e-3;
  v.batch_size = 32;
  v.epochs = kVisualizerEpochs;
  v.seed = seed;
  return v;
}

ExperimentConfig convection_experiment(double beta, double c_r, std::uint64_t seed) {
  ConvectionConfig p;
  p.beta = beta;
  p.c_r = c_r;
  p.seed = seed;
  ExperimentConfig c;
  c.seed = seed;
  c.problem = p;
  c.problem["kind"] = "convection";
  c.train.epochs = kConvectionEpochs;
  c.train.stride = kConvectionStride;
  c.train.lr = 1e-3;
  c.train.seed = seed;
  c.visualizer = desk_visualizer(seed);
  return c;
}

ExperimentConfig eigen_experiment(bool physics_guided, std::uint64_t seed) {
  EigenConfig p;
  p.physics_guided = physics_guided;
  p.total_epochs = kEigenEpochs;
  p.seed = seed;
  ExperimentConfig c;
  c.seed = seed;
  c.problem = p;
  c.problem["kind"] = "eigen";
  c.train.epochs = kEigenEpochs;
  c.train.stride = kEigenStride;
  c.train.lr = 1e-3;
  c.train.seed = seed;
  c.visualizer = desk_visualizer(seed);
  return c;
}

std::map<std::string, Trajectory> balancing_runs(std::shared_ptr<const TargetProblem> problem, const FlatParams& init,
                                                 const TrainSettings& settings,
                                                 const std::map<std::string, double>& cw_weights) {
  std::map<std::string, Trajectory> out;
  for (SchemeKind k : all_schemes()) {
    BalancingScheme s;
    s.kind = k;
    if (k == SchemeKind::CW) s.cw_weights = cw_weights;
    out.emplace(to_string(k), run_training(problem, init, s, settings));
  }
  return out;
}

Json run_recipe(const std::string& name, const RecipeOptions& options) {
  if (options.out.empty()) throw UsageError("reproduce: an output directory is required");
  Json summary;
  if (name == "fig1") summary = fig1(options);
  else if (name == "fig4-beta-sweep") summary = fig4(options);
  else if (name == "fig5-lmax") summary = fig5(options);
  else if (name == "fig8-creg-sweep") summary = fig8(options);
  else if (name == "mtl-balancing") summary = mtl(options);
  else if (name == "cophy-vs-blackbox") summary = cophy(options);
  else throw UsageError("unknown experiment '" + name + "'");
  summary["recipe"] = name;
  summary["seed"] = options.seed;
  Workspace top(options.out);
  top.write("summary.json", summary.dump(2) + "\n");
  top.record_seeds(Json{{"global", options.seed}});
  return summary;
}

}  // namespace lmv
