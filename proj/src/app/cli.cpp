#include "lmv/app/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <optional>
#include <sstream>

#include "lmv/app/experiment.hpp"
#include "lmv/app/pipeline.hpp"
#include "lmv/app/recipes.hpp"
#include "lmv/app/workspace.hpp"
#include "lmv/core/errors.hpp"
#include "lmv/core/hash.hpp"
#include "lmv/core/nvtj.hpp"

namespace lmv {

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<std::string> oracles;
  std::vector<std::string> methods;
  std::optional<std::size_t> resolution;
  std::vector<double> window;
  std::vector<std::string> formats;
  std::vector<std::string> files;  // render inputs
  std::string recipe;
};

class StageFailure : public Error {
 public:
  StageFailure(std::string stage, const std::exception& cause)
      : Error("stage '" + stage + "': " + cause.what()), usage(dynamic_cast<const UsageError*>(&cause) != nullptr) {}
  bool usage;
};

template <typename F>
auto in_stage(const std::string& stage, F&& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    throw StageFailure(stage, e);
  }
}

ExperimentConfig resolve_config(const Flags& f) {
  ExperimentConfig cfg;
  if (f.config.empty()) {
    cfg = convection_experiment(10.0, 1.0, f.seed.value_or(0));
  } else {
    cfg = load_experiment(f.config);
  }
  if (f.seed) cfg.set_seed(*f.seed);
  if (!f.out.empty()) cfg.out = f.out;
  if (!f.formats.empty()) cfg.formats = f.formats;
  cfg.validate();
  return cfg;
}

Workspace open_workspace(const Flags& f, const ExperimentConfig& cfg) {
  Workspace ws(cfg.out);
  if (!f.config.empty()) ws.record_input("config", sha256_hex(read_bytes(f.config)));
  ws.record_seeds(cfg.seeds());
  return ws;
}

std::vector<GridSpec> requested_grids(const Flags& f, const std::vector<GridSpec>& base) {
  if (!f.resolution && f.window.empty()) return {};
  std::vector<GridSpec> grids = base;
  for (auto& g : grids) {
    if (f.resolution) g.resolution = *f.resolution;
    if (!f.window.empty()) std::copy(f.window.begin(), f.window.end(), g.window.begin());
    g.validate();
  }
  return grids;
}

GridRequest request(const Flags& f, const std::vector<GridSpec>& base) {
  GridRequest r;
  r.methods = f.methods;
  r.oracles = f.oracles;
  r.grids = requested_grids(f, base);
  r.formats = f.formats;
  return r;
}

void list(std::ostream& out, const std::vector<std::string>& stems) {
  for (const auto& s : stems) out << s << "\n";
}

std::vector<std::string> workspace_grids(const Workspace& ws) {
  std::vector<std::string> rels;
  const auto dir = ws.path("landscapes");
  if (!std::filesystem::exists(dir)) return rels;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".json")
      rels.push_back(std::filesystem::relative(e.path(), ws.root()).generic_string());
  std::sort(rels.begin(), rels.end());
  return rels;
}

void render_command(const Flags& f, std::ostream& out) {
  const ExperimentConfig cfg = in_stage("config", [&] { return resolve_config(f); });
  Workspace ws = in_stage("render", [&] { return open_workspace(f, cfg); });
  in_stage("render", [&] {
    auto style_for = [&](const LandscapeGrid& g) { return cfg.render ? *cfg.render : default_style(g.field_name); };
    if (f.files.empty()) {
      const auto rels = workspace_grids(ws);
      if (rels.empty()) throw NotFoundError("no exported grids under " + ws.path("landscapes").string() + "; run 'landscape' first");
      for (const auto& rel : rels) {
        const LandscapeGrid g = grid_from_json(Json::parse(ws.read(rel)));
        const std::string svg = rel.substr(0, rel.size() - 5) + ".svg";
        ws.write(svg, render_svg(g, style_for(g)));
        out << svg << "\n";
      }
      return 0;
    }
    for (const auto& file : f.files) {
      const std::string bytes = read_bytes(file);
      ws.record_input(file, sha256_hex(bytes));
      const LandscapeGrid g = grid_from_json(Json::parse(bytes));
      const std::string svg = "rendered/" + std::filesystem::path(file).stem().string() + ".svg";
      ws.write(svg, render_svg(g, style_for(g)));
      out << svg << "\n";
    }
    return 0;
  });
}

void reproduce_command(const Flags& f, std::ostream& out) {
  RecipeOptions o;
  o.seed = f.seed.value_or(0);
  o.out = f.out.empty() ? std::filesystem::path("lmviz_out") / f.recipe : std::filesystem::path(f.out);
  if (!f.formats.empty()) o.formats = f.formats;
  o.log = &out;
  const Json summary = in_stage("reproduce " + f.recipe, [&] { return run_recipe(f.recipe, o); });
  out << summary.dump(2) << "\n";
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Latent-manifold loss landscape visualization", "lmviz"};
  app.require_subcommand(1);
  Flags f;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", f.config, "experiment config (JSON)")->check(CLI::ExistingFile);
    sub->add_option("--seed", f.seed, "global seed; overrides every seed in the config");
    sub->add_option("--out", f.out, "output directory");
  };
  auto add_grid = [&](CLI::App* sub) {
    sub->add_option("--method", f.methods, "projector: visualizer, pca or kpca (repeatable)")
        ->check(CLI::IsMember(projector_methods()));
    sub->add_option("--resolution", f.resolution, "mesh points per side")->check(CLI::Range(2, 4096));
    sub->add_option("--window", f.window, "latent window x1,x2,y1,y2")->delimiter(',')->expected(4);
    sub->add_option("--format", f.formats, "svg, json or csv (repeatable)")
        ->delimiter(',')
        ->check(CLI::IsMember({"svg", "json", "csv"}));
  };

  auto* generate = app.add_subcommand("generate", "train the target network and record its trajectory");
  add_common(generate);
  auto* fit = app.add_subcommand("fit", "fit the visualizer and/or baselines to the trajectory");
  add_common(fit);
  fit->add_option("--method", f.methods, "projector: visualizer, pca or kpca (repeatable)")
      ->check(CLI::IsMember(projector_methods()));
  auto* landscape = app.add_subcommand("landscape", "evaluate loss landscapes over the latent mesh");
  add_common(landscape);
  add_grid(landscape);
  landscape->add_option("--oracle", f.oracles, "loss oracle (repeatable)");
  auto* density = app.add_subcommand("density", "representation-similarity density over the latent mesh");
  add_common(density);
  add_grid(density);
  auto* fidelity = app.add_subcommand("fidelity", "fidelity report for every fitted method");
  add_common(fidelity);
  fidelity->add_option("--oracle", f.oracles, "loss oracle (repeatable)");
  auto* render = app.add_subcommand("render", "render exported grid JSON files as SVG");
  add_common(render);
  render->add_option("files", f.files, "grid JSON files; default: every landscape in the output directory")
      ->check(CLI::ExistingFile);
  auto* reproduce = app.add_subcommand("reproduce", "run a canned experiment");
  reproduce->add_option("experiment", f.recipe, "recipe name")->required()->check(CLI::IsMember(recipe_names()));
  reproduce->add_option("--seed", f.seed, "global seed");
  reproduce->add_option("--out", f.out, "output directory");
  reproduce->add_option("--format", f.formats, "svg, json or csv (repeatable)")
      ->delimiter(',')
      ->check(CLI::IsMember({"svg", "json", "csv"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (reproduce->parsed()) {
      reproduce_command(f, out);
      return kExitOk;
    }
    if (render->parsed()) {
      render_command(f, out);
      return kExitOk;
    }
    const ExperimentConfig cfg = in_stage("config", [&] { return resolve_config(f); });
    Workspace ws = in_stage("config", [&] { return open_workspace(f, cfg); });
    if (generate->parsed()) {
      const Trajectory t = in_stage("generate", [&] { return generate_stage(cfg, ws); });
      out << "wrote " << ws.path(kTrajectoryFile).string() << " (" << t.size() << " checkpoints)\n";
    } else if (fit->parsed()) {
      in_stage("fit", [&] {
        fit_stage(cfg, ws, f.methods);
        return 0;
      });
      list(out, in_stage("fit", [&] { return fitted_methods(ws); }));
    } else if (landscape->parsed()) {
      list(out, in_stage("landscape", [&] { return landscape_stage(cfg, ws, request(f, cfg.grids)); }));
    } else if (density->parsed()) {
      GridSpec d;
      d.resolution = cfg.density.resolution;
      list(out, in_stage("density", [&] { return density_stage(cfg, ws, request(f, {d})); }));
    } else if (fidelity->parsed()) {
      GridRequest r;
      r.oracles = f.oracles;
      out << fidelity_table(in_stage("fidelity", [&] { return fidelity_stage(cfg, ws, r); }));
    }
    return kExitOk;
  } catch (const StageFailure& e) {
    err << "error: " << e.what() << "\n";
    return e.usage ? kExitUsage : kExitFailure;
  }
}

}  // namespace lmv
