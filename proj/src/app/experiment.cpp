#include "lmv/app/experiment.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "lmv/core/errors.hpp"
#include "lmv/oracles/problem.hpp"

namespace lmv {

namespace {

const std::set<std::string> kKeys{"version", "seed",  "problem", "scheme", "train",  "visualizer", "baselines",
                                  "kpca",    "oracles", "grids", "density", "render", "formats",    "out"};

Json with_seed(Json section, std::uint64_t seed) {
  if (section.is_null()) section = Json::object();
  if (!section.contains("seed")) section["seed"] = seed;
  return section;
}

}  // namespace

const std::vector<std::string>& projector_methods() {
  static const std::vector<std::string> m{"visualizer", "pca", "kpca"};
  return m;
}

void ExperimentConfig::validate() const {
  if (!problem.is_object() || !problem.contains("kind")) throw ConfigError("experiment: 'problem' needs a 'kind'");
  const auto p = make_problem(problem);
  train.validate();
  scheme.validate();
  visualizer.validate();
  const auto names = p->oracle_names();
  for (const auto& o : oracles)
    if (std::find(names.begin(), names.end(), o) == names.end())
      throw ConfigError("experiment: oracle '" + o + "' is not defined for problem '" + p->kind() + "'");
  for (const auto& b : baselines)
    if (b != "pca" && b != "kpca") throw ConfigError("experiment: unknown baseline '" + b + "'");
  for (const auto& g : grids) g.validate();
  for (const auto& f : formats)
    if (f != "json" && f != "csv" && f != "svg") throw ConfigError("experiment: unknown format '" + f + "'");
  if (density.probes < 2) throw ConfigError("experiment: density needs at least 2 probes");
  if (render) render->validate();
}

void ExperimentConfig::set_seed(std::uint64_t s) {
  seed = s;
  problem["seed"] = s;
  train.seed = s;
  visualizer.seed = s;
}

Json ExperimentConfig::seeds() const {
  return Json{{"global", seed},
              {"problem", problem.value("seed", seed)},
              {"train", train.seed},
              {"visualizer", visualizer.seed}};
}

void to_json(Json& j, const ExperimentConfig& c) {
  j = Json{{"version", kExperimentVersion},
           {"seed", c.seed},
           {"problem", c.problem},
           {"scheme", c.scheme},
           {"train", c.train},
           {"visualizer", c.visualizer},
           {"baselines", c.baselines},
           {"kpca", c.kpca},
           {"oracles", c.oracles},
           {"grids", c.grids},
           {"density", Json{{"resolution", c.density.resolution}, {"probes", c.density.probes}}},
           {"formats", c.formats},
           {"out", c.out.generic_string()}};
  if (c.render) j["render"] = *c.render;
}

ExperimentConfig experiment_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("experiment: config must be a JSON object");
  for (const auto& [k, v] : j.items())
    if (!kKeys.count(k)) throw ConfigError("experiment: unknown key '" + k + "'");
  const int version = j.value("version", kExperimentVersion);
  if (version != kExperimentVersion)
    throw ConfigError("experiment: unsupported config version " + std::to_string(version));
  ExperimentConfig c;
  try {
    c.seed = j.value("seed", std::uint64_t{0});
    if (!j.contains("problem")) throw ConfigError("experiment: missing 'problem'");
    c.problem = with_seed(j.at("problem"), c.seed);
    if (j.contains("scheme")) c.scheme = j.at("scheme").get<BalancingScheme>();
    c.train = with_seed(j.value("train", Json::object()), c.seed).get<TrainSettings>();
    c.visualizer = with_seed(j.value("visualizer", Json::object()), c.seed).get<VisualizerConfig>();
    read_optional(j, "baselines", c.baselines);
    if (j.contains("kpca")) c.kpca = j.at("kpca").get<KpcaOptions>();
    read_optional(j, "oracles", c.oracles);
    if (j.contains("grids")) c.grids = j.at("grids").get<std::vector<GridSpec>>();
    if (j.contains("density")) {
      c.density.resolution = j.at("density").value("resolution", c.density.resolution);
      c.density.probes = j.at("density").value("probes", c.density.probes);
    }
    if (j.contains("render")) c.render = j.at("render").get<RenderStyle>();
    read_optional(j, "formats", c.formats);
    if (j.contains("out")) c.out = j.at("out").get<std::string>();
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("experiment: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig load_experiment(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot open config '" + path.string() + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("config '" + path.string() + "': " + e.what());
  }
  ExperimentConfig c = experiment_from_json(j);
  if (c.out.is_relative()) c.out = path.parent_path() / c.out;
  return c;
}

}  // namespace lmv
