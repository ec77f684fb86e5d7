#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "lmv/app/cli.hpp"
#include "lmv/app/experiment.hpp"
#include "lmv/app/recipes.hpp"
#include "lmv/app/workspace.hpp"
#include "lmv/core/errors.hpp"
#include "lmv/core/nvtj.hpp"

using namespace lmv;
namespace fs = std::filesystem;

namespace {

const fs::path kToyConfig = fs::path(LMV_SOURCE_DIR) / "configs" / "toy_quick.json";

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("lmv_test_app_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "lmviz");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

Json toy_json() { return Json::parse(read_bytes(kToyConfig.string())); }

std::map<std::string, std::string> tree_bytes(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) files[fs::relative(e.path(), root).generic_string()] = read_bytes(e.path().string());
  return files;
}

void full_pipeline(const fs::path& out) {
  const std::string c = kToyConfig.string(), o = out.string();
  for (const char* stage : {"generate", "fit", "landscape", "density", "fidelity"})
    REQUIRE(cli({stage, "--config", c, "--out", o}).code == 0);
}

}  // namespace

TEST_CASE("config: defaults, seed inheritance and round trip") {
  const ExperimentConfig cfg = experiment_from_json(toy_json());
  CHECK(cfg.seed == 3);
  CHECK(cfg.train.seed == 3);
  CHECK(cfg.visualizer.seed == 3);
  CHECK(cfg.problem["seed"] == 3);
  CHECK(cfg.train.epochs == 300);
  CHECK(cfg.baselines == std::vector<std::string>{"pca", "kpca"});
  const ExperimentConfig again = experiment_from_json(Json(cfg));
  CHECK(Json(again) == Json(cfg));
}

TEST_CASE("config: explicit section seeds and set_seed") {
  Json j = toy_json();
  j["train"]["seed"] = 11;
  ExperimentConfig cfg = experiment_from_json(j);
  CHECK(cfg.train.seed == 11);
  CHECK(cfg.visualizer.seed == 3);
  cfg.set_seed(5);
  CHECK(cfg.train.seed == 5);
  CHECK(cfg.visualizer.seed == 5);
  CHECK(cfg.seeds()["global"] == 5);
}

TEST_CASE("config: rejects unknown keys, bad versions and unknown names") {
  Json j = toy_json();
  j["colour"] = "blue";
  CHECK_THROWS_AS(experiment_from_json(j), ConfigError);
  j = toy_json();
  j["version"] = 2;
  CHECK_THROWS_AS(experiment_from_json(j), ConfigError);
  j = toy_json();
  j["oracles"] = {"L_total"};
  CHECK_THROWS_AS(experiment_from_json(j).validate(), ConfigError);
  j = toy_json();
  j["baselines"] = {"tsne"};
  CHECK_THROWS_AS(experiment_from_json(j).validate(), ConfigError);
}

TEST_CASE("config: relative output resolves against the config directory") {
  const ExperimentConfig cfg = load_experiment(kToyConfig);
  CHECK(cfg.out.lexically_normal() == (kToyConfig.parent_path() / "../lmviz_out/toy_quick").lexically_normal());
  CHECK_THROWS_AS(load_experiment(kToyConfig.parent_path() / "missing.json"), NotFoundError);
}

TEST_CASE("recipe configs validate") {
  CHECK_NOTHROW(convection_experiment(10.0, 1.0, 0).validate());
  CHECK_NOTHROW(eigen_experiment(true, 0).validate());
  CHECK_NOTHROW(load_experiment(fs::path(LMV_SOURCE_DIR) / "configs" / "convection_beta10.json").validate());
  CHECK(recipe_names().size() == 6);
}

TEST_CASE("cli: usage errors exit 2, help exits 0") {
  CHECK(cli({}).code == kExitUsage);
  CHECK(cli({"bogus"}).code == kExitUsage);
  CHECK(cli({"generate", "--no-such-flag"}).code == kExitUsage);
  CHECK(cli({"landscape", "--method", "umap"}).code == kExitUsage);
  CHECK(cli({"landscape", "--window", "0,1"}).code == kExitUsage);
  CHECK(cli({"reproduce", "fig99"}).code == kExitUsage);
  CHECK(cli({"--help"}).code == kExitOk);
}

TEST_CASE("cli: fidelity without fitted models exits 1 naming the stage") {
  const fs::path out = scratch("nofit");
  const std::string c = kToyConfig.string(), o = out.string();
  Run r = cli({"fidelity", "--config", c, "--out", o});
  CHECK(r.code == kExitFailure);
  CHECK(r.err.find("stage 'fidelity'") != std::string::npos);
  CHECK(r.err.find("generate") != std::string::npos);
  REQUIRE(cli({"generate", "--config", c, "--out", o}).code == 0);
  r = cli({"fidelity", "--config", c, "--out", o});
  CHECK(r.code == kExitFailure);
  CHECK(r.err.find("'fit'") != std::string::npos);
}

TEST_CASE("cli: full pipeline writes every artifact under the output directory") {
  const fs::path out = scratch("pipeline");
  full_pipeline(out);
  for (const char* rel : {"trajectory.nvtj", "models/visualizer.nvtj", "models/pca.nvtj", "models/kpca.nvtj",
                          "landscapes/visualizer/MSE.svg", "landscapes/pca/Test-MSE.csv",
                          "landscapes/kpca/density.json", "fidelity.json", "manifest.json"})
    CHECK_MESSAGE(fs::exists(out / rel), rel);
  const Json manifest = Json::parse(read_bytes((out / "manifest.json").string()));
  CHECK(manifest["inputs"].contains("config"));
  CHECK(manifest["seeds"]["global"] == 3);
  CHECK(verify_manifest(out).empty());

  const std::string o = out.string(), c = kToyConfig.string();
  Run r = cli({"landscape", "--config", c, "--out", o, "--method", "pca", "--oracle", "MSE", "--resolution", "5",
               "--window", "-0.5,0.5,-0.5,0.5", "--format", "json"});
  REQUIRE(r.code == 0);
  const Json grid = Json::parse(read_bytes((out / "landscapes/pca/MSE.json").string()));
  CHECK(grid["spec"]["resolution"] == 5);

  fs::remove(out / "landscapes/pca/MSE.svg");
  r = cli({"render", "--config", c, "--out", o});
  CHECK(r.code == 0);
  CHECK(fs::exists(out / "landscapes/pca/MSE.svg"));
  r = cli({"render", "--out", (out / "extra").string(), (out / "landscapes/pca/MSE.json").string()});
  CHECK(r.code == 0);
  CHECK(fs::exists(out / "extra/rendered/MSE.svg"));
}

TEST_CASE("cli: same config and seed give byte-identical artifacts") {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  full_pipeline(a);
  full_pipeline(b);
  const auto fa = tree_bytes(a), fb = tree_bytes(b);
  REQUIRE(fa.size() == fb.size());
  for (const auto& [rel, bytes] : fa) {
    REQUIRE_MESSAGE(fb.count(rel), rel);
    CHECK_MESSAGE(fb.at(rel) == bytes, rel);
  }
}

TEST_CASE("cli: a different seed changes the trajectory") {
  const fs::path a = scratch("seed_a"), b = scratch("seed_b");
  const std::string c = kToyConfig.string();
  REQUIRE(cli({"generate", "--config", c, "--out", a.string()}).code == 0);
  REQUIRE(cli({"generate", "--config", c, "--out", b.string(), "--seed", "4"}).code == 0);
  CHECK(read_bytes((a / "trajectory.nvtj").string()) != read_bytes((b / "trajectory.nvtj").string()));
}

TEST_CASE("manifest verification reports tampered and missing files") {
  const fs::path root = scratch("manifest");
  Workspace ws(root);
  ws.write("a.txt", "alpha");
  ws.write("sub/b.txt", "beta");
  CHECK(verify_manifest(root).empty());
  write_bytes((root / "a.txt").string(), "alpha!");
  fs::remove(root / "sub/b.txt");
  CHECK(verify_manifest(root) == std::vector<std::string>{"a.txt", "sub/b.txt"});
  Workspace reopened(root);
  CHECK(reopened.manifest()["artifacts"].size() == 2);
  CHECK_THROWS_AS(reopened.read("nope"), NotFoundError);
}
