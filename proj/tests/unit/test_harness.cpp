#include <cstring>
#include <cmath>
#include <filesystem>
#include <numeric>

#include "doctest.h"
#include "lmv/core/errors.hpp"
#include "lmv/harness/training.hpp"
#include "lmv/oracles/convection.hpp"
#include "lmv/oracles/toy_regression.hpp"

using namespace lmv;

namespace {

std::shared_ptr<const TargetProblem> toy() { return std::make_shared<ToyRegression>(ToyConfig{}); }

std::shared_ptr<const TargetProblem> small_convection() {
  ConvectionConfig c;
  c.n_interior = 50;
  c.n_initial = 20;
  c.n_boundary = 20;
  c.test_resolution = 8;
  c.hidden = {6};
  return std::make_shared<ConvectionProblem>(c);
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("lmv_harness_" + name)).string();
}

Trajectory toy_trajectory(std::size_t epochs, std::size_t stride) {
  auto p = toy();
  TrainSettings s;
  s.epochs = epochs;
  s.stride = stride;
  s.lr = 1e-2;
  return run_training(p, initial_network(*p, 1), BalancingScheme{}, s);
}

}  // namespace

TEST_CASE("checkpoint count is ceil(epochs / stride) + 1") {
  for (std::size_t stride : {1u, 7u, 10u, 200u}) {
    const Trajectory t = toy_trajectory(200, stride);
    CHECK(t.size() == (200 + stride - 1) / stride + 1);
    CHECK(t.epochs.back() == 200);
  }
}

TEST_CASE("recorded losses equal re-evaluated oracles") {
  auto p = toy();
  const OracleSet set = register_oracles(p);
  const Trajectory t = toy_trajectory(50, 10);
  for (std::size_t i = 0; i < t.size(); ++i)
    for (const auto& name : t.loss_names) CHECK(t.loss(name, i) == set.get(name).eval(t.checkpoint(i)));
  const auto mse = t.loss_column("MSE");
  CHECK(mse.back() < mse.front());
}

TEST_CASE("training is deterministic") {
  auto p = small_convection();
  TrainSettings s;
  s.epochs = 30;
  s.stride = 5;
  BalancingScheme rlw;
  rlw.kind = SchemeKind::RLW;
  const FlatParams init = initial_network(*p, 3);
  const Trajectory a = run_training(p, init, rlw, s);
  const Trajectory b = run_training(p, init, rlw, s);
  CHECK(a.checkpoints == b.checkpoints);
  CHECK(a.losses == b.losses);
}

TEST_CASE("all schemes coincide on a single-term problem") {
  auto p = toy();
  TrainSettings s;
  s.epochs = 40;
  s.stride = 4;
  const FlatParams init = initial_network(*p, 2);
  const Trajectory ref = run_training(p, init, BalancingScheme{}, s);
  for (SchemeKind k : all_schemes()) {
    BalancingScheme scheme;
    scheme.kind = k;
    scheme.cw_weights = {{"MSE", 3.0}};
    CHECK(run_training(p, init, scheme, s).checkpoints == ref.checkpoints);
  }
}

TEST_CASE("every scheme runs on the convection problem with valid weights") {
  auto p = small_convection();
  TrainSettings s;
  s.epochs = 20;
  s.stride = 5;
  const FlatParams init = initial_network(*p, 3);
  for (SchemeKind k : all_schemes()) {
    BalancingScheme scheme;
    scheme.kind = k;
    scheme.cw_weights = {{"L_r", 1.0}, {"L_ic", 100.0}, {"L_bc", 100.0}};
    const Trajectory t = run_training(p, init, scheme, s);
    CHECK(t.size() == 5);
    CHECK(t.losses.all_finite());
  }
}

TEST_CASE("CW weights come from the term names") {
  BalancingScheme s;
  s.kind = SchemeKind::CW;
  s.cw_weights = {{"L_ic", 100.0}, {"L_bc", 100.0}};
  Balancer b(s, {"L_r", "L_ic", "L_bc"}, 0);
  CHECK(b.weights(0, {{1, 1, 1}, {}}) == std::vector<double>{1.0, 100.0, 100.0});
}

TEST_CASE("DWA with equal loss ratios gives equal weights") {
  BalancingScheme s;
  s.kind = SchemeKind::DWA;
  Balancer b(s, {"a", "b", "c"}, 0);
  CHECK(b.weights(0, {{4, 2, 1}, {}}) == std::vector<double>{1, 1, 1});
  CHECK(b.weights(1, {{2, 1, 0.5}, {}}) == std::vector<double>{1, 1, 1});
  const auto w = b.weights(2, {{1, 3, 0.25}, {}});
  CHECK(w[0] == doctest::Approx(1.0));
  CHECK(w[1] == doctest::Approx(1.0));
  CHECK(w[2] == doctest::Approx(1.0));
  // ratios now (0.5, 3, 0.5): the slower term gets more weight
  const auto w2 = b.weights(3, {{1, 1, 1}, {}});
  CHECK(w2[1] > w2[0]);
  CHECK(w2[0] + w2[1] + w2[2] == doctest::Approx(3.0));
  const double e0 = std::exp(0.5 / 2.0);
  const double e1 = std::exp(3.0 / 2.0);
  CHECK(w2[1] == doctest::Approx(3.0 * e1 / (2 * e0 + e1)));
}

TEST_CASE("RLW weights are positive and sum to the term count") {
  BalancingScheme s;
  s.kind = SchemeKind::RLW;
  Balancer b(s, {"a", "b", "c", "d"}, 9);
  for (std::size_t e = 0; e < 50; ++e) {
    const auto w = b.weights(e, {{1, 1, 1, 1}, {}});
    CHECK(std::accumulate(w.begin(), w.end(), 0.0) == doctest::Approx(4.0).epsilon(1e-12));
    for (double x : w) CHECK(x > 0.0);
  }
}

TEST_CASE("LR-annealing follows the moving-average recursion") {
  BalancingScheme s;
  s.kind = SchemeKind::LR_annealing;
  s.lra_alpha = 0.9;
  Balancer b(s, {"r", "b"}, 0);
  TermStats t1{{1, 1}, {{3.0, -4.0}, {1.0, -1.0}}};
  // fresh = max|g_r| / mean|g_b| = 4 / 1
  auto w = b.weights(0, t1);
  CHECK(w[0] == 1.0);
  CHECK(w[1] == doctest::Approx(0.1 * 1.0 + 0.9 * 4.0));
  TermStats t2{{1, 1}, {{0.5, 1.0}, {2.0, 0.0}}};
  // fresh = 1 / 1
  w = b.weights(1, t2);
  CHECK(w[1] == doctest::Approx(0.1 * 3.7 + 0.9 * 1.0));
  TermStats t3{{1, 1}, {{0.5, 1.0}, {0.0, 0.0}}};
  w = b.weights(2, t3);
  CHECK(w[1] == doctest::Approx(0.1 * 1.27 + 0.9 * 1.0 / 1e-12));
}

TEST_CASE("GradNorm weights stay non-negative and sum to the term count") {
  BalancingScheme s;
  s.kind = SchemeKind::GradNorm;
  Balancer b(s, {"a", "b", "c"}, 0);
  CounterRng rng(5, 99);
  for (std::size_t e = 0; e < 40; ++e) {
    TermStats t;
    t.losses = {rng.uniform(0.1, 2), rng.uniform(0.1, 2), rng.uniform(0.1, 2)};
    t.grads.assign(3, std::vector<double>(4));
    for (auto& g : t.grads)
      for (double& x : g) x = rng.uniform(-30, 30);
    const auto w = b.weights(e, t);
    CHECK(std::accumulate(w.begin(), w.end(), 0.0) == doctest::Approx(3.0).epsilon(1e-12));
    for (double x : w) CHECK(x >= 0.0);
  }
}

TEST_CASE("normalize and denormalize") {
  Trajectory t;
  t.spec = MlpSpec{{1, 1}};
  t.checkpoints = {{1.0, 5.0}, {3.0, 5.0}};
  t.epochs = {0, 1};
  t.losses = DenseMatrix(2, 0);
  const NormalizedTrajectory n = normalize(t);
  // two points: mean 2, population std 1
  CHECK(n.points(0, 0) == -1.0);
  CHECK(n.points(1, 0) == 1.0);
  CHECK(n.points(0, 1) == 0.0);
  CHECK(n.points(1, 1) == 0.0);
  CHECK(n.stats.floored[1]);
  CHECK_FALSE(n.stats.floored[0]);
  CHECK(n.d_max == 2.0);

  const Trajectory tr = toy_trajectory(100, 5);
  const NormalizedTrajectory nz = normalize(tr);
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const FlatParams back = denormalize(nz.stats, tr.spec, nz.points.row(i));
    for (std::size_t j = 0; j < back.theta.size(); ++j) CHECK(std::abs(back.theta[j] - tr.checkpoints[i][j]) < 1e-12);
  }
  for (std::size_t j = 0; j < tr.dimension(); ++j) {
    if (nz.stats.floored[j]) continue;
    double m = 0.0;
    double v = 0.0;
    for (std::size_t i = 0; i < tr.size(); ++i) m += nz.points(i, j);
    m /= tr.size();
    for (std::size_t i = 0; i < tr.size(); ++i) v += (nz.points(i, j) - m) * (nz.points(i, j) - m);
    CHECK(std::abs(m) < 1e-10);
    CHECK(std::abs(v / tr.size() - 1.0) < 1e-10);
  }
}

TEST_CASE("identical endpoints are degenerate") {
  Trajectory t;
  t.spec = MlpSpec{{1, 1}};
  t.checkpoints = {{1.0, 2.0}, {3.0, 2.0}, {1.0, 2.0}};
  t.epochs = {0, 1, 2};
  t.losses = DenseMatrix(3, 0);
  CHECK_THROWS_AS(normalize(t), DegenerateError);
}

TEST_CASE("NVTJ round trip is bit exact") {
  Trajectory t = toy_trajectory(60, 7);
  t.checkpoints[1][0] = -0.0;
  t.checkpoints[2][1] = 5e-324;
  const std::string path = temp_path("roundtrip.nvtj");
  save_trajectory(path, t);
  const Trajectory u = load_trajectory(path);
  CHECK(u.spec == t.spec);
  CHECK(u.epochs == t.epochs);
  CHECK(u.loss_names == t.loss_names);
  CHECK(u.metadata == t.metadata);
  REQUIRE(u.size() == t.size());
  for (std::size_t i = 0; i < t.size(); ++i)
    CHECK(std::memcmp(u.checkpoints[i].data(), t.checkpoints[i].data(), t.dimension() * sizeof(double)) == 0);
  CHECK(std::signbit(u.checkpoints[1][0]));
  CHECK(std::memcmp(u.losses.data(), t.losses.data(), t.losses.size() * sizeof(double)) == 0);
  CHECK(trajectory_hash(u) == trajectory_hash(t));
  std::filesystem::remove(path);
}

TEST_CASE("NVTJ format errors") {
  const Trajectory t = toy_trajectory(20, 5);
  const std::string bytes = encode_nvtj(trajectory_to_nvtj(t));
  SUBCASE("truncation names expected and actual length") {
    const std::string cut = bytes.substr(0, bytes.size() - 3);
    try {
      decode_nvtj(cut);
      FAIL("expected a format error");
    } catch (const FormatError& e) {
      const std::string msg = e.what();
      CHECK(msg.find(std::to_string(bytes.size())) != std::string::npos);
      CHECK(msg.find(std::to_string(cut.size())) != std::string::npos);
    }
  }
  SUBCASE("bad magic") {
    std::string bad = bytes;
    bad[0] = 'X';
    try {
      decode_nvtj(bad);
      FAIL("expected a format error");
    } catch (const FormatError& e) {
      CHECK(e.offset() == 0);
    }
  }
  SUBCASE("bad version") {
    std::string bad = bytes;
    bad[4] = 2;
    try {
      decode_nvtj(bad);
      FAIL("expected a format error");
    } catch (const FormatError& e) {
      CHECK(e.offset() == 4);
    }
  }
  SUBCASE("short header") { CHECK_THROWS_AS(decode_nvtj(bytes.substr(0, 10)), FormatError); }
  SUBCASE("wrong payload kind") {
    NvtjFile f = decode_nvtj(bytes);
    f.header["kind"] = "pca";
    CHECK_THROWS_AS(trajectory_from_nvtj(f), FormatError);
  }
}

TEST_CASE("files carry their own layout") {
  Trajectory t;
  t.spec = MlpSpec{{3, 2, 1}};
  t.checkpoints = {std::vector<double>(t.spec.param_count(), 0.5), std::vector<double>(t.spec.param_count(), 1.5)};
  t.epochs = {0, 10};
  t.loss_names = {"x"};
  t.losses = DenseMatrix(2, 1, 0.25);
  const Trajectory u = trajectory_from_nvtj(decode_nvtj(encode_nvtj(trajectory_to_nvtj(t))));
  CHECK(u.spec == t.spec);
  CHECK(u.checkpoints == t.checkpoints);
}

TEST_CASE("concatenated runs keep segment starts") {
  const Trajectory a = toy_trajectory(20, 5);
  const Trajectory c = concatenate({a, a});
  CHECK(c.size() == 2 * a.size());
  CHECK(c.segment_starts == std::vector<std::size_t>{0, a.size()});
}

TEST_CASE("invalid settings are rejected") {
  auto p = toy();
  TrainSettings s;
  s.stride = 0;
  CHECK_THROWS_AS(run_training(p, initial_network(*p, 0), BalancingScheme{}, s), ConfigError);
  CHECK_THROWS_AS(scheme_from_string("Uncertainty"), ConfigError);
}
