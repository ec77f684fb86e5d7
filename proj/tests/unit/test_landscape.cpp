#include <cmath>

#include "doctest.h"
#include "lmv/baselines/pca.hpp"
#include "lmv/core/errors.hpp"
#include "lmv/core/rng.hpp"
#include "lmv/landscape/cka.hpp"
#include "lmv/landscape/fidelity.hpp"
#include "lmv/landscape/grid.hpp"

using namespace lmv;

namespace {

NormStats identity_stats(std::size_t n) { return NormStats{std::vector<double>(n, 0.0), std::vector<double>(n, 1.0), std::vector<bool>(n, false)}; }

// Keeps the first two coordinates; the rest decode to `fill`.
class SliceProjector final : public Projector {
 public:
  explicit SliceProjector(MlpSpec spec, double fill = 0.0)
      : spec_(std::move(spec)), stats_(identity_stats(spec_.param_count())), fill_(fill) {}
  std::string name() const override { return "slice"; }
  Latent encode(std::span<const double> x) const override { return {x[0], x[1]}; }
  std::vector<double> decode(const Latent& z) const override {
    std::vector<double> v(spec_.param_count(), fill_);
    v[0] = z[0];
    v[1] = z[1];
    return v;
  }
  const MlpSpec& target_spec() const override { return spec_; }
  const NormStats& norm_stats() const override { return stats_; }

 private:
  MlpSpec spec_;
  NormStats stats_;
  double fill_;
};

// Decodes every latent to one fixed network.
class ConstantProjector final : public Projector {
 public:
  explicit ConstantProjector(FlatParams net) : net_(std::move(net)), stats_(identity_stats(net_.theta.size())) {}
  std::string name() const override { return "constant"; }
  Latent encode(std::span<const double>) const override { return {0.0, 0.0}; }
  std::vector<double> decode(const Latent&) const override { return net_.theta; }
  const MlpSpec& target_spec() const override { return net_.spec; }
  const NormStats& norm_stats() const override { return stats_; }

 private:
  FlatParams net_;
  NormStats stats_;
};

LossOracle sum_squares() {
  return {"L", [](const FlatParams& p) {
            double s = 0.0;
            for (double v : p.theta) s += v * v;
            return s;
          }};
}

Trajectory small_traj(const MlpSpec& spec, const std::vector<std::vector<double>>& rows) {
  Trajectory t;
  t.spec = spec;
  t.checkpoints = rows;
  t.loss_names = {"L"};
  t.losses = DenseMatrix(rows.size(), 1);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    t.epochs.push_back(i);
    t.losses(i, 0) = sum_squares().eval(FlatParams{spec, rows[i]});
  }
  return t;
}

DenseMatrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed) {
  CounterRng rng(seed, 3);
  DenseMatrix m(r, c);
  for (double& v : m.values()) v = rng.normal();
  return m;
}

const MlpSpec kLinear{{2, 1}};  // 3 parameters

}  // namespace

TEST_CASE("grid geometry") {
  GridSpec g;
  g.resolution = 3;
  CHECK(g.x(0) == -1.0);
  CHECK(g.x(1) == 0.0);
  CHECK(g.x(2) == 1.0);
  const DenseMatrix mesh = g.mesh();
  CHECK(mesh(5, 0) == 1.0);  // iy = 1, ix = 2
  CHECK(mesh(5, 1) == 0.0);
  g.window = {-0.5, 0.5, 0.0, 2.0};
  CHECK_THROWS_AS(g.validate(), ConfigError);
  g.window = {0.5, -0.5, 0.0, 1.0};
  CHECK_THROWS_AS(g.validate(), ConfigError);
}

TEST_CASE("resolution-3 landscape of a frozen toy projector") {
  const SliceProjector proj(kLinear, 0.5);
  const Trajectory t = small_traj(kLinear, {{0.2, 0.4, 0.5}, {-0.6, 0.1, 0.5}, {0.0, 0.0, 0.5}});
  GridSpec g;
  g.resolution = 3;
  const LandscapeGrid grid = evaluate_grid(proj, g, sum_squares(), t);
  REQUIRE(grid.field.rows() == 3);
  for (std::size_t iy = 0; iy < 3; ++iy)
    for (std::size_t ix = 0; ix < 3; ++ix) {
      const double x = g.x(ix), y = g.y(iy);
      CHECK(grid.field(iy, ix) == doctest::Approx(x * x + y * y + 0.25));
    }
  REQUIRE(grid.overlay.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(grid.overlay[i].z[0] == t.checkpoints[i][0]);
    CHECK(grid.overlay[i].z[1] == t.checkpoints[i][1]);
    CHECK(grid.overlay[i].value == t.losses(i, 0));
  }
  CHECK(grid.failed_points == 0);
}

TEST_CASE("constant oracle gives a constant field; failures leave NaN") {
  const SliceProjector proj(kLinear);
  const Trajectory t = small_traj(kLinear, {{0.2, 0.4, 0.0}, {-0.6, 0.1, 0.0}});
  GridSpec g;
  g.resolution = 4;
  const LandscapeGrid c = evaluate_grid(proj, g, LossOracle{"L", [](const FlatParams&) { return 7.0; }}, t);
  for (double v : c.field.values()) CHECK(v == 7.0);
  const LossOracle flaky{"L", [](const FlatParams& p) {
                           if (p.theta[0] > 0.5) throw NumericalError("boom");
                           return 1.0;
                         }};
  const LandscapeGrid f = evaluate_grid(proj, g, flaky, t);
  CHECK(f.failed_points == 4);
  CHECK(std::isnan(f.field(0, 3)));
  const Json j = grid_to_json(f);
  const LandscapeGrid back = grid_from_json(j);
  CHECK(std::isnan(back.field(0, 3)));
  CHECK(back.field(0, 0) == 1.0);
  CHECK(back.failed_points == 4);
}

TEST_CASE("grid csv export") {
  const SliceProjector proj(kLinear);
  const Trajectory t = small_traj(kLinear, {{0.2, 0.4, 0.0}, {-0.6, 0.1, 0.0}});
  GridSpec g;
  g.resolution = 2;
  const std::string csv = grid_to_csv(evaluate_grid(proj, g, sum_squares(), t));
  CHECK(csv == "x,y,value\n-1,-1,2\n1,-1,2\n-1,1,2\n1,1,2\n");
  CHECK(format_double(0.1) == "0.1");
}

TEST_CASE("cka properties") {
  const DenseMatrix a = random_matrix(30, 6, 1);
  CHECK(cka(a, a).value == doctest::Approx(1.0));
  const DenseMatrix b = random_matrix(30, 4, 2);
  CHECK(cka(a, b).value == doctest::Approx(cka(b, a).value).epsilon(1e-14));

  // invariance to orthogonal transforms and isotropic scaling
  const double c = std::cos(0.7), s = std::sin(0.7);
  DenseMatrix rot = a;
  for (std::size_t r = 0; r < a.rows(); ++r) {
    rot(r, 0) = 3.0 * (c * a(r, 0) - s * a(r, 1));
    rot(r, 1) = 3.0 * (s * a(r, 0) + c * a(r, 1));
    for (std::size_t k = 2; k < a.cols(); ++k) rot(r, k) = 3.0 * a(r, k);
  }
  CHECK(cka(rot, b).value == doctest::Approx(cka(a, b).value).epsilon(1e-10));
  CHECK(cka(rot, a).value == doctest::Approx(1.0));

  double mean = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const double v = cka(random_matrix(200, 5, 100 + seed), random_matrix(200, 5, 500 + seed)).value;
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    mean += v / 20.0;
  }
  CHECK(mean < 0.2);

  const CkaResult d = cka(DenseMatrix(10, 3, 1.0), a.rows() == 10 ? a : random_matrix(10, 3, 4));
  CHECK(d.degenerate);
  CHECK(d.value == 0.0);
}

TEST_CASE("packed gram reproduces the Frobenius inner product") {
  const DenseMatrix a = random_matrix(7, 3, 5), b = random_matrix(7, 2, 6);
  auto centered_gram = [](const DenseMatrix& x) {
    DenseMatrix g = matmul_nt(x.view(), x.view());
    const std::size_t n = g.rows();
    std::vector<double> rm(n, 0.0);
    double tot = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        rm[i] += g(i, j) / n;
        tot += g(i, j) / (n * n);
      }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) g(i, j) = g(i, j) - rm[i] - rm[j] + tot;
    return g;
  };
  const DenseMatrix ga = centered_gram(a), gb = centered_gram(b);
  double frob = 0.0;
  for (std::size_t i = 0; i < ga.size(); ++i) frob += ga.values()[i] * gb.values()[i];
  CHECK(dot(packed_centered_gram(a), packed_centered_gram(b)) == doctest::Approx(frob).epsilon(1e-12));
}

TEST_CASE("density equals a brute-force sum of pairwise similarities") {
  const MlpSpec spec{{1, 3, 1}};  // 10 parameters
  CounterRng rng(4, 1);
  std::vector<double> base(spec.param_count());
  for (double& v : base) v = rng.normal();
  // SliceProjector with a non-trivial fill so hidden features vary with z.
  class Offset final : public Projector {
   public:
    Offset(MlpSpec s, std::vector<double> b) : s_(std::move(s)), b_(std::move(b)), st_(identity_stats(b_.size())) {}
    std::string name() const override { return "offset"; }
    Latent encode(std::span<const double> x) const override { return {x[0] - b_[0], x[1] - b_[1]}; }
    std::vector<double> decode(const Latent& z) const override {
      std::vector<double> v = b_;
      v[0] += 2.0 * z[0];
      v[1] += 2.0 * z[1];
      return v;
    }
    const MlpSpec& target_spec() const override { return s_; }
    const NormStats& norm_stats() const override { return st_; }

   private:
    MlpSpec s_;
    std::vector<double> b_;
    NormStats st_;
  } proj(spec, base);
  const DenseMatrix probes = random_matrix(16, 1, 9);

  for (std::size_t res : {2u, 5u}) {
    GridSpec g;
    g.resolution = res;
    const LandscapeGrid d = density_grid(proj, g, probes);
    const DenseMatrix mesh = g.mesh();
    const auto feats = decoded_features(proj, mesh, probes);
    for (std::size_t i = 0; i < mesh.rows(); ++i) {
      double rho = 0.0;
      for (std::size_t j = 0; j < mesh.rows(); ++j)
        if (j != i) rho += cka(feats[i], feats[j]).value;
      CHECK(d.field.values()[i] == doctest::Approx(rho).epsilon(1e-10));
    }
  }
  GridSpec big;
  big.resolution = 42;
  CHECK_THROWS_AS(density_grid(proj, big, probes), ConfigError);
}

TEST_CASE("density of identical networks is the pair count") {
  const MlpSpec spec{{1, 3, 1}};
  CounterRng rng(5, 1);
  FlatParams net = FlatParams::zeros(spec);
  for (double& v : net.theta) v = rng.normal();
  const ConstantProjector proj(net);
  GridSpec g;
  g.resolution = 3;
  const LandscapeGrid d = density_grid(proj, g, random_matrix(12, 1, 3));
  for (double v : d.field.values()) CHECK(v == doctest::Approx(8.0));
}

TEST_CASE("fidelity hand toy") {
  const SliceProjector proj(kLinear);
  // third coordinate is dropped by the projector
  const Trajectory t = small_traj(kLinear, {{0.0, 0.0, 0.3}, {1.0, 0.0, 0.0}, {0.0, 1.0, 0.4}});
  const FidelityReport r = fidelity(proj, t, sum_squares());
  CHECK(r.d_max == doctest::Approx(std::sqrt(1.0 + 0.01)));
  CHECK(r.loss_true[0] == doctest::Approx(0.09));
  CHECK(r.loss_true[1] == 1.0);
  CHECK(r.loss_true[2] == doctest::Approx(1.16));
  CHECK(r.loss_projected[0] == 0.0);
  CHECK(r.loss_projected[2] == doctest::Approx(1.0));
  const double rel = (0.09 / (0.09 + kRelativeEps) + 0.0 + 0.16 / 1.16) / 3.0;
  CHECK(r.e_relative == doctest::Approx(rel));
  CHECK(r.e_proj == doctest::Approx((0.3 + 0.0 + 0.4) / 3.0 / r.d_max));

  GridSpec g;
  g.resolution = 3;
  const LandscapeGrid e = error_grid(proj, t, sum_squares(), ErrorKind::loss_error, g);
  for (std::size_t i = 0; i < 3; ++i) CHECK(e.overlay[i].value == r.loss_error[i]);
  const LandscapeGrid p = error_grid(proj, t, sum_squares(), ErrorKind::param_distance, g);
  for (std::size_t i = 0; i < 3; ++i) CHECK(p.overlay[i].value == r.distance[i]);
  CHECK(fidelity_to_json(r)["e_relative"] == r.e_relative);
}

TEST_CASE("pca fidelity on a planar trajectory is exact") {
  const MlpSpec spec{{3, 1}};  // 4 parameters
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 8; ++i) {
    const double a = 0.1 * i, b = std::sin(0.4 * i);
    rows.push_back({a, b, 1.0 + a - b, 2.0 * b});
  }
  const Trajectory t = small_traj(spec, rows);
  const FidelityReport r = fidelity(fit_pca(t), t, sum_squares());
  CHECK(r.e_relative < 1e-9);
  CHECK(r.e_proj < 1e-9);
}

TEST_CASE("mean field near the encoded trajectory") {
  LandscapeGrid g;
  g.spec.resolution = 3;
  g.field = DenseMatrix(3, 3, std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8, 9});
  const DenseMatrix codes(1, 2, std::vector<double>{0.0, 0.0});
  CHECK(mean_field_near(g, codes, 0.2) == 5.0);
  CHECK(mean_field_near(g, codes, 1.0) == doctest::Approx((2 + 4 + 5 + 6 + 8) / 5.0));
  const DenseMatrix corner(1, 2, std::vector<double>{0.9, 0.9});
  CHECK(mean_field_near(g, corner, 0.2) == 9.0);
  g.field(2, 2) = std::nan("");
  CHECK_THROWS_AS(mean_field_near(g, corner, 0.2), ValidationError);
}
