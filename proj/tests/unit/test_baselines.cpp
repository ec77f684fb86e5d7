#include <Eigen/Dense>
#include <cmath>

#include "doctest.h"
#include "lmv/baselines/kpca.hpp"
#include "lmv/baselines/pca.hpp"
#include "lmv/core/errors.hpp"
#include "lmv/core/rng.hpp"

using namespace lmv;

namespace {

// Spec with exactly `n` parameters: a 1-(n-1)/2... is awkward, so use a
// single linear layer m -> 1 which has m + 1 parameters.
MlpSpec spec_with(std::size_t n) { return MlpSpec{{n - 1, 1}}; }

Trajectory from_rows(const std::vector<std::vector<double>>& rows) {
  Trajectory t;
  t.spec = spec_with(rows.front().size());
  t.checkpoints = rows;
  for (std::size_t i = 0; i < rows.size(); ++i) t.epochs.push_back(i);
  t.loss_names = {"L"};
  t.losses = DenseMatrix(rows.size(), 1, 0.5);
  return t;
}

std::vector<std::vector<double>> random_points(std::size_t k, std::size_t n, std::uint64_t seed) {
  CounterRng rng(seed, 5);
  std::vector<std::vector<double>> p(k, std::vector<double>(n));
  for (auto& r : p)
    for (double& v : r) v = rng.normal();
  return p;
}

// k points on a 2-D affine plane in R^n.
std::vector<std::vector<double>> planar_points(std::size_t k, std::size_t n, std::uint64_t seed) {
  CounterRng rng(seed, 6);
  std::vector<double> o(n), u(n), v(n);
  for (std::size_t j = 0; j < n; ++j) {
    o[j] = rng.normal();
    u[j] = rng.normal();
    v[j] = rng.normal();
  }
  std::vector<std::vector<double>> p(k, std::vector<double>(n));
  for (std::size_t i = 0; i < k; ++i) {
    const double a = rng.uniform(-1, 1), b = rng.uniform(-1, 1);
    for (std::size_t j = 0; j < n; ++j) p[i][j] = o[j] + a * u[j] + b * v[j];
  }
  return p;
}

Eigen::MatrixXd to_eigen(const DenseMatrix& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) e(r, c) = m(r, c);
  return e;
}

}  // namespace

TEST_CASE("pca reconstructs planar trajectories exactly") {
  const Trajectory t = from_rows(planar_points(12, 9, 1));
  const NormalizedTrajectory norm = normalize(t);
  const PcaPlane plane = fit_pca(t);
  for (std::size_t i = 0; i < t.size(); ++i) {
    const Latent z = plane.encode(norm.points.row(i));
    CHECK(std::abs(z[0]) <= 1.0);
    CHECK(std::abs(z[1]) <= 1.0);
    const std::vector<double> back = plane.decode(z);
    CHECK(distance(back, norm.points.row(i)) < 1e-9);
  }
  // origin is the final checkpoint and maps inside the square
  CHECK(distance(plane.origin(), norm.points.row(t.size() - 1)) == 0.0);
}

TEST_CASE("pca directions match an independent SVD") {
  const Trajectory t = from_rows(random_points(5, 10, 2));
  const NormalizedTrajectory norm = normalize(t);
  const PcaPlane plane = fit_pca(t);

  Eigen::MatrixXd x = to_eigen(norm.points);
  const Eigen::RowVectorXd mean = x.colwise().mean();
  x.rowwise() -= mean;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinV);
  for (int d = 0; d < 2; ++d) {
    double dp = 0.0;
    for (std::size_t j = 0; j < 10; ++j) dp += plane.basis()(static_cast<std::size_t>(d), j) * svd.matrixV()(static_cast<Eigen::Index>(j), d);
    CHECK(std::abs(std::abs(dp) - 1.0) < 1e-8);
    const double var = svd.singularValues()(d) * svd.singularValues()(d);
    CHECK(plane.variances()[static_cast<std::size_t>(d)] == doctest::Approx(var).epsilon(1e-8));
  }
  const double rowdot = dot(plane.basis().row(0), plane.basis().row(1));
  CHECK(std::abs(rowdot) < 1e-12);

  // decode(encode(x)) is the orthogonal projection onto the plane through the origin
  const Eigen::MatrixXd v2 = svd.matrixV().leftCols(2);
  Eigen::VectorXd o(10);
  for (std::size_t j = 0; j < 10; ++j) o(static_cast<Eigen::Index>(j)) = plane.origin()[j];
  for (std::size_t i = 0; i < t.size(); ++i) {
    Eigen::VectorXd p(10);
    for (std::size_t j = 0; j < 10; ++j) p(static_cast<Eigen::Index>(j)) = norm.points(i, j);
    const Eigen::VectorXd proj = o + v2 * (v2.transpose() * (p - o));
    const std::vector<double> got = plane.decode(plane.encode(norm.points.row(i)));
    for (std::size_t j = 0; j < 10; ++j) CHECK(got[j] == doctest::Approx(proj(static_cast<Eigen::Index>(j))).epsilon(1e-8));
  }
}

TEST_CASE("pca projection is idempotent") {
  const Trajectory t = from_rows(random_points(8, 7, 3));
  const PcaPlane plane = fit_pca(t);
  CounterRng rng(9, 1);
  std::vector<double> x(7);
  for (double& v : x) v = rng.normal();
  const std::vector<double> once = plane.decode(plane.encode(x));
  const std::vector<double> twice = plane.decode(plane.encode(once));
  CHECK(distance(once, twice) < 1e-10);
}

TEST_CASE("pca rejects degenerate trajectories") {
  std::vector<std::vector<double>> line;
  for (int i = 0; i < 6; ++i) line.push_back({1.0 * i, 2.0 * i, -1.0 * i, 0.5 * i});
  CHECK_THROWS_AS(fit_pca(from_rows(line)), DegenerateError);
  CHECK_THROWS_AS(fit_pca(from_rows(random_points(2, 4, 1))), DegenerateError);
}

TEST_CASE("pca serialization round trip") {
  const Trajectory t = from_rows(random_points(6, 5, 4));
  const PcaPlane a = fit_pca(t);
  const PcaPlane b = pca_from_nvtj(decode_nvtj(encode_nvtj(pca_to_nvtj(a))));
  CHECK(b.basis() == a.basis());
  CHECK(b.origin() == a.origin());
  CHECK(b.target_spec() == a.target_spec());
  CHECK(b.decode({0.3, -0.1}) == a.decode({0.3, -0.1}));
}

TEST_CASE("linear-kernel kpca agrees with pca up to sign") {
  const Trajectory t = from_rows(random_points(7, 6, 5));
  const NormalizedTrajectory norm = normalize(t);
  const PcaPlane plane = fit_pca(t);
  KpcaOptions opts;
  opts.kernel = KernelKind::linear;
  const KpcaModel k = fit_kpca(t, opts);
  // Both project onto the same directions; PCA measures from the final
  // checkpoint and KPCA from the mean, so compare differences.
  for (int d = 0; d < 2; ++d) {
    double sign = 0.0;
    for (std::size_t i = 1; i < t.size(); ++i) {
      const double pd = plane.raw_coordinates(norm.points.row(i))[d] - plane.raw_coordinates(norm.points.row(0))[d];
      const double kd = k.raw_coordinates(norm.points.row(i))[d] - k.raw_coordinates(norm.points.row(0))[d];
      if (sign == 0.0 && std::abs(pd) > 1e-3) sign = (pd * kd > 0) ? 1.0 : -1.0;
      CHECK(kd * sign == doctest::Approx(pd).epsilon(1e-6).scale(1.0));
    }
  }
}

TEST_CASE("kpca codes stay in the latent square and the kernel is PSD after centering") {
  const Trajectory t = from_rows(random_points(10, 6, 6));
  const NormalizedTrajectory norm = normalize(t);
  const KpcaModel k = fit_kpca(t);
  for (std::size_t i = 0; i < t.size(); ++i) {
    const Latent z = k.encode(norm.points.row(i));
    CHECK(std::abs(z[0]) <= 1.0);
    CHECK(std::abs(z[1]) <= 1.0);
    CHECK(z[0] == doctest::Approx(k.codes()(i, 0)));
    CHECK(z[1] == doctest::Approx(k.codes()(i, 1)));
  }
  const std::size_t n = t.size();
  Eigen::MatrixXd kern(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      kern(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = k.kernel(norm.points.row(i), norm.points.row(j));
  const Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / n);
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h * kern * h).eigenvalues();
  CHECK(ev.minCoeff() > -1e-10);
  const std::vector<double> res = k.inverse_residuals();
  REQUIRE(res.size() == n);
  for (std::size_t i = 0; i < n; ++i) {
    const Latent z{k.codes()(i, 0), k.codes()(i, 1)};
    CHECK(res[i] == doctest::Approx(distance(k.decode(z), norm.points.row(i))));
  }
}

TEST_CASE("kpca tolerates duplicate checkpoints") {
  auto pts = random_points(6, 5, 7);
  pts.push_back(pts[2]);
  pts.push_back(pts[2]);
  const Trajectory t = from_rows(pts);
  const KpcaModel k = fit_kpca(t);
  const std::vector<double> d = k.decode({0.0, 0.0});
  for (double v : d) CHECK(std::isfinite(v));
}

TEST_CASE("kpca serialization round trip") {
  const Trajectory t = from_rows(random_points(6, 5, 8));
  const KpcaModel a = fit_kpca(t);
  const std::string bytes = encode_nvtj(kpca_to_nvtj(a));
  const KpcaModel b = kpca_from_nvtj(decode_nvtj(bytes));
  CHECK(encode_nvtj(kpca_to_nvtj(b)) == bytes);
  CHECK(b.decode({0.2, 0.4}) == a.decode({0.2, 0.4}));
  CHECK_THROWS_AS(pca_from_nvtj(decode_nvtj(bytes)), FormatError);
}

TEST_CASE("median pairwise distance") {
  const DenseMatrix rows(3, 1, std::vector<double>{0.0, 1.0, 3.0});
  CHECK(median_pairwise_distance(rows) == 2.0);
}
