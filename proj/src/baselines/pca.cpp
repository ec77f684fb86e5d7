#include "lmv/baselines/pca.hpp"

#include <algorithm>
#include <cmath>

#include "lmv/core/errors.hpp"
#include "lmv/core/sym_eigen.hpp"
#include "lmv/visualizer/model.hpp"

namespace lmv {

LatentFrame LatentFrame::fit(const DenseMatrix& coords, double margin) {
  if (coords.rows() == 0 || coords.cols() != 2) throw ShapeError("LatentFrame: need N x 2 coordinates");
  LatentFrame f;
  double half = 0.0;
  for (std::size_t c = 0; c < 2; ++c) {
    double lo = coords(0, c);
    double hi = coords(0, c);
    for (std::size_t i = 1; i < coords.rows(); ++i) {
      lo = std::min(lo, coords(i, c));
      hi = std::max(hi, coords(i, c));
    }
    f.center[c] = 0.5 * (lo + hi);
    half = std::max(half, 0.5 * (hi - lo));
  }
  if (!(half > 0.0)) throw DegenerateError("LatentFrame: all points coincide");
  f.half = margin * half;
  return f;
}

TopTwo principal_directions(const DenseMatrix& rows) {
  const std::size_t k = rows.rows();
  if (k < 2) throw DegenerateError("principal directions need at least 2 rows");
  const DenseMatrix gram = matmul_nt(rows, rows);
  DenseMatrix sym(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) sym(i, j) = 0.5 * (gram(i, j) + gram(j, i));
  const SymmetricEigen eig = symmetric_eigen(sym);
  const double l1 = eig.values[k - 1];
  const double l2 = eig.values[k - 2];
  if (!(l1 > 0.0) || !(l2 > 1e-12 * l1))
    throw DegenerateError("trajectory spans fewer than two independent directions (rank-deficient basis)");
  TopTwo out;
  out.eigenvalues = {l1, l2};
  out.directions = DenseMatrix(2, rows.cols());
  for (std::size_t a = 0; a < 2; ++a) {
    const std::size_t col = k - 1 - a;
    auto dir = out.directions.row(a);
    for (std::size_t i = 0; i < k; ++i) {
      const double u = eig.vectors(i, col);
      const auto r = rows.row(i);
      for (std::size_t c = 0; c < dir.size(); ++c) dir[c] += u * r[c];
    }
  }
  // Gram-Schmidt against round-off.
  auto d0 = out.directions.row(0);
  auto d1 = out.directions.row(1);
  const double n0 = norm2(d0);
  for (double& v : d0) v /= n0;
  const double p = dot(d0, d1);
  for (std::size_t c = 0; c < d1.size(); ++c) d1[c] -= p * d0[c];
  const double n1 = norm2(d1);
  for (double& v : d1) v /= n1;
  // Deterministic orientation: largest-magnitude component positive.
  for (std::size_t a = 0; a < 2; ++a) {
    auto d = out.directions.row(a);
    std::size_t arg = 0;
    for (std::size_t c = 1; c < d.size(); ++c)
      if (std::abs(d[c]) > std::abs(d[arg])) arg = c;
    if (d[arg] < 0.0)
      for (double& v : d) v = -v;
  }
  return out;
}

PcaPlane::PcaPlane(MlpSpec target_spec, NormStats stats, std::vector<double> origin, DenseMatrix basis,
                   std::array<double, 2> variances, LatentFrame frame)
    : target_spec_(std::move(target_spec)),
      stats_(std::move(stats)),
      origin_(std::move(origin)),
      basis_(std::move(basis)),
      variances_(variances),
      frame_(frame) {
  if (basis_.rows() != 2 || basis_.cols() != origin_.size() || origin_.size() != target_spec_.param_count())
    throw ShapeError("PcaPlane: inconsistent shapes");
  if (!(frame_.half > 0.0)) throw ValidationError("PcaPlane: grid scale must be > 0");
}

std::array<double, 2> PcaPlane::raw_coordinates(std::span<const double> x) const {
  if (x.size() != origin_.size()) throw ShapeError("pca: vector length mismatch");
  std::array<double, 2> c{0.0, 0.0};
  for (std::size_t a = 0; a < 2; ++a) {
    const auto b = basis_.row(a);
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) s += b[j] * (x[j] - origin_[j]);
    c[a] = s;
  }
  return c;
}

Latent PcaPlane::encode(std::span<const double> x) const {
  const auto c = raw_coordinates(x);
  return frame_.to_latent(c[0], c[1]);
}

std::vector<double> PcaPlane::decode(const Latent& z) const {
  const auto c = frame_.to_coords(z);
  std::vector<double> x = origin_;
  const auto b0 = basis_.row(0);
  const auto b1 = basis_.row(1);
  for (std::size_t j = 0; j < x.size(); ++j) x[j] += c[0] * b0[j] + c[1] * b1[j];
  return x;
}

PcaPlane fit_pca(const DenseMatrix& x, const MlpSpec& target_spec, const NormStats& stats) {
  const std::size_t k = x.rows();
  if (k < 3) throw DegenerateError("fit_pca: need at least 3 checkpoints to span a plane");
  const std::size_t n = x.cols();
  std::vector<double> mean(n, 0.0);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < n; ++j) mean[j] += x(i, j);
  for (double& m : mean) m /= static_cast<double>(k);
  DenseMatrix centered(k, n);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < n; ++j) centered(i, j) = x(i, j) - mean[j];
  TopTwo top = principal_directions(centered);
  std::vector<double> origin(x.row(k - 1).begin(), x.row(k - 1).end());
  PcaPlane unscaled(target_spec, stats, origin, top.directions, top.eigenvalues, LatentFrame{});
  DenseMatrix coords(k, 2);
  for (std::size_t i = 0; i < k; ++i) {
    const auto c = unscaled.raw_coordinates(x.row(i));
    coords(i, 0) = c[0];
    coords(i, 1) = c[1];
  }
  return PcaPlane(target_spec, stats, std::move(origin), std::move(top.directions), top.eigenvalues,
                  LatentFrame::fit(coords));
}

PcaPlane fit_pca(const Trajectory& traj) {
  const NormalizedTrajectory norm = normalize(traj);
  return fit_pca(norm.points, traj.spec, norm.stats);
}

NvtjFile pca_to_nvtj(const PcaPlane& p) {
  NvtjFile f;
  f.header = Json{{"kind", "pca"},
                  {"target_spec", p.target_spec()},
                  {"variances", p.variances()},
                  {"frame", {{"center", p.frame().center}, {"half", p.frame().half}}}};
  f.blocks.push_back(p.origin());
  f.blocks.emplace_back(p.basis().row(0).begin(), p.basis().row(0).end());
  f.blocks.emplace_back(p.basis().row(1).begin(), p.basis().row(1).end());
  append_norm_stats(f, p.norm_stats());
  return f;
}

PcaPlane pca_from_nvtj(const NvtjFile& f) {
  expect_nvtj_kind(f, "pca");
  if (f.blocks.size() != 6) throw FormatError("pca file: expected 6 blocks", 16);
  try {
    const std::size_t n = f.blocks[0].size();
    DenseMatrix basis(2, n);
    if (f.blocks[1].size() != n || f.blocks[2].size() != n) throw FormatError("pca file: basis length mismatch", 16);
    std::copy(f.blocks[1].begin(), f.blocks[1].end(), basis.row(0).begin());
    std::copy(f.blocks[2].begin(), f.blocks[2].end(), basis.row(1).begin());
    LatentFrame frame;
    frame.center = f.header.at("frame").at("center").get<std::array<double, 2>>();
    frame.half = f.header.at("frame").at("half").get<double>();
    return PcaPlane(f.header.at("target_spec").get<MlpSpec>(), read_norm_stats(f, 3), f.blocks[0], std::move(basis),
                    f.header.at("variances").get<std::array<double, 2>>(), frame);
  } catch (const Json::exception& e) {
    throw FormatError(std::string("pca header: ") + e.what(), 16);
  } catch (const ShapeError& e) {
    throw FormatError(std::string("pca file: ") + e.what(), 16);
  }
}

}  // namespace lmv
