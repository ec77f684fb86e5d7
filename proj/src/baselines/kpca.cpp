#include "lmv/baselines/kpca.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lmv/core/errors.hpp"
#include "lmv/core/sym_eigen.hpp"
#include "lmv/visualizer/model.hpp"

namespace lmv {

namespace {

double rbf(double gamma, double sq) { return std::exp(-gamma * sq); }

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

std::string to_string(KernelKind k) { return k == KernelKind::rbf ? "rbf" : "linear"; }

KernelKind kernel_from_string(const std::string& s) {
  if (s == "rbf") return KernelKind::rbf;
  if (s == "linear") return KernelKind::linear;
  throw ConfigError("unknown kernel '" + s + "'");
}

DenseMatrix latent_kernel(const DenseMatrix& codes, double gamma) {
  const std::size_t k = codes.rows();
  DenseMatrix g(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) g(i, j) = rbf(gamma, squared_distance(codes.row(i), codes.row(j)));
  return g;
}

}  // namespace

void to_json(Json& j, const KpcaOptions& o) {
  j = Json{{"kernel", to_string(o.kernel)}, {"gamma", o.gamma}, {"ridge", o.ridge}, {"decoder_gamma", o.decoder_gamma}};
}

void from_json(const Json& j, KpcaOptions& o) {
  if (j.contains("kernel")) o.kernel = kernel_from_string(j.at("kernel").get<std::string>());
  read_optional(j, "gamma", o.gamma);
  read_optional(j, "ridge", o.ridge);
  read_optional(j, "decoder_gamma", o.decoder_gamma);
}

double median_pairwise_distance(const DenseMatrix& rows) {
  std::vector<double> d;
  for (std::size_t i = 0; i < rows.rows(); ++i)
    for (std::size_t j = i + 1; j < rows.rows(); ++j) d.push_back(distance(rows.row(i), rows.row(j)));
  if (d.empty()) return 0.0;
  const std::size_t mid = d.size() / 2;
  std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(mid), d.end());
  const double upper = d[mid];
  if (d.size() % 2 == 1) return upper;
  const double lower = *std::max_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

KpcaModel::KpcaModel(MlpSpec target_spec, NormStats stats, KpcaOptions options, DenseMatrix support,
                     DenseMatrix alphas, std::vector<double> kernel_col_mean, double kernel_mean, LatentFrame frame,
                     DenseMatrix codes, DenseMatrix inverse_coef)
    : target_spec_(std::move(target_spec)),
      stats_(std::move(stats)),
      options_(options),
      support_(std::move(support)),
      alphas_(std::move(alphas)),
      kernel_col_mean_(std::move(kernel_col_mean)),
      kernel_mean_(kernel_mean),
      frame_(frame),
      codes_(std::move(codes)),
      inverse_coef_(std::move(inverse_coef)) {
  const std::size_t k = support_.rows();
  if (support_.cols() != target_spec_.param_count() || alphas_.rows() != k || alphas_.cols() != 2 ||
      kernel_col_mean_.size() != k || codes_.rows() != k || inverse_coef_.rows() != k ||
      inverse_coef_.cols() != support_.cols())
    throw ShapeError("KpcaModel: inconsistent shapes");
  if (options_.kernel == KernelKind::rbf && !(options_.gamma > 0.0)) throw ValidationError("KpcaModel: gamma must be > 0");
}

double KpcaModel::kernel(std::span<const double> a, std::span<const double> b) const {
  return options_.kernel == KernelKind::rbf ? rbf(options_.gamma, squared_distance(a, b)) : dot(a, b);
}

std::array<double, 2> KpcaModel::raw_coordinates(std::span<const double> x) const {
  if (x.size() != support_.cols()) throw ShapeError("kpca: vector length mismatch");
  const std::size_t k = support_.rows();
  std::vector<double> kx(k);
  double mean = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    kx[j] = kernel(x, support_.row(j));
    mean += kx[j];
  }
  mean /= static_cast<double>(k);
  std::array<double, 2> c{0.0, 0.0};
  for (std::size_t j = 0; j < k; ++j) {
    const double centered = kx[j] - mean - kernel_col_mean_[j] + kernel_mean_;
    c[0] += alphas_(j, 0) * centered;
    c[1] += alphas_(j, 1) * centered;
  }
  return c;
}

Latent KpcaModel::encode(std::span<const double> x) const {
  const auto c = raw_coordinates(x);
  return frame_.to_latent(c[0], c[1]);
}

std::vector<double> KpcaModel::decode(const Latent& z) const {
  const std::size_t k = codes_.rows();
  const auto c = frame_.to_coords(z);
  std::vector<double> out(support_.cols(), 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    const auto cj = frame_.to_coords({codes_(j, 0), codes_(j, 1)});
    const double dx = c[0] - cj[0];
    const double dy = c[1] - cj[1];
    const double w = rbf(options_.decoder_gamma, dx * dx + dy * dy);
    const auto row = inverse_coef_.row(j);
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += w * row[c];
  }
  return out;
}

std::vector<double> KpcaModel::inverse_residuals() const {
  std::vector<double> r(support_.rows());
  for (std::size_t i = 0; i < support_.rows(); ++i) r[i] = distance(decode({codes_(i, 0), codes_(i, 1)}), support_.row(i));
  return r;
}

KpcaModel fit_kpca(const DenseMatrix& x, const MlpSpec& target_spec, const NormStats& stats, KpcaOptions options) {
  const std::size_t k = x.rows();
  if (k < 3) throw ValidationError("fit_kpca: need at least 3 checkpoints");
  if (options.kernel == KernelKind::rbf && options.gamma == 0.0) {
    const double med = median_pairwise_distance(x);
    if (!(med > 0.0)) throw DegenerateError("fit_kpca: checkpoints coincide, median distance is 0");
    options.gamma = 1.0 / (2.0 * med * med);
  }
  if (options.kernel == KernelKind::rbf && !(options.gamma > 0.0)) throw ConfigError("fit_kpca: gamma must be > 0");
  if (!(options.ridge > 0.0)) throw ConfigError("fit_kpca: ridge must be > 0");

  DenseMatrix gram(k, k);
  if (options.kernel == KernelKind::rbf) {
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) gram(i, j) = rbf(options.gamma, squared_distance(x.row(i), x.row(j)));
  } else {
    const DenseMatrix g = matmul_nt(x, x);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) gram(i, j) = 0.5 * (g(i, j) + g(j, i));
  }
  std::vector<double> col_mean(k, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) col_mean[j] += gram(i, j) / static_cast<double>(k);
  for (double m : col_mean) total += m;
  total /= static_cast<double>(k);
  DenseMatrix centered(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) centered(i, j) = gram(i, j) - col_mean[i] - col_mean[j] + total;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) centered(i, j) = centered(j, i) = 0.5 * (centered(i, j) + centered(j, i));

  const SymmetricEigen eig = symmetric_eigen(centered);
  const double l1 = eig.values[k - 1];
  const double l2 = eig.values[k - 2];
  if (!(l1 > 0.0) || !(l2 > 1e-12 * l1)) throw DegenerateError("fit_kpca: centered kernel has rank below 2");
  DenseMatrix alphas(k, 2);
  for (std::size_t a = 0; a < 2; ++a) {
    const double lam = eig.values[k - 1 - a];
    for (std::size_t i = 0; i < k; ++i) alphas(i, a) = eig.vectors(i, k - 1 - a) / std::sqrt(lam);
  }

  KpcaModel probe(target_spec, stats, options, x, alphas, col_mean, total, LatentFrame{}, DenseMatrix(k, 2),
                  DenseMatrix(k, x.cols()));
  DenseMatrix raw(k, 2);
  for (std::size_t i = 0; i < k; ++i) {
    const auto c = probe.raw_coordinates(x.row(i));
    raw(i, 0) = c[0];
    raw(i, 1) = c[1];
  }
  const LatentFrame frame = LatentFrame::fit(raw);
  DenseMatrix codes(k, 2);
  for (std::size_t i = 0; i < k; ++i) {
    const Latent z = frame.to_latent(raw(i, 0), raw(i, 1));
    codes(i, 0) = z[0];
    codes(i, 1) = z[1];
  }

  if (options.decoder_gamma == 0.0) {
    if (options.kernel == KernelKind::rbf) {
      options.decoder_gamma = options.gamma;
    } else {
      const double med = median_pairwise_distance(raw);
      options.decoder_gamma = med > 0.0 ? 1.0 / (2.0 * med * med) : 1.0;
    }
  }
  DenseMatrix system = latent_kernel(raw, options.decoder_gamma);
  for (std::size_t i = 0; i < k; ++i) system(i, i) += options.ridge;
  DenseMatrix coef;
  try {
    coef = cholesky_solve(system, x);
  } catch (const NumericalError&) {
    const SymmetricEigen se = symmetric_eigen(system);
    std::ostringstream msg;
    msg << "fit_kpca: inverse-map kernel system is ill-conditioned (condition estimate "
        << std::abs(se.values.back()) / std::max(std::abs(se.values.front()), 1e-300) << ")";
    throw NumericalError(msg.str());
  }
  return KpcaModel(target_spec, stats, options, x, std::move(alphas), std::move(col_mean), total, frame,
                   std::move(codes), std::move(coef));
}

KpcaModel fit_kpca(const Trajectory& traj, KpcaOptions options) {
  const NormalizedTrajectory norm = normalize(traj);
  return fit_kpca(norm.points, traj.spec, norm.stats, options);
}

NvtjFile kpca_to_nvtj(const KpcaModel& m) {
  NvtjFile f;
  f.header = Json{{"kind", "kpca"},
                  {"target_spec", m.target_spec()},
                  {"options", m.options()},
                  {"support_count", m.support().rows()},
                  {"kernel_mean", m.kernel_mean()},
                  {"frame", {{"center", m.frame().center}, {"half", m.frame().half}}}};
  f.blocks.push_back(m.support().values());
  f.blocks.push_back(m.alphas().values());
  f.blocks.push_back(m.kernel_col_mean());
  f.blocks.push_back(m.codes().values());
  f.blocks.push_back(m.inverse_coef().values());
  append_norm_stats(f, m.norm_stats());
  return f;
}

KpcaModel kpca_from_nvtj(const NvtjFile& f) {
  expect_nvtj_kind(f, "kpca");
  if (f.blocks.size() != 8) throw FormatError("kpca file: expected 8 blocks", 16);
  try {
    const auto spec = f.header.at("target_spec").get<MlpSpec>();
    const auto k = f.header.at("support_count").get<std::size_t>();
    const std::size_t n = spec.param_count();
    LatentFrame frame;
    frame.center = f.header.at("frame").at("center").get<std::array<double, 2>>();
    frame.half = f.header.at("frame").at("half").get<double>();
    return KpcaModel(spec, read_norm_stats(f, 5), f.header.at("options").get<KpcaOptions>(),
                     DenseMatrix(k, n, f.blocks[0]), DenseMatrix(k, 2, f.blocks[1]), f.blocks[2],
                     f.header.at("kernel_mean").get<double>(), frame, DenseMatrix(k, 2, f.blocks[3]),
                     DenseMatrix(k, n, f.blocks[4]));
  } catch (const Json::exception& e) {
    throw FormatError(std::string("kpca header: ") + e.what(), 16);
  } catch (const ShapeError& e) {
    throw FormatError(std::string("kpca file: ") + e.what(), 16);
  }
}

}  // namespace lmv
