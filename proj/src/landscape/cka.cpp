#include "lmv/landscape/cka.hpp"

#include <cmath>

#include "lmv/core/errors.hpp"

namespace lmv {

std::vector<double> packed_centered_gram(const DenseMatrix& f) {
  const std::size_t n = f.rows();
  const std::size_t p = f.cols();
  DenseMatrix c(n, p);
  for (std::size_t j = 0; j < p; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += f(i, j);
    mean /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) c(i, j) = f(i, j) - mean;
  }
  const DenseMatrix g = matmul_nt(c, c);
  std::vector<double> packed;
  packed.reserve(n * (n + 1) / 2);
  const double s2 = std::sqrt(2.0);
  for (std::size_t i = 0; i < n; ++i) {
    packed.push_back(g(i, i));
    for (std::size_t j = i + 1; j < n; ++j) packed.push_back(s2 * 0.5 * (g(i, j) + g(j, i)));
  }
  return packed;
}

CkaResult cka_from_packed(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw ShapeError("cka: feature matrices need the same number of probe rows");
  double ab = 0.0;
  double aa = 0.0;
  double bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  if (!(aa > 0.0) || !(bb > 0.0)) return {0.0, true};
  double v = ab / std::sqrt(aa * bb);
  v = std::min(1.0, std::max(0.0, v));
  return {v, false};
}

CkaResult cka(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows()) throw ShapeError("cka: feature matrices need the same number of probe rows");
  if (a.rows() < 2) throw ValidationError("cka: need at least 2 probe rows");
  return cka_from_packed(packed_centered_gram(a), packed_centered_gram(b));
}

std::vector<DenseMatrix> decoded_features(const Projector& model, const DenseMatrix& latents, const DenseMatrix& probes) {
  const DenseMatrix decoded = model.decode_rows(latents);
  std::vector<DenseMatrix> out;
  out.reserve(latents.rows());
  for (std::size_t i = 0; i < latents.rows(); ++i) {
    const FlatParams net{model.target_spec(), model.norm_stats().denormalize(decoded.row(i))};
    out.push_back(mlp_hidden_features(net, probes));
  }
  return out;
}

LandscapeGrid density_grid(const Projector& model, const GridSpec& spec, const DenseMatrix& probes,
                           const Trajectory* overlay_traj, DensityOptions options) {
  spec.validate();
  if (spec.resolution > options.max_resolution)
    throw ConfigError("density: resolution " + std::to_string(spec.resolution) + " exceeds the cap " +
                      std::to_string(options.max_resolution));
  if (probes.cols() != model.target_spec().input_size()) throw ShapeError("density: probe inputs do not fit the network");
  const DenseMatrix mesh = spec.mesh();
  const std::size_t m = mesh.rows();
  std::vector<std::vector<double>> packed;
  packed.reserve(m);
  {
    const auto feats = decoded_features(model, mesh, probes);
    for (const auto& f : feats) packed.push_back(packed_centered_gram(f));
  }
  DenseMatrix sim(m, m, 0.0);
  std::size_t degenerate = 0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      const CkaResult r = cka_from_packed(packed[j], packed[i]);
      sim(i, j) = sim(j, i) = r.value;
      degenerate += r.degenerate ? 1 : 0;
    }
  LandscapeGrid grid;
  grid.spec = spec;
  grid.field_name = "density";
  grid.field = DenseMatrix(spec.resolution, spec.resolution);
  for (std::size_t i = 0; i < m; ++i) {
    double rho = 0.0;
    for (std::size_t j = 0; j < m; ++j)
      if (j != i) rho += sim(j, i);
    grid.field.values()[i] = rho;
  }
  if (overlay_traj) {
    const DenseMatrix codes = encode_trajectory(model, *overlay_traj);
    for (std::size_t i = 0; i < overlay_traj->size(); ++i) grid.overlay.push_back({i, {codes(i, 0), codes(i, 1)}, 0.0});
    grid.overlay_name = "";
    grid.segment_starts = overlay_traj->segment_starts;
  }
  grid.provenance = Json{{"method", model.name()}, {"probes", probes.rows()}, {"degenerate_pairs", degenerate}};
  return grid;
}

}  // namespace lmv
