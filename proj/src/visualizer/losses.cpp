#include "lmv/visualizer/losses.hpp"

#include <cmath>
#include <limits>

#include "lmv/core/errors.hpp"

namespace lmv {

namespace {

void require_points(const AutoEncoder& ae, const DenseMatrix& points) {
  if (points.cols() != ae.dimension()) throw ShapeError("visualizer loss: checkpoint dimension differs from the encoder input");
}

// Encodes all rows, lets `body` fill dL/dZ, then backpropagates it.
template <typename Body>
double through_encoder(const AutoEncoder& ae, const DenseMatrix& points, AeGradient* grad, Body body) {
  require_points(ae, points);
  ForwardCache cache;
  const DenseMatrix z = mlp_forward(ae.encoder, points, grad ? &cache : nullptr);
  DenseMatrix dz(z.rows(), 2, 0.0);
  const double loss = body(z, grad ? &dz : nullptr);
  if (grad) mlp_backward(ae.encoder, cache, dz, grad->encoder);
  return loss;
}

struct GridPart {
  double loss = 0.0;
  DenseMatrix d_decoded;
};

GridPart grid_from(const DenseMatrix& decoded, const DenseMatrix& samples, const DenseMatrix& points,
                   const DenseMatrix& z, double d_max, double l_max, DenseMatrix* dz) {
  const GridMatch m = match_grid(decoded, samples, points, z);
  const std::size_t g = samples.rows();
  const double offset = std::log(d_max) - l_max;
  GridPart out;
  if (dz) out.d_decoded = DenseMatrix(g, decoded.cols(), 0.0);
  for (std::size_t s = 0; s < g; ++s) {
    const double e = std::log(m.d[s] + kGridLogEps) - m.l[s] - offset;
    out.loss += e * e;
    if (!dz) continue;
    const double coef = 2.0 * e / static_cast<double>(g);
    const std::size_t j = m.nearest[s];
    if (m.d[s] > 0.0) {
      const double scale = coef / ((m.d[s] + kGridLogEps) * m.d[s]);
      auto row = out.d_decoded.row(s);
      for (std::size_t c = 0; c < row.size(); ++c) row[c] = scale * (decoded(s, c) - points(j, c));
    }
    if (m.l[s] > 0.0) {
      // d(-l)/dz_j = -(z_j - g) / l
      for (std::size_t c = 0; c < 2; ++c) (*dz)(j, c) -= coef * (z(j, c) - samples(s, c)) / m.l[s];
    }
  }
  out.loss /= static_cast<double>(g);
  return out;
}

}  // namespace

AeGradient AeGradient::zeros(const AutoEncoder& ae) {
  return {std::vector<double>(ae.encoder.theta.size(), 0.0), std::vector<double>(ae.decoder.theta.size(), 0.0)};
}

double loss_rec(const AutoEncoder& ae, const DenseMatrix& batch, AeGradient* grad) {
  require_points(ae, batch);
  if (batch.rows() == 0) throw ValidationError("loss_rec: empty batch");
  ForwardCache enc_cache;
  ForwardCache dec_cache;
  const DenseMatrix z = mlp_forward(ae.encoder, batch, grad ? &enc_cache : nullptr);
  const DenseMatrix rec = mlp_forward(ae.decoder, z, grad ? &dec_cache : nullptr);
  const double count = static_cast<double>(batch.size());
  double loss = 0.0;
  DenseMatrix up(rec.rows(), rec.cols());
  for (std::size_t i = 0; i < rec.size(); ++i) {
    const double d = rec.values()[i] - batch.values()[i];
    loss += d * d;
    up.values()[i] = 2.0 * d / count;
  }
  if (grad) {
    DenseMatrix dz;
    mlp_backward(ae.decoder, dec_cache, up, grad->decoder, &dz);
    mlp_backward(ae.encoder, enc_cache, dz, grad->encoder);
  }
  return loss / count;
}

double anchor_loss_latent(const DenseMatrix& z, const AnchorSet& anchors, DenseMatrix* dz) {
  if (anchors.size() == 0) return 0.0;
  const double count = 2.0 * static_cast<double>(anchors.size());
  double loss = 0.0;
  for (std::size_t a = 0; a < anchors.size(); ++a) {
    const std::size_t i = anchors.indices[a];
    if (i >= z.rows()) throw ValidationError("anchors: checkpoint index out of range");
    for (std::size_t c = 0; c < 2; ++c) {
      const double d = z(i, c) - anchors.targets[a][c];
      loss += d * d;
      if (dz) (*dz)(i, c) += 2.0 * d / count;
    }
  }
  return loss / count;
}

double traj_loss_latent(const DenseMatrix& z, const std::vector<std::size_t>& segment_starts, DenseMatrix* dz) {
  struct Step {
    std::size_t from;
    double size;
  };
  std::vector<Step> steps;
  for (std::size_t s = 0; s < segment_starts.size(); ++s) {
    const std::size_t begin = segment_starts[s];
    const std::size_t end = s + 1 < segment_starts.size() ? segment_starts[s + 1] : z.rows();
    for (std::size_t i = begin; i + 1 < end; ++i) {
      const double dx = z(i + 1, 0) - z(i, 0);
      const double dy = z(i + 1, 1) - z(i, 1);
      steps.push_back({i, std::sqrt(dx * dx + dy * dy)});
    }
  }
  if (steps.size() < 2) return 0.0;
  const double m = static_cast<double>(steps.size());
  double mean = 0.0;
  for (const Step& st : steps) mean += st.size;
  mean /= m;
  double loss = 0.0;
  for (const Step& st : steps) {
    const double dev = st.size - mean;
    loss += dev * dev;
    if (dz && st.size > 0.0) {
      const double coef = 2.0 * dev / m / st.size;
      for (std::size_t c = 0; c < 2; ++c) {
        const double diff = z(st.from + 1, c) - z(st.from, c);
        (*dz)(st.from + 1, c) += coef * diff;
        (*dz)(st.from, c) -= coef * diff;
      }
    }
  }
  return loss / m;
}

double loss_anch(const AutoEncoder& ae, const DenseMatrix& points, const AnchorSet& anchors, AeGradient* grad) {
  if (anchors.size() == 0) return 0.0;
  return through_encoder(ae, points, grad,
                         [&](const DenseMatrix& z, DenseMatrix* dz) { return anchor_loss_latent(z, anchors, dz); });
}

double loss_traj(const AutoEncoder& ae, const DenseMatrix& points, const std::vector<std::size_t>& segment_starts,
                 AeGradient* grad) {
  return through_encoder(ae, points, grad, [&](const DenseMatrix& z, DenseMatrix* dz) {
    return traj_loss_latent(z, segment_starts, dz);
  });
}

GridMatch match_grid(const DenseMatrix& decoded, const DenseMatrix& samples, const DenseMatrix& points,
                     const DenseMatrix& codes) {
  if (decoded.cols() != points.cols() || samples.cols() != 2 || codes.rows() != points.rows())
    throw ShapeError("match_grid: inconsistent shapes");
  if (points.rows() == 0) throw ValidationError("match_grid: no checkpoints");
  const std::size_t g = decoded.rows();
  const std::size_t k = points.rows();
  // Squared distances via the Gram expansion pick the candidate; the chosen
  // distance is then recomputed directly.
  const DenseMatrix cross = matmul_nt(decoded, points);
  std::vector<double> pn(k);
  for (std::size_t j = 0; j < k; ++j) pn[j] = dot(points.row(j), points.row(j));
  GridMatch m;
  m.nearest.resize(g);
  m.d.resize(g);
  m.l.resize(g);
  for (std::size_t s = 0; s < g; ++s) {
    std::size_t best = 0;
    double best_val = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < k; ++j) {
      const double v = pn[j] - 2.0 * cross(s, j);
      if (v < best_val) {
        best_val = v;
        best = j;
      }
    }
    m.nearest[s] = best;
    m.d[s] = distance(decoded.row(s), points.row(best));
    const double dx = samples(s, 0) - codes(best, 0);
    const double dy = samples(s, 1) - codes(best, 1);
    m.l[s] = std::sqrt(dx * dx + dy * dy);
  }
  return m;
}

double loss_grid(const AutoEncoder& ae, const DenseMatrix& points, const DenseMatrix& samples, double d_max,
                 double l_max, AeGradient* grad) {
  if (!(d_max > 0.0)) throw ValidationError("loss_grid: d_max must be > 0");
  if (samples.rows() == 0) return 0.0;
  ForwardCache dec_cache;
  const DenseMatrix decoded = mlp_forward(ae.decoder, samples, grad ? &dec_cache : nullptr);
  DenseMatrix d_decoded;
  const double loss = through_encoder(ae, points, grad, [&](const DenseMatrix& z, DenseMatrix* dz) {
    GridPart part = grid_from(decoded, samples, points, z, d_max, l_max, dz);
    d_decoded = std::move(part.d_decoded);
    return part.loss;
  });
  if (grad) mlp_backward(ae.decoder, dec_cache, d_decoded, grad->decoder);
  return loss;
}

LossBreakdown weighted_loss(const AutoEncoder& ae, const VisualizerConfig& config, const StepInputs& in,
                            AeGradient* grad) {
  LossBreakdown out;
  AeGradient rec_grad;
  if (config.c_rec > 0.0 && in.batch) {
    if (grad) rec_grad = AeGradient::zeros(ae);
    out.rec = loss_rec(ae, *in.batch, grad ? &rec_grad : nullptr);
    if (grad) {
      for (std::size_t i = 0; i < rec_grad.encoder.size(); ++i) grad->encoder[i] += config.c_rec * rec_grad.encoder[i];
      for (std::size_t i = 0; i < rec_grad.decoder.size(); ++i) grad->decoder[i] += config.c_rec * rec_grad.decoder[i];
    }
  }
  const bool use_anch = config.c_anch > 0.0 && in.anchors && in.anchors->size() > 0;
  const bool use_traj = config.c_traj > 0.0 && in.segment_starts;
  const bool use_grid = config.c_grid > 0.0 && in.samples && in.samples->rows() > 0;
  if (use_anch || use_traj || use_grid) {
    if (!in.points) throw UsageError("weighted_loss: constraint terms need the full trajectory");
    ForwardCache dec_cache;
    DenseMatrix decoded;
    if (use_grid) decoded = mlp_forward(ae.decoder, *in.samples, grad ? &dec_cache : nullptr);
    DenseMatrix d_decoded;
    through_encoder(ae, *in.points, grad, [&](const DenseMatrix& z, DenseMatrix* dz) {
      DenseMatrix part;
      auto add = [&](double c) {
        if (!dz) return;
        for (std::size_t i = 0; i < part.size(); ++i) dz->values()[i] += c * part.values()[i];
      };
      if (use_anch) {
        part = DenseMatrix(z.rows(), 2, 0.0);
        out.anch = anchor_loss_latent(z, *in.anchors, dz ? &part : nullptr);
        add(config.c_anch);
      }
      if (use_traj) {
        part = DenseMatrix(z.rows(), 2, 0.0);
        out.traj = traj_loss_latent(z, *in.segment_starts, dz ? &part : nullptr);
        add(config.c_traj);
      }
      if (use_grid) {
        part = DenseMatrix(z.rows(), 2, 0.0);
        GridPart gp = grid_from(decoded, *in.samples, *in.points, z, in.d_max, config.l_max, dz ? &part : nullptr);
        out.grid = gp.loss;
        add(config.c_grid);
        if (dz) {
          d_decoded = std::move(gp.d_decoded);
          for (double& v : d_decoded.values()) v *= config.c_grid;
        }
      }
      return 0.0;
    });
    if (grad && use_grid) mlp_backward(ae.decoder, dec_cache, d_decoded, grad->decoder);
  }
  out.total = config.c_rec * out.rec + config.c_anch * out.anch + config.c_traj * out.traj + config.c_grid * out.grid;
  return out;
}

}  // namespace lmv
