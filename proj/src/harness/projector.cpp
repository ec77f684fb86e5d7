#include "lmv/harness/projector.hpp"

#include <algorithm>

#include "lmv/core/errors.hpp"

namespace lmv {

DenseMatrix Projector::encode_rows(const DenseMatrix& normalized) const {
  DenseMatrix out(normalized.rows(), 2);
  for (std::size_t i = 0; i < normalized.rows(); ++i) {
    const Latent z = encode(normalized.row(i));
    out(i, 0) = z[0];
    out(i, 1) = z[1];
  }
  return out;
}

DenseMatrix Projector::decode_rows(const DenseMatrix& latents) const {
  if (latents.cols() != 2) throw ShapeError("decode_rows: latents must have 2 columns");
  DenseMatrix out(latents.rows(), target_spec().param_count());
  for (std::size_t i = 0; i < latents.rows(); ++i) {
    const auto v = decode({latents(i, 0), latents(i, 1)});
    std::copy(v.begin(), v.end(), out.row(i).begin());
  }
  return out;
}

Latent Projector::encode_params(const FlatParams& params) const {
  if (!(params.spec == target_spec())) throw ShapeError(name() + ": network layout differs from the fitted one");
  return encode(norm_stats().normalize(params.theta));
}

FlatParams Projector::decode_params(const Latent& z) const {
  return FlatParams{target_spec(), norm_stats().denormalize(decode(z))};
}

}  // namespace lmv
