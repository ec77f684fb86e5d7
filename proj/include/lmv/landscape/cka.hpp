#pragma once

#include <vector>

#include "lmv/landscape/grid.hpp"

namespace lmv {

struct CkaResult {
  double value = 0.0;
  bool degenerate = false;  // a zero-variance feature matrix; value is 0
};

/// Linear CKA of two feature matrices over the same probe rows.
CkaResult cka(const DenseMatrix& features_a, const DenseMatrix& features_b);

/// Centered Gram matrix of a feature matrix, packed upper-triangular with the
/// off-diagonal entries scaled by sqrt(2) so that a plain dot product of two
/// packed vectors equals the Frobenius inner product of the Grams.
std::vector<double> packed_centered_gram(const DenseMatrix& features);
CkaResult cka_from_packed(const std::vector<double>& a, const std::vector<double>& b);

inline constexpr std::size_t kDefaultDensityCap = 41;

struct DensityOptions {
  std::size_t max_resolution = kDefaultDensityCap;
};

/// rho(m) = sum over the other mesh points m' of CKA(m', m), with features
/// the concatenated hidden activations of each decoded network on the probes.
LandscapeGrid density_grid(const Projector& model, const GridSpec& spec, const DenseMatrix& probes,
                           const Trajectory* overlay_traj = nullptr, DensityOptions options = {});

/// Hidden features of the networks decoded at the given latents.
std::vector<DenseMatrix> decoded_features(const Projector& model, const DenseMatrix& latents, const DenseMatrix& probes);

}  // namespace lmv
