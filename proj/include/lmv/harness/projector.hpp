#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "lmv/core/matrix.hpp"
#include "lmv/core/mlp.hpp"
#include "lmv/harness/trajectory.hpp"

namespace lmv {

using Latent = std::array<double, 2>;

/// Anything mapping normalized parameter vectors to the latent square and
/// back: the visualizer and both baselines.
class Projector {
 public:
  virtual ~Projector() = default;

  virtual std::string name() const = 0;
  virtual Latent encode(std::span<const double> normalized) const = 0;
  virtual std::vector<double> decode(const Latent& z) const = 0;

  /// Layout of the target network and the normalization the model was fit under.
  virtual const MlpSpec& target_spec() const = 0;
  virtual const NormStats& norm_stats() const = 0;

  /// Row-wise forms; the defaults loop over encode/decode.
  virtual DenseMatrix encode_rows(const DenseMatrix& normalized) const;
  virtual DenseMatrix decode_rows(const DenseMatrix& latents) const;

  Latent encode_params(const FlatParams& params) const;
  FlatParams decode_params(const Latent& z) const;
};

}  // namespace lmv
