#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lmv/core/matrix.hpp"

namespace lmv {

enum class Activation { identity, tanh };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& s);

/// Layer sizes from input to output plus activations. Layer l maps
/// layer_sizes[l] -> layer_sizes[l + 1].
struct MlpSpec {
  std::vector<std::size_t> layer_sizes;
  Activation hidden = Activation::tanh;
  Activation output = Activation::identity;

  void validate() const;

  std::size_t num_layers() const { return layer_sizes.size() - 1; }
  std::size_t input_size() const { return layer_sizes.front(); }
  std::size_t output_size() const { return layer_sizes.back(); }
  std::size_t fan_in(std::size_t layer) const { return layer_sizes[layer]; }
  std::size_t fan_out(std::size_t layer) const { return layer_sizes[layer + 1]; }
  Activation activation(std::size_t layer) const { return layer + 1 == num_layers() ? output : hidden; }

  std::size_t weight_count() const;
  std::size_t param_count() const;
  // theta layout: W_0, W_1, ..., W_{L-1}, b_0, ..., b_{L-1}; each W_l is
  // fan_out x fan_in, row-major.
  std::size_t weight_offset(std::size_t layer) const;
  std::size_t bias_offset(std::size_t layer) const;
  std::size_t hidden_unit_count() const;

  friend bool operator==(const MlpSpec&, const MlpSpec&) = default;
};

/// A network as a point in parameter space.
struct FlatParams {
  MlpSpec spec;
  std::vector<double> theta;

  static FlatParams zeros(const MlpSpec& spec);
  void validate() const;

  MatrixView weights(std::size_t layer) const;
  std::span<const double> bias(std::size_t layer) const;

  friend bool operator==(const FlatParams&, const FlatParams&) = default;
};

/// Glorot-uniform weights, zero biases, drawn from CounterRng(seed, stream).
FlatParams init_params(const MlpSpec& spec, std::uint64_t seed, std::uint64_t stream);

/// Post-activation values of every layer for one batch; activations[0] is the input.
struct ForwardCache {
  std::vector<DenseMatrix> activations;
  bool valid_for(const MlpSpec& spec) const;
};

/// Batched forward pass; rows of `inputs` are samples.
DenseMatrix mlp_forward(const FlatParams& params, const DenseMatrix& inputs, ForwardCache* cache = nullptr);
std::vector<double> mlp_forward(const FlatParams& params, std::span<const double> x);

/// Reverse pass. `upstream` holds dLoss/dOutput per sample. Gradients are
/// added into `param_grad` (length param_count). When `input_grad` is non-null
/// it receives dLoss/dInput per sample.
void mlp_backward(const FlatParams& params, const ForwardCache& cache, const DenseMatrix& upstream,
                  std::span<double> param_grad, DenseMatrix* input_grad = nullptr);

/// Convenience form returning a fresh gradient vector.
std::vector<double> mlp_backward(const FlatParams& params, const ForwardCache& cache, const DenseMatrix& upstream);

/// Jacobian d out_k / d x_j (output_size x input_size) by forward-mode tangent
/// propagation.
DenseMatrix mlp_input_derivatives(const FlatParams& params, std::span<const double> x);

/// Forward pass carrying one directional tangent per sample: alongside u(x)
/// it propagates du/dx . direction.
struct TangentCache {
  std::vector<DenseMatrix> activations;
  std::vector<DenseMatrix> tangents;      // post-activation, index 0 = input direction
  std::vector<DenseMatrix> pre_tangents;  // pre-activation, one per layer
};

struct TangentForward {
  DenseMatrix outputs;
  DenseMatrix tangents;
  TangentCache cache;
};

TangentForward mlp_forward_tangent(const FlatParams& params, const DenseMatrix& inputs, std::span<const double> direction);

/// Reverse pass through mlp_forward_tangent for a loss depending on both the
/// outputs (grad_out) and the directional derivatives (grad_tangent).
void mlp_backward_tangent(const FlatParams& params, const TangentCache& cache, const DenseMatrix& grad_out,
                          const DenseMatrix& grad_tangent, std::span<double> param_grad);

/// Concatenated hidden-layer activations per sample (batch x hidden_unit_count).
DenseMatrix mlp_hidden_features(const FlatParams& params, const DenseMatrix& inputs);

}  // namespace lmv
