#include "lmv/core/mlp.hpp"

#include <cmath>

#include "lmv/core/errors.hpp"
#include "lmv/core/rng.hpp"

namespace lmv {

namespace {

void apply_activation(Activation act, DenseMatrix& z) {
  if (act == Activation::tanh)
    for (double& v : z.values()) v = std::tanh(v);
}

// sigma'(z) expressed through a = sigma(z).
inline double slope(Activation act, double a) { return act == Activation::tanh ? 1.0 - a * a : 1.0; }
// sigma''(z) expressed through a = sigma(z).
inline double curvature(Activation act, double a) {
  return act == Activation::tanh ? -2.0 * a * (1.0 - a * a) : 0.0;
}

void add_bias(DenseMatrix& z, std::span<const double> b) {
  for (std::size_t r = 0; r < z.rows(); ++r) {
    auto row = z.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) row[c] += b[c];
  }
}

void check_input(const FlatParams& params, const DenseMatrix& inputs) {
  if (inputs.cols() != params.spec.input_size()) {
    throw ShapeError("mlp: input has " + std::to_string(inputs.cols()) + " features, network expects " +
                     std::to_string(params.spec.input_size()));
  }
}

}  // namespace

std::string to_string(Activation a) { return a == Activation::tanh ? "tanh" : "identity"; }

Activation activation_from_string(const std::string& s) {
  if (s == "tanh") return Activation::tanh;
  if (s == "identity") return Activation::identity;
  throw ValidationError("unknown activation '" + s + "'");
}

void MlpSpec::validate() const {
  if (layer_sizes.size() < 2) throw ValidationError("MlpSpec: need at least 2 layers");
  for (std::size_t s : layer_sizes)
    if (s < 1) throw ValidationError("MlpSpec: layer sizes must be >= 1");
}

std::size_t MlpSpec::weight_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < num_layers(); ++l) n += fan_in(l) * fan_out(l);
  return n;
}

std::size_t MlpSpec::param_count() const {
  std::size_t n = weight_count();
  for (std::size_t l = 0; l < num_layers(); ++l) n += fan_out(l);
  return n;
}

std::size_t MlpSpec::weight_offset(std::size_t layer) const {
  std::size_t off = 0;
  for (std::size_t l = 0; l < layer; ++l) off += fan_in(l) * fan_out(l);
  return off;
}

std::size_t MlpSpec::bias_offset(std::size_t layer) const {
  std::size_t off = weight_count();
  for (std::size_t l = 0; l < layer; ++l) off += fan_out(l);
  return off;
}

std::size_t MlpSpec::hidden_unit_count() const {
  std::size_t n = 0;
  for (std::size_t l = 1; l + 1 < layer_sizes.size(); ++l) n += layer_sizes[l];
  return n;
}

FlatParams FlatParams::zeros(const MlpSpec& spec) {
  spec.validate();
  return {spec, std::vector<double>(spec.param_count(), 0.0)};
}

void FlatParams::validate() const {
  spec.validate();
  if (theta.size() != spec.param_count()) {
    throw ShapeError("FlatParams: theta has " + std::to_string(theta.size()) + " entries, spec implies " +
                     std::to_string(spec.param_count()));
  }
}

MatrixView FlatParams::weights(std::size_t layer) const {
  return {theta.data() + spec.weight_offset(layer), spec.fan_out(layer), spec.fan_in(layer)};
}

std::span<const double> FlatParams::bias(std::size_t layer) const {
  return {theta.data() + spec.bias_offset(layer), spec.fan_out(layer)};
}

FlatParams init_params(const MlpSpec& spec, std::uint64_t seed, std::uint64_t stream) {
  FlatParams p = FlatParams::zeros(spec);
  CounterRng rng(seed, stream);
  for (std::size_t l = 0; l < spec.num_layers(); ++l) {
    const double limit = std::sqrt(6.0 / static_cast<double>(spec.fan_in(l) + spec.fan_out(l)));
    const std::size_t off = spec.weight_offset(l);
    for (std::size_t i = 0; i < spec.fan_in(l) * spec.fan_out(l); ++i) p.theta[off + i] = rng.uniform(-limit, limit);
  }
  return p;
}

bool ForwardCache::valid_for(const MlpSpec& spec) const {
  if (activations.size() != spec.layer_sizes.size()) return false;
  for (std::size_t l = 0; l < activations.size(); ++l)
    if (activations[l].cols() != spec.layer_sizes[l]) return false;
  return true;
}

DenseMatrix mlp_forward(const FlatParams& params, const DenseMatrix& inputs, ForwardCache* cache) {
  check_input(params, inputs);
  const MlpSpec& spec = params.spec;
  if (cache) {
    cache->activations.clear();
    cache->activations.reserve(spec.layer_sizes.size());
    cache->activations.push_back(inputs);
  }
  DenseMatrix a = inputs;
  for (std::size_t l = 0; l < spec.num_layers(); ++l) {
    DenseMatrix z = matmul_nt(a, params.weights(l));
    add_bias(z, params.bias(l));
    apply_activation(spec.activation(l), z);
    a = std::move(z);
    if (cache) cache->activations.push_back(a);
  }
  return a;
}

std::vector<double> mlp_forward(const FlatParams& params, std::span<const double> x) {
  DenseMatrix in(1, x.size(), std::vector<double>(x.begin(), x.end()));
  return mlp_forward(params, in).values();
}

void mlp_backward(const FlatParams& params, const ForwardCache& cache, const DenseMatrix& upstream,
                  std::span<double> param_grad, DenseMatrix* input_grad) {
  const MlpSpec& spec = params.spec;
  if (!cache.valid_for(spec)) throw UsageError("mlp_backward: forward cache missing or built for another network");
  if (param_grad.size() != spec.param_count()) throw ShapeError("mlp_backward: gradient buffer has wrong length");
  const std::size_t batch = cache.activations.front().rows();
  if (upstream.rows() != batch || upstream.cols() != spec.output_size())
    throw ShapeError("mlp_backward: upstream gradient shape does not match forward batch");

  DenseMatrix delta = upstream;  // dLoss/dA_l, converted in place to dLoss/dZ_l
  for (std::size_t l = spec.num_layers(); l-- > 0;) {
    const DenseMatrix& out = cache.activations[l + 1];
    const Activation act = spec.activation(l);
    if (act != Activation::identity) {
      auto& dv = delta.values();
      const auto& av = out.values();
      for (std::size_t i = 0; i < dv.size(); ++i) dv[i] *= slope(act, av[i]);
    }
    accumulate_tn(delta, cache.activations[l],
                  param_grad.subspan(spec.weight_offset(l), spec.fan_in(l) * spec.fan_out(l)));
    auto gb = param_grad.subspan(spec.bias_offset(l), spec.fan_out(l));
    for (std::size_t r = 0; r < batch; ++r) {
      auto row = delta.row(r);
      for (std::size_t c = 0; c < row.size(); ++c) gb[c] += row[c];
    }
    if (l > 0 || input_grad) delta = matmul(delta, params.weights(l));
  }
  if (input_grad) *input_grad = std::move(delta);
}

std::vector<double> mlp_backward(const FlatParams& params, const ForwardCache& cache, const DenseMatrix& upstream) {
  std::vector<double> g(params.spec.param_count(), 0.0);
  mlp_backward(params, cache, upstream, g);
  return g;
}

DenseMatrix mlp_input_derivatives(const FlatParams& params, std::span<const double> x) {
  const MlpSpec& spec = params.spec;
  if (x.size() != spec.input_size()) throw ShapeError("mlp_input_derivatives: input length mismatch");
  DenseMatrix a(1, x.size(), std::vector<double>(x.begin(), x.end()));
  // Row j of `tan` carries d(activation)/dx_j.
  DenseMatrix tan = DenseMatrix::identity(spec.input_size());
  for (std::size_t l = 0; l < spec.num_layers(); ++l) {
    DenseMatrix z = matmul_nt(a, params.weights(l));
    add_bias(z, params.bias(l));
    apply_activation(spec.activation(l), z);
    DenseMatrix t = matmul_nt(tan, params.weights(l));
    const Activation act = spec.activation(l);
    for (std::size_t j = 0; j < t.rows(); ++j)
      for (std::size_t k = 0; k < t.cols(); ++k) t(j, k) *= slope(act, z(0, k));
    a = std::move(z);
    tan = std::move(t);
  }
  return tan.transposed();
}

TangentForward mlp_forward_tangent(const FlatParams& params, const DenseMatrix& inputs, std::span<const double> direction) {
  check_input(params, inputs);
  const MlpSpec& spec = params.spec;
  if (direction.size() != spec.input_size()) throw ShapeError("mlp_forward_tangent: direction length mismatch");
  TangentForward out;
  DenseMatrix tan(inputs.rows(), inputs.cols());
  for (std::size_t r = 0; r < tan.rows(); ++r)
    for (std::size_t c = 0; c < tan.cols(); ++c) tan(r, c) = direction[c];
  out.cache.activations.push_back(inputs);
  out.cache.tangents.push_back(tan);
  DenseMatrix a = inputs;
  for (std::size_t l = 0; l < spec.num_layers(); ++l) {
    DenseMatrix z = matmul_nt(a, params.weights(l));
    add_bias(z, params.bias(l));
    apply_activation(spec.activation(l), z);
    DenseMatrix t = matmul_nt(tan, params.weights(l));
    out.cache.pre_tangents.push_back(t);
    const Activation act = spec.activation(l);
    if (act != Activation::identity) {
      auto& tv = t.values();
      const auto& zv = z.values();
      for (std::size_t i = 0; i < tv.size(); ++i) tv[i] *= slope(act, zv[i]);
    }
    out.cache.activations.push_back(z);
    out.cache.tangents.push_back(t);
    a = std::move(z);
    tan = std::move(t);
  }
  out.outputs = std::move(a);
  out.tangents = std::move(tan);
  return out;
}

void mlp_backward_tangent(const FlatParams& params, const TangentCache& cache, const DenseMatrix& grad_out,
                          const DenseMatrix& grad_tangent, std::span<double> param_grad) {
  const MlpSpec& spec = params.spec;
  if (cache.activations.size() != spec.layer_sizes.size() || cache.tangents.size() != spec.layer_sizes.size() ||
      cache.pre_tangents.size() != spec.num_layers())
    throw UsageError("mlp_backward_tangent: tangent cache missing or built for another network");
  if (param_grad.size() != spec.param_count()) throw ShapeError("mlp_backward_tangent: gradient buffer has wrong length");
  const std::size_t batch = cache.activations.front().rows();
  if (grad_out.rows() != batch || grad_tangent.rows() != batch || grad_out.cols() != spec.output_size() ||
      grad_tangent.cols() != spec.output_size())
    throw ShapeError("mlp_backward_tangent: upstream shapes do not match forward batch");

  DenseMatrix ga = grad_out;      // dLoss/dA_l
  DenseMatrix gt = grad_tangent;  // dLoss/d(tangent of A_l)
  for (std::size_t l = spec.num_layers(); l-- > 0;) {
    const Activation act = spec.activation(l);
    const DenseMatrix& a = cache.activations[l + 1];
    const DenseMatrix& tz = cache.pre_tangents[l];
    if (act != Activation::identity) {
      // tangent_a = s(z) * tangent_z, so dL/dz = ga*s + gt*tangent_z*s'(z)
      // and dL/dtangent_z = gt*s.
      auto& gav = ga.values();
      auto& gtv = gt.values();
      const auto& av = a.values();
      const auto& tzv = tz.values();
      for (std::size_t i = 0; i < gav.size(); ++i) {
        const double s = slope(act, av[i]);
        gav[i] = gav[i] * s + gtv[i] * tzv[i] * curvature(act, av[i]);
        gtv[i] *= s;
      }
    }
    auto gw = param_grad.subspan(spec.weight_offset(l), spec.fan_in(l) * spec.fan_out(l));
    accumulate_tn(ga, cache.activations[l], gw);
    accumulate_tn(gt, cache.tangents[l], gw);
    auto gb = param_grad.subspan(spec.bias_offset(l), spec.fan_out(l));
    for (std::size_t r = 0; r < batch; ++r) {
      auto row = ga.row(r);
      for (std::size_t c = 0; c < row.size(); ++c) gb[c] += row[c];
    }
    if (l > 0) {
      ga = matmul(ga, params.weights(l));
      gt = matmul(gt, params.weights(l));
    }
  }
}

DenseMatrix mlp_hidden_features(const FlatParams& params, const DenseMatrix& inputs) {
  ForwardCache cache;
  mlp_forward(params, inputs, &cache);
  const MlpSpec& spec = params.spec;
  DenseMatrix feats(inputs.rows(), spec.hidden_unit_count());
  std::size_t off = 0;
  for (std::size_t l = 1; l + 1 < cache.activations.size(); ++l) {
    const DenseMatrix& a = cache.activations[l];
    for (std::size_t r = 0; r < a.rows(); ++r)
      for (std::size_t c = 0; c < a.cols(); ++c) feats(r, off + c) = a(r, c);
    off += a.cols();
  }
  return feats;
}

}  // namespace lmv
