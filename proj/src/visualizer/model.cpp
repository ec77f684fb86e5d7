#include "lmv/visualizer/model.hpp"

#include <algorithm>
#include <cmath>

#include "lmv/core/errors.hpp"
#include "lmv/core/rng.hpp"

namespace lmv {

MlpSpec encoder_spec(std::size_t n, const std::vector<std::size_t>& hidden) {
  MlpSpec s;
  s.layer_sizes.push_back(n);
  s.layer_sizes.insert(s.layer_sizes.end(), hidden.begin(), hidden.end());
  s.layer_sizes.push_back(2);
  s.hidden = Activation::tanh;
  s.output = Activation::tanh;
  return s;
}

MlpSpec decoder_spec(std::size_t n, const std::vector<std::size_t>& hidden) {
  MlpSpec s;
  s.layer_sizes.push_back(2);
  s.layer_sizes.insert(s.layer_sizes.end(), hidden.rbegin(), hidden.rend());
  s.layer_sizes.push_back(n);
  s.hidden = Activation::tanh;
  s.output = Activation::identity;
  return s;
}

AutoEncoder AutoEncoder::create(std::size_t n, const std::vector<std::size_t>& hidden, std::uint64_t seed) {
  return {init_params(encoder_spec(n, hidden), seed, streams::kEncoderInit),
          init_params(decoder_spec(n, hidden), seed, streams::kDecoderInit)};
}

VisualizerModel::VisualizerModel(AutoEncoder nets, MlpSpec target_spec, NormStats stats, double d_max,
                                 VisualizerConfig config, std::string trajectory_hash)
    : nets_(std::move(nets)),
      target_spec_(std::move(target_spec)),
      stats_(std::move(stats)),
      d_max_(d_max),
      config_(std::move(config)),
      trajectory_hash_(std::move(trajectory_hash)) {
  const std::size_t n = target_spec_.param_count();
  if (nets_.encoder.spec.input_size() != n || nets_.encoder.spec.output_size() != 2 ||
      nets_.decoder.spec.input_size() != 2 || nets_.decoder.spec.output_size() != n || stats_.mean.size() != n)
    throw ShapeError("VisualizerModel: encoder, decoder and target layout disagree");
}

Latent VisualizerModel::encode(std::span<const double> normalized) const {
  const auto z = mlp_forward(nets_.encoder, normalized);
  return {z[0], z[1]};
}

std::vector<double> VisualizerModel::decode(const Latent& z) const {
  return mlp_forward(nets_.decoder, std::span<const double>(z.data(), 2));
}

DenseMatrix VisualizerModel::encode_rows(const DenseMatrix& normalized) const {
  return mlp_forward(nets_.encoder, normalized);
}

DenseMatrix VisualizerModel::decode_rows(const DenseMatrix& latents) const { return mlp_forward(nets_.decoder, latents); }

void append_norm_stats(NvtjFile& file, const NormStats& stats) {
  file.blocks.push_back(stats.mean);
  file.blocks.push_back(stats.std);
  std::vector<double> flags(stats.floored.size());
  for (std::size_t i = 0; i < flags.size(); ++i) flags[i] = stats.floored[i] ? 1.0 : 0.0;
  file.blocks.push_back(std::move(flags));
}

NormStats read_norm_stats(const NvtjFile& file, std::size_t first_block) {
  if (file.blocks.size() < first_block + 3) throw FormatError("model file lacks normalization blocks", 16);
  NormStats s;
  s.mean = file.blocks[first_block];
  s.std = file.blocks[first_block + 1];
  for (double f : file.blocks[first_block + 2]) s.floored.push_back(f != 0.0);
  if (s.std.size() != s.mean.size() || s.floored.size() != s.mean.size())
    throw FormatError("model file has inconsistent normalization blocks", 16);
  return s;
}

NvtjFile visualizer_to_nvtj(const VisualizerModel& model) {
  NvtjFile f;
  f.header = Json{{"kind", "visualizer"},
                  {"target_spec", model.target_spec()},
                  {"encoder_spec", model.nets().encoder.spec},
                  {"decoder_spec", model.nets().decoder.spec},
                  {"d_max", model.d_max()},
                  {"config", model.config()},
                  {"trajectory_hash", model.trajectory_hash()}};
  f.blocks.push_back(model.nets().encoder.theta);
  f.blocks.push_back(model.nets().decoder.theta);
  append_norm_stats(f, model.norm_stats());
  return f;
}

VisualizerModel visualizer_from_nvtj(const NvtjFile& f) {
  expect_nvtj_kind(f, "visualizer");
  if (f.blocks.size() != 5) throw FormatError("visualizer file: expected 5 blocks", 16);
  try {
    AutoEncoder nets{{f.header.at("encoder_spec").get<MlpSpec>(), f.blocks[0]},
                     {f.header.at("decoder_spec").get<MlpSpec>(), f.blocks[1]}};
    nets.encoder.validate();
    nets.decoder.validate();
    return VisualizerModel(std::move(nets), f.header.at("target_spec").get<MlpSpec>(), read_norm_stats(f, 2),
                           f.header.at("d_max").get<double>(), f.header.at("config").get<VisualizerConfig>(),
                           f.header.at("trajectory_hash").get<std::string>());
  } catch (const Json::exception& e) {
    throw FormatError(std::string("visualizer header: ") + e.what(), 16);
  } catch (const ShapeError& e) {
    throw FormatError(std::string("visualizer file: ") + e.what(), 16);
  } catch (const ValidationError& e) {
    throw FormatError(std::string("visualizer file: ") + e.what(), 16);
  }
}

void save_visualizer(const std::string& path, const VisualizerModel& model) { write_nvtj(path, visualizer_to_nvtj(model)); }

VisualizerModel load_visualizer(const std::string& path) { return visualizer_from_nvtj(read_nvtj(path)); }

}  // namespace lmv
