#pragma once

#include <string>

#include "lmv/core/nvtj.hpp"
#include "lmv/harness/projector.hpp"
#include "lmv/visualizer/config.hpp"

namespace lmv {

/// Encoder n -> hidden -> 2 (tanh output) and the mirrored decoder
/// 2 -> reversed hidden -> n (identity output).
struct AutoEncoder {
  FlatParams encoder;
  FlatParams decoder;

  static AutoEncoder create(std::size_t n, const std::vector<std::size_t>& hidden, std::uint64_t seed);
  std::size_t dimension() const { return encoder.spec.input_size(); }
};

MlpSpec encoder_spec(std::size_t n, const std::vector<std::size_t>& hidden);
MlpSpec decoder_spec(std::size_t n, const std::vector<std::size_t>& hidden);

class VisualizerModel final : public Projector {
 public:
  VisualizerModel(AutoEncoder nets, MlpSpec target_spec, NormStats stats, double d_max, VisualizerConfig config,
                  std::string trajectory_hash);

  std::string name() const override { return "visualizer"; }
  Latent encode(std::span<const double> normalized) const override;
  std::vector<double> decode(const Latent& z) const override;
  DenseMatrix encode_rows(const DenseMatrix& normalized) const override;
  DenseMatrix decode_rows(const DenseMatrix& latents) const override;
  const MlpSpec& target_spec() const override { return target_spec_; }
  const NormStats& norm_stats() const override { return stats_; }

  const AutoEncoder& nets() const { return nets_; }
  double d_max() const { return d_max_; }
  const VisualizerConfig& config() const { return config_; }
  const std::string& trajectory_hash() const { return trajectory_hash_; }

 private:
  AutoEncoder nets_;
  MlpSpec target_spec_;
  NormStats stats_;
  double d_max_;
  VisualizerConfig config_;
  std::string trajectory_hash_;
};

NvtjFile visualizer_to_nvtj(const VisualizerModel& model);
VisualizerModel visualizer_from_nvtj(const NvtjFile& file);
void save_visualizer(const std::string& path, const VisualizerModel& model);
VisualizerModel load_visualizer(const std::string& path);

/// Shared by the model blobs of every projector: norm stats as three blocks.
void append_norm_stats(NvtjFile& file, const NormStats& stats);
NormStats read_norm_stats(const NvtjFile& file, std::size_t first_block);

}  // namespace lmv
