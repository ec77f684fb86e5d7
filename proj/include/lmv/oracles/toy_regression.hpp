#pragma once

#include <cstdint>
#include <vector>

#include "lmv/oracles/problem.hpp"

namespace lmv {

/// 1-D regression of sin(x) on x in [-pi, pi]; a cheap trajectory source.
struct ToyConfig {
  std::uint64_t seed = 0;
  std::size_t n_train = 64;
  std::size_t n_test = 101;
  double noise = 0.0;
  std::vector<std::size_t> hidden{16};

  void validate() const;
};

void to_json(Json& j, const ToyConfig& c);
void from_json(const Json& j, ToyConfig& c);

class ToyRegression final : public TargetProblem {
 public:
  explicit ToyRegression(ToyConfig config);

  std::string kind() const override { return "toy"; }
  Json to_json() const override;
  MlpSpec net_spec() const override;
  std::vector<std::string> term_names() const override { return {"MSE"}; }
  std::vector<double> term_coefficients(std::size_t) const override { return {1.0}; }
  TermValues evaluate_terms(const FlatParams& net, bool with_grad) const override;
  std::vector<std::string> oracle_names() const override { return {"MSE", "Test-MSE"}; }
  double evaluate_oracle(const std::string& name, const FlatParams& net) const override;
  DenseMatrix probe_inputs(std::size_t count, std::uint64_t seed) const override;

  double train_loss(const FlatParams& net, std::vector<double>* grad = nullptr) const;
  double test_loss(const FlatParams& net) const;

  const ToyConfig& config() const { return config_; }
  const DenseMatrix& train_inputs() const { return train_x_; }
  const std::vector<double>& train_targets() const { return train_y_; }

 private:
  ToyConfig config_;
  DenseMatrix train_x_;
  std::vector<double> train_y_;
  DenseMatrix test_x_;
  std::vector<double> test_y_;
};

}  // namespace lmv
