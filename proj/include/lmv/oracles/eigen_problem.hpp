#pragma once

#include <cstdint>
#include <vector>

#include "lmv/oracles/problem.hpp"

namespace lmv {

/// Desk-scale eigenpair problem: a network maps a flattened symmetric k x k
/// matrix to (y_hat, lambda_hat), an estimate of its smallest eigenpair.
struct EigenConfig {
  std::size_t k = 4;
  std::uint64_t seed = 0;
  std::size_t n_matrices = 128;
  std::size_t n_labeled = 16;  // the first n_labeled matrices carry labels
  double c_C = 1.0;
  double c_S = 1.0;
  double tau = 0.0;  // 0 selects 0.2 * total_epochs
  std::size_t total_epochs = 2000;
  bool physics_guided = true;
  std::vector<std::size_t> hidden{32, 32};

  void validate() const;
  double effective_tau() const;
  double lambda_C(double epoch) const;
  double lambda_S(double epoch) const;
};

void to_json(Json& j, const EigenConfig& c);
void from_json(const Json& j, EigenConfig& c);

/// Per-matrix decomposition of a network's output.
struct EigenPrediction {
  std::vector<double> y_hat;
  double lambda_hat = 0.0;
};

class EigenProblem final : public TargetProblem {
 public:
  explicit EigenProblem(EigenConfig config);

  std::string kind() const override { return "eigen"; }
  Json to_json() const override;
  MlpSpec net_spec() const override;
  std::vector<std::string> term_names() const override { return {"Train-MSE", "C-Loss", "S-Loss"}; }
  std::vector<double> term_coefficients(std::size_t epoch) const override;
  TermValues evaluate_terms(const FlatParams& net, bool with_grad) const override;
  std::vector<std::string> oracle_names() const override;
  double evaluate_oracle(const std::string& name, const FlatParams& net) const override;
  DenseMatrix probe_inputs(std::size_t count, std::uint64_t seed) const override;

  double train_mse(const FlatParams& net, std::vector<double>* grad = nullptr) const;
  double test_mse(const FlatParams& net) const;
  double c_loss(const FlatParams& net, std::vector<double>* grad = nullptr) const;
  double s_loss(const FlatParams& net, std::vector<double>* grad = nullptr) const;
  /// E(t) = Train-MSE + lambda_C(t) C-Loss + lambda_S(t) S-Loss.
  double objective(const FlatParams& net, double epoch) const;

  const EigenConfig& config() const { return config_; }
  std::size_t matrix_count() const { return matrices_.size(); }
  const DenseMatrix& matrix(std::size_t i) const { return matrices_[i]; }
  const std::vector<double>& true_vector(std::size_t i) const { return vectors_[i]; }
  double true_value(std::size_t i) const { return values_[i]; }
  const DenseMatrix& inputs() const { return inputs_; }

  /// Splits raw network outputs (rows) into per-matrix predictions.
  std::vector<EigenPrediction> predict(const FlatParams& net) const;

  /// Sign-aligned normalized-vector error (1/k)||s y/||y|| - y_true||^2 and its
  /// derivative with respect to y_hat.
  static double aligned_mse(std::span<const double> y_hat, std::span<const double> y_true,
                            std::vector<double>* d_y_hat = nullptr);
  /// ||A y - l y||^2 / ||y||^2 and its derivatives.
  static double eigen_residual(const DenseMatrix& a, std::span<const double> y_hat, double lambda_hat,
                               std::vector<double>* d_y_hat = nullptr, double* d_lambda = nullptr);

 private:
  double mse_over(const FlatParams& net, std::size_t begin, std::size_t end, std::vector<double>* grad) const;

  EigenConfig config_;
  std::vector<DenseMatrix> matrices_;
  std::vector<std::vector<double>> vectors_;
  std::vector<double> values_;
  DenseMatrix inputs_;
};

}  // namespace lmv
