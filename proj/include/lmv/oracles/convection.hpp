#pragma once

#include <cstdint>
#include <vector>

#include "lmv/oracles/problem.hpp"

namespace lmv {

/// u_t - beta * u_x = 0 on x in [0, 2pi], t in [0, 1] with u(x, 0) = sin x and
/// periodic boundaries; the exact solution is sin(x + beta t).
struct ConvectionConfig {
  double beta = 10.0;
  std::uint64_t seed = 0;
  std::size_t n_interior = 1000;
  std::size_t n_initial = 100;
  std::size_t n_boundary = 100;
  std::size_t test_resolution = 64;
  double c_r = 1.0;
  double c_ic = 1.0;
  double c_bc = 1.0;
  std::vector<std::size_t> hidden{32, 32};

  void validate() const;
};

void to_json(Json& j, const ConvectionConfig& c);
void from_json(const Json& j, ConvectionConfig& c);

class ConvectionProblem final : public TargetProblem {
 public:
  explicit ConvectionProblem(ConvectionConfig config);

  std::string kind() const override { return "convection"; }
  Json to_json() const override;
  MlpSpec net_spec() const override;
  std::vector<std::string> term_names() const override { return {"L_r", "L_ic", "L_bc"}; }
  std::vector<double> term_coefficients(std::size_t epoch) const override;
  TermValues evaluate_terms(const FlatParams& net, bool with_grad) const override;
  std::vector<std::string> oracle_names() const override;
  double evaluate_oracle(const std::string& name, const FlatParams& net) const override;
  DenseMatrix probe_inputs(std::size_t count, std::uint64_t seed) const override;

  // Each loss optionally adds its parameter gradient into `grad`.
  double residual_loss(const FlatParams& net, std::vector<double>* grad = nullptr) const;
  double initial_loss(const FlatParams& net, std::vector<double>* grad = nullptr) const;
  double boundary_loss(const FlatParams& net, std::vector<double>* grad = nullptr) const;
  double test_loss(const FlatParams& net) const;
  double total_loss(const FlatParams& net) const;

  static double exact_solution(double beta, double x, double t);

  const ConvectionConfig& config() const { return config_; }
  const DenseMatrix& interior_points() const { return interior_; }  // rows (x, t)
  const DenseMatrix& initial_points() const { return initial_; }    // rows (x, 0)
  const std::vector<double>& boundary_times() const { return boundary_t_; }
  const DenseMatrix& test_points() const { return test_; }          // rows (x, t)

 private:
  void check_net(const FlatParams& net) const;

  ConvectionConfig config_;
  DenseMatrix interior_;
  DenseMatrix initial_;
  std::vector<double> initial_target_;
  std::vector<double> boundary_t_;
  DenseMatrix boundary_left_;
  DenseMatrix boundary_right_;
  DenseMatrix test_;
  std::vector<double> test_target_;
};

}  // namespace lmv
