#pragma once

#include <memory>
#include <string>
#include <vector>

#include "lmv/core/json_io.hpp"
#include "lmv/core/matrix.hpp"
#include "lmv/core/mlp.hpp"
#include "lmv/oracles/loss_oracle.hpp"

namespace lmv {

/// Values (and optionally parameter gradients) of a problem's trained loss terms.
struct TermValues {
  std::vector<double> values;
  std::vector<std::vector<double>> grads;
};

/// A target problem whose training trajectory gets visualized. It exposes the
/// loss terms the harness optimizes and the oracles landscapes are drawn for.
class TargetProblem {
 public:
  virtual ~TargetProblem() = default;

  virtual std::string kind() const = 0;
  virtual Json to_json() const = 0;
  virtual MlpSpec net_spec() const = 0;

  /// Terms combined by the training objective. Term 0 is the primary term
  /// (the one loss-balancing schemes treat as the reference).
  virtual std::vector<std::string> term_names() const = 0;
  /// Problem-level coefficients of each term at a training epoch: fixed
  /// weights or time-dependent schedules.
  virtual std::vector<double> term_coefficients(std::size_t epoch) const = 0;
  virtual TermValues evaluate_terms(const FlatParams& net, bool with_grad) const = 0;

  virtual std::vector<std::string> oracle_names() const = 0;
  virtual double evaluate_oracle(const std::string& name, const FlatParams& net) const = 0;

  /// Seeded inputs from the problem's input domain, used as the CKA probe batch.
  virtual DenseMatrix probe_inputs(std::size_t count, std::uint64_t seed) const = 0;
};

/// Builds the named oracle set for a problem; the oracles keep the problem alive.
OracleSet register_oracles(std::shared_ptr<const TargetProblem> problem);

/// Constructs a problem from its JSON description ({"kind": ..., ...}).
std::shared_ptr<const TargetProblem> make_problem(const Json& config);

}  // namespace lmv
