#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lmv/core/json_io.hpp"
#include "lmv/core/rng.hpp"

namespace lmv {

enum class SchemeKind { EW, CW, DWA, RLW, LR_annealing, GradNorm };

std::string to_string(SchemeKind k);
SchemeKind scheme_from_string(const std::string& s);
const std::vector<SchemeKind>& all_schemes();

struct BalancingScheme {
  SchemeKind kind = SchemeKind::EW;
  std::map<std::string, double> cw_weights;  // by term name; missing terms get 1
  double dwa_temperature = 2.0;
  double lra_alpha = 0.9;  // weight of the fresh estimate in the moving average
  double gradnorm_alpha = 1.5;
  double gradnorm_lr = 0.025;

  void validate() const;
};

void to_json(Json& j, const BalancingScheme& s);
void from_json(const Json& j, BalancingScheme& s);

/// Per-epoch inputs a scheme may look at.
struct TermStats {
  std::vector<double> losses;
  std::vector<std::vector<double>> grads;  // may be empty for schemes that ignore gradients
};

/// Stateful weight producer. With a single term every scheme returns 1.
class Balancer {
 public:
  Balancer(BalancingScheme scheme, std::vector<std::string> term_names, std::uint64_t seed);

  bool needs_gradients() const;
  /// Weights to apply at `epoch`; updates internal history afterwards.
  std::vector<double> weights(std::size_t epoch, const TermStats& stats);

  const BalancingScheme& scheme() const { return scheme_; }
  std::size_t term_count() const { return names_.size(); }

 private:
  std::vector<double> dwa(const TermStats& stats);
  std::vector<double> rlw();
  std::vector<double> lr_annealing(const TermStats& stats);
  std::vector<double> gradnorm(const TermStats& stats);

  BalancingScheme scheme_;
  std::vector<std::string> names_;
  CounterRng rng_;
  std::vector<std::vector<double>> loss_history_;
  std::vector<double> running_;      // LR-annealing and GradNorm weights
  std::vector<double> initial_losses_;
};

/// K * softmax(v / temperature).
std::vector<double> scaled_softmax(const std::vector<double>& v, double temperature);

}  // namespace lmv
