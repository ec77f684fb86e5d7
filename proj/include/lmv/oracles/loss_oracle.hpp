#pragma once

#include <functional>
#include <string>
#include <vector>

#include "lmv/core/mlp.hpp"

namespace lmv {

/// A named, pure map from a network's parameters to one scalar loss term.
struct LossOracle {
  std::string name;
  std::function<double(const FlatParams&)> eval;
};

/// Ordered registry of oracles; names are unique.
class OracleSet {
 public:
  void add(LossOracle oracle);
  const LossOracle& get(const std::string& name) const;
  bool contains(const std::string& name) const;
  std::vector<std::string> names() const;
  std::size_t size() const { return oracles_.size(); }
  const std::vector<LossOracle>& all() const { return oracles_; }

  /// Values of every oracle, in registration order.
  std::vector<double> evaluate_all(const FlatParams& params) const;

 private:
  std::vector<LossOracle> oracles_;
};

}  // namespace lmv
