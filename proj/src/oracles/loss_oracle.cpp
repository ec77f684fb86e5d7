#include "lmv/oracles/loss_oracle.hpp"

#include <algorithm>

#include "lmv/core/errors.hpp"
#include "lmv/oracles/problem.hpp"
#include "lmv/oracles/convection.hpp"
#include "lmv/oracles/eigen_problem.hpp"
#include "lmv/oracles/toy_regression.hpp"

namespace lmv {

void OracleSet::add(LossOracle oracle) {
  if (contains(oracle.name)) throw ValidationError("OracleSet: duplicate oracle name '" + oracle.name + "'");
  oracles_.push_back(std::move(oracle));
}

const LossOracle& OracleSet::get(const std::string& name) const {
  auto it = std::find_if(oracles_.begin(), oracles_.end(), [&](const LossOracle& o) { return o.name == name; });
  if (it == oracles_.end()) throw NotFoundError("no oracle named '" + name + "'");
  return *it;
}

bool OracleSet::contains(const std::string& name) const {
  return std::any_of(oracles_.begin(), oracles_.end(), [&](const LossOracle& o) { return o.name == name; });
}

std::vector<std::string> OracleSet::names() const {
  std::vector<std::string> out;
  for (const auto& o : oracles_) out.push_back(o.name);
  return out;
}

std::vector<double> OracleSet::evaluate_all(const FlatParams& params) const {
  std::vector<double> out;
  out.reserve(oracles_.size());
  for (const auto& o : oracles_) out.push_back(o.eval(params));
  return out;
}

OracleSet register_oracles(std::shared_ptr<const TargetProblem> problem) {
  OracleSet set;
  for (const std::string& name : problem->oracle_names()) {
    set.add({name, [problem, name](const FlatParams& net) { return problem->evaluate_oracle(name, net); }});
  }
  return set;
}

std::shared_ptr<const TargetProblem> make_problem(const Json& config) {
  const std::string kind = config.value("kind", std::string());
  if (kind == "convection") return std::make_shared<ConvectionProblem>(config.get<ConvectionConfig>());
  if (kind == "eigen") return std::make_shared<EigenProblem>(config.get<EigenConfig>());
  if (kind == "toy") return std::make_shared<ToyRegression>(config.get<ToyConfig>());
  throw ConfigError("unknown problem kind '" + kind + "'");
}

}  // namespace lmv
