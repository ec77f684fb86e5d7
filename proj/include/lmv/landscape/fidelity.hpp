#pragma once

#include <string>
#include <vector>

#include "lmv/landscape/grid.hpp"

namespace lmv {

inline constexpr double kRelativeEps = 1e-12;

struct FidelityReport {
  std::string method;
  std::string oracle;
  double e_relative = 0.0;
  double e_proj = 0.0;  // normalized by d_max
  double d_max = 0.0;
  std::vector<double> loss_true;       // recorded L(m_i)
  std::vector<double> loss_projected;  // L(decode(encode(m_i)))
  std::vector<double> loss_error;      // |difference|
  std::vector<double> relative_error;  // |difference| / (|L(m_i)| + eps)
  std::vector<double> distance;        // ||decode(encode(m_i)) - m_i|| in normalized space
};

/// e_relative = mean_i |L(D(E(m_i))) - L(m_i)| / (|L(m_i)| + eps) and
/// e_proj = mean_i ||D(E(m_i)) - m_i|| / d_max, both in the projector's
/// normalized space.
FidelityReport fidelity(const Projector& model, const Trajectory& traj, const LossOracle& oracle);

enum class ErrorKind { loss_error, param_distance };

/// Loss landscape whose overlay carries per-checkpoint errors instead of losses.
LandscapeGrid error_grid(const Projector& model, const Trajectory& traj, const LossOracle& oracle, ErrorKind kind,
                         const GridSpec& spec);

Json fidelity_to_json(const FidelityReport& r);

}  // namespace lmv
