#include "lmv/harness/balancing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lmv/core/errors.hpp"
#include "lmv/core/matrix.hpp"

namespace lmv {

namespace {

constexpr double kFloor = 1e-12;

}  // namespace

std::string to_string(SchemeKind k) {
  switch (k) {
    case SchemeKind::EW: return "EW";
    case SchemeKind::CW: return "CW";
    case SchemeKind::DWA: return "DWA";
    case SchemeKind::RLW: return "RLW";
    case SchemeKind::LR_annealing: return "LR_annealing";
    case SchemeKind::GradNorm: return "GradNorm";
  }
  return "?";
}

SchemeKind scheme_from_string(const std::string& s) {
  for (SchemeKind k : all_schemes())
    if (to_string(k) == s) return k;
  if (s == "LR-annealing") return SchemeKind::LR_annealing;
  throw ConfigError("unknown balancing scheme '" + s + "'");
}

const std::vector<SchemeKind>& all_schemes() {
  static const std::vector<SchemeKind> kinds{SchemeKind::EW,  SchemeKind::CW,           SchemeKind::DWA,
                                             SchemeKind::RLW, SchemeKind::LR_annealing, SchemeKind::GradNorm};
  return kinds;
}

void BalancingScheme::validate() const {
  for (const auto& [name, w] : cw_weights)
    if (!(w >= 0.0) || !std::isfinite(w)) throw ConfigError("CW weight for '" + name + "' must be finite and >= 0");
  if (!(dwa_temperature > 0.0)) throw ConfigError("DWA temperature must be > 0");
  if (!(lra_alpha >= 0.0 && lra_alpha <= 1.0)) throw ConfigError("LR-annealing alpha must lie in [0, 1]");
  if (!(gradnorm_alpha >= 0.0)) throw ConfigError("GradNorm alpha must be >= 0");
  if (!(gradnorm_lr > 0.0)) throw ConfigError("GradNorm weight lr must be > 0");
}

void to_json(Json& j, const BalancingScheme& s) {
  j = Json{{"kind", to_string(s.kind)},
           {"cw_weights", s.cw_weights},
           {"dwa_temperature", s.dwa_temperature},
           {"lra_alpha", s.lra_alpha},
           {"gradnorm_alpha", s.gradnorm_alpha},
           {"gradnorm_lr", s.gradnorm_lr}};
}

void from_json(const Json& j, BalancingScheme& s) {
  if (j.is_string()) {
    s.kind = scheme_from_string(j.get<std::string>());
    return;
  }
  if (j.contains("kind")) s.kind = scheme_from_string(j.at("kind").get<std::string>());
  read_optional(j, "cw_weights", s.cw_weights);
  read_optional(j, "dwa_temperature", s.dwa_temperature);
  read_optional(j, "lra_alpha", s.lra_alpha);
  read_optional(j, "gradnorm_alpha", s.gradnorm_alpha);
  read_optional(j, "gradnorm_lr", s.gradnorm_lr);
}

std::vector<double> scaled_softmax(const std::vector<double>& v, double temperature) {
  const double hi = *std::max_element(v.begin(), v.end());
  std::vector<double> e(v.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    e[i] = std::exp((v[i] - hi) / temperature);
    sum += e[i];
  }
  const double k = static_cast<double>(v.size());
  for (double& x : e) x = k * x / sum;
  return e;
}

Balancer::Balancer(BalancingScheme scheme, std::vector<std::string> term_names, std::uint64_t seed)
    : scheme_(std::move(scheme)), names_(std::move(term_names)), rng_(seed, streams::kRlw) {
  scheme_.validate();
  if (names_.empty()) throw ValidationError("Balancer: no loss terms");
  running_.assign(names_.size(), 1.0);
}

bool Balancer::needs_gradients() const {
  return names_.size() > 1 && (scheme_.kind == SchemeKind::LR_annealing || scheme_.kind == SchemeKind::GradNorm);
}

std::vector<double> Balancer::weights(std::size_t, const TermStats& stats) {
  const std::size_t k = names_.size();
  if (stats.losses.size() != k) throw ShapeError("Balancer: term count mismatch");
  if (k == 1) return {1.0};
  std::vector<double> w;
  switch (scheme_.kind) {
    case SchemeKind::EW:
      w.assign(k, 1.0);
      break;
    case SchemeKind::CW:
      for (const auto& n : names_) {
        const auto it = scheme_.cw_weights.find(n);
        w.push_back(it == scheme_.cw_weights.end() ? 1.0 : it->second);
      }
      break;
    case SchemeKind::DWA: w = dwa(stats); break;
    case SchemeKind::RLW: w = rlw(); break;
    case SchemeKind::LR_annealing: w = lr_annealing(stats); break;
    case SchemeKind::GradNorm: w = gradnorm(stats); break;
  }
  loss_history_.push_back(stats.losses);
  for (double x : w)
    if (!std::isfinite(x) || x < 0.0) throw NumericalError("Balancer: " + to_string(scheme_.kind) + " produced an invalid weight");
  return w;
}

std::vector<double> Balancer::dwa(const TermStats&) {
  const std::size_t k = names_.size();
  if (loss_history_.size() < 2) return std::vector<double>(k, 1.0);
  const auto& prev = loss_history_[loss_history_.size() - 1];
  const auto& prev2 = loss_history_[loss_history_.size() - 2];
  std::vector<double> r(k);
  for (std::size_t i = 0; i < k; ++i) r[i] = prev[i] / std::max(prev2[i], kFloor);
  return scaled_softmax(r, scheme_.dwa_temperature);
}

std::vector<double> Balancer::rlw() {
  std::vector<double> z(names_.size());
  for (double& x : z) x = rng_.normal();
  return scaled_softmax(z, 1.0);
}

std::vector<double> Balancer::lr_annealing(const TermStats& stats) {
  const std::size_t k = names_.size();
  if (stats.grads.size() != k) throw UsageError("LR-annealing needs per-term gradients");
  double max_primary = 0.0;
  for (double g : stats.grads[0]) max_primary = std::max(max_primary, std::abs(g));
  for (std::size_t i = 1; i < k; ++i) {
    double mean_abs = 0.0;
    for (double g : stats.grads[i]) mean_abs += std::abs(g);
    mean_abs /= static_cast<double>(std::max<std::size_t>(stats.grads[i].size(), 1));
    const double fresh = max_primary / std::max(mean_abs, kFloor);
    running_[i] = (1.0 - scheme_.lra_alpha) * running_[i] + scheme_.lra_alpha * fresh;
  }
  running_[0] = 1.0;
  return running_;
}

std::vector<double> Balancer::gradnorm(const TermStats& stats) {
  const std::size_t k = names_.size();
  if (stats.grads.size() != k) throw UsageError("GradNorm needs per-term gradients");
  if (initial_losses_.empty()) initial_losses_ = stats.losses;
  const std::vector<double> current = running_;

  std::vector<double> norms(k);
  std::vector<double> g(k);
  std::vector<double> ratio(k);
  for (std::size_t i = 0; i < k; ++i) {
    norms[i] = norm2(stats.grads[i]);
    g[i] = current[i] * norms[i];
    ratio[i] = stats.losses[i] / std::max(initial_losses_[i], kFloor);
  }
  const double g_mean = std::accumulate(g.begin(), g.end(), 0.0) / static_cast<double>(k);
  const double r_mean = std::max(std::accumulate(ratio.begin(), ratio.end(), 0.0) / static_cast<double>(k), kFloor);
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double target = g_mean * std::pow(ratio[i] / r_mean, scheme_.gradnorm_alpha);
    const double diff = g[i] - target;
    const double sign = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
    running_[i] = std::max(0.0, running_[i] - scheme_.gradnorm_lr * sign * norms[i]);
    sum += running_[i];
  }
  if (sum > 0.0) {
    for (double& w : running_) w *= static_cast<double>(k) / sum;
  } else {
    running_.assign(k, 1.0);
  }
  return current;
}

}  // namespace lmv
