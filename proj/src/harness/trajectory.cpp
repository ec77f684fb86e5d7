#include "lmv/harness/trajectory.hpp"

#include <algorithm>
#include <cmath>

#include "lmv/core/errors.hpp"
#include "lmv/core/hash.hpp"

namespace lmv {

FlatParams Trajectory::checkpoint(std::size_t i) const {
  if (i >= checkpoints.size()) throw NotFoundError("trajectory: checkpoint index out of range");
  return FlatParams{spec, checkpoints[i]};
}

bool Trajectory::has_loss(const std::string& name) const {
  return std::find(loss_names.begin(), loss_names.end(), name) != loss_names.end();
}

std::vector<double> Trajectory::loss_column(const std::string& name) const {
  const auto it = std::find(loss_names.begin(), loss_names.end(), name);
  if (it == loss_names.end()) throw NotFoundError("trajectory has no recorded loss '" + name + "'");
  const auto col = static_cast<std::size_t>(it - loss_names.begin());
  std::vector<double> out(size());
  for (std::size_t i = 0; i < size(); ++i) out[i] = losses(i, col);
  return out;
}

double Trajectory::loss(const std::string& name, std::size_t i) const { return loss_column(name).at(i); }

void Trajectory::validate() const {
  spec.validate();
  const std::size_t n = spec.param_count();
  for (const auto& c : checkpoints)
    if (c.size() != n) throw ValidationError("trajectory: checkpoint length differs from the recorded layout");
  if (epochs.size() != checkpoints.size()) throw ValidationError("trajectory: epoch list length mismatch");
  if (losses.rows() != checkpoints.size() || losses.cols() != loss_names.size())
    throw ValidationError("trajectory: loss table shape mismatch");
  if (segment_starts.empty() || segment_starts.front() != 0) throw ValidationError("trajectory: bad segment starts");
  for (std::size_t s : segment_starts)
    if (s >= std::max<std::size_t>(checkpoints.size(), 1)) throw ValidationError("trajectory: segment start out of range");
}

std::size_t NormStats::floored_count() const { return static_cast<std::size_t>(std::count(floored.begin(), floored.end(), true)); }

std::vector<double> NormStats::normalize(std::span<const double> theta) const {
  if (theta.size() != mean.size()) throw ShapeError("normalize: length mismatch");
  std::vector<double> z(theta.size());
  for (std::size_t j = 0; j < z.size(); ++j) z[j] = (theta[j] - mean[j]) / std[j];
  return z;
}

std::vector<double> NormStats::denormalize(std::span<const double> z) const {
  if (z.size() != mean.size()) throw ShapeError("denormalize: length mismatch");
  std::vector<double> theta(z.size());
  for (std::size_t j = 0; j < z.size(); ++j) theta[j] = z[j] * std[j] + mean[j];
  return theta;
}

NormStats compute_norm_stats(const Trajectory& traj) {
  if (traj.size() < 2) throw ValidationError("normalize: trajectory needs at least 2 checkpoints");
  const std::size_t n = traj.dimension();
  const double k = static_cast<double>(traj.size());
  NormStats s;
  s.mean.assign(n, 0.0);
  s.std.assign(n, 0.0);
  s.floored.assign(n, false);
  for (const auto& c : traj.checkpoints)
    for (std::size_t j = 0; j < n; ++j) s.mean[j] += c[j];
  for (double& m : s.mean) m /= k;
  for (const auto& c : traj.checkpoints)
    for (std::size_t j = 0; j < n; ++j) s.std[j] += (c[j] - s.mean[j]) * (c[j] - s.mean[j]);
  for (std::size_t j = 0; j < n; ++j) {
    s.std[j] = std::sqrt(s.std[j] / k);
    if (!(s.std[j] >= kStdFloor)) {
      s.std[j] = kStdFloor;
      s.floored[j] = true;
    }
  }
  return s;
}

NormalizedTrajectory normalize(const Trajectory& traj) {
  NormalizedTrajectory out;
  out.stats = compute_norm_stats(traj);
  const std::size_t n = traj.dimension();
  out.points = DenseMatrix(traj.size(), n);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto z = out.stats.normalize(traj.checkpoints[i]);
    std::copy(z.begin(), z.end(), out.points.row(i).begin());
  }
  out.d_max = distance(out.points.row(0), out.points.row(traj.size() - 1));
  if (!(out.d_max > 0.0)) throw DegenerateError("normalize: first and last checkpoints coincide (d_max = 0)");
  return out;
}

FlatParams denormalize(const NormStats& stats, const MlpSpec& spec, std::span<const double> z) {
  FlatParams p{spec, stats.denormalize(z)};
  p.validate();
  return p;
}

Trajectory concatenate(const std::vector<Trajectory>& runs) {
  if (runs.empty()) throw ValidationError("concatenate: no runs");
  Trajectory out;
  out.spec = runs.front().spec;
  out.stride = runs.front().stride;
  out.loss_names = runs.front().loss_names;
  out.segment_starts.clear();
  out.metadata = Json::object();
  out.metadata["runs"] = Json::array();
  std::vector<double> rows;
  for (const auto& r : runs) {
    if (!(r.spec == out.spec)) throw ValidationError("concatenate: runs differ in layout");
    if (r.loss_names != out.loss_names) throw ValidationError("concatenate: runs differ in recorded losses");
    for (std::size_t s : r.segment_starts) out.segment_starts.push_back(out.checkpoints.size() + s);
    out.checkpoints.insert(out.checkpoints.end(), r.checkpoints.begin(), r.checkpoints.end());
    out.epochs.insert(out.epochs.end(), r.epochs.begin(), r.epochs.end());
    rows.insert(rows.end(), r.losses.values().begin(), r.losses.values().end());
    out.metadata["runs"].push_back(r.metadata);
  }
  out.losses = DenseMatrix(out.checkpoints.size(), out.loss_names.size(), std::move(rows));
  return out;
}

NvtjFile trajectory_to_nvtj(const Trajectory& traj) {
  traj.validate();
  NvtjFile f;
  f.header = Json{{"kind", "trajectory"},
                  {"spec", traj.spec},
                  {"stride", traj.stride},
                  {"checkpoints", traj.size()},
                  {"epochs", traj.epochs},
                  {"loss_names", traj.loss_names},
                  {"segment_starts", traj.segment_starts},
                  {"metadata", traj.metadata}};
  for (const auto& c : traj.checkpoints) f.blocks.push_back(c);
  for (std::size_t i = 0; i < traj.size(); ++i) f.blocks.emplace_back(traj.losses.row(i).begin(), traj.losses.row(i).end());
  if (traj.size() >= 2) {
    const NormStats s = compute_norm_stats(traj);
    f.header["norm_stats"] = Json{{"floored", s.floored_count()}};
    f.blocks.push_back(s.mean);
    f.blocks.push_back(s.std);
  }
  return f;
}

Trajectory trajectory_from_nvtj(const NvtjFile& f) {
  expect_nvtj_kind(f, "trajectory");
  Trajectory t;
  try {
    t.spec = f.header.at("spec").get<MlpSpec>();
    t.stride = f.header.at("stride").get<std::size_t>();
    t.epochs = f.header.at("epochs").get<std::vector<std::size_t>>();
    t.loss_names = f.header.at("loss_names").get<std::vector<std::string>>();
    t.segment_starts = f.header.at("segment_starts").get<std::vector<std::size_t>>();
    t.metadata = f.header.at("metadata");
  } catch (const Json::exception& e) {
    throw FormatError(std::string("trajectory header: ") + e.what(), 16);
  }
  const auto k = f.header.at("checkpoints").get<std::size_t>();
  const std::size_t expected_blocks = 2 * k + (f.header.contains("norm_stats") ? 2 : 0);
  if (f.blocks.size() != expected_blocks)
    throw FormatError("trajectory: expected " + std::to_string(expected_blocks) + " blocks, got " +
                          std::to_string(f.blocks.size()),
                      16);
  t.checkpoints.assign(f.blocks.begin(), f.blocks.begin() + static_cast<std::ptrdiff_t>(k));
  t.losses = DenseMatrix(k, t.loss_names.size());
  for (std::size_t i = 0; i < k; ++i) {
    const auto& row = f.blocks[k + i];
    if (row.size() != t.loss_names.size()) throw FormatError("trajectory: loss row length mismatch", 16);
    std::copy(row.begin(), row.end(), t.losses.row(i).begin());
  }
  try {
    t.validate();
  } catch (const ValidationError& e) {
    throw FormatError(std::string("trajectory: ") + e.what(), 16);
  }
  return t;
}

void save_trajectory(const std::string& path, const Trajectory& traj) { write_nvtj(path, trajectory_to_nvtj(traj)); }

Trajectory load_trajectory(const std::string& path) { return trajectory_from_nvtj(read_nvtj(path)); }

std::string trajectory_hash(const Trajectory& traj) { return sha256_hex(encode_nvtj(trajectory_to_nvtj(traj))); }

}  // namespace lmv
