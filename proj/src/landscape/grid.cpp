#include "lmv/landscape/grid.hpp"

#include <charconv>
#include <cmath>
#include <limits>

#include "lmv/core/errors.hpp"

namespace lmv {

void GridSpec::validate() const {
  if (resolution < 2) throw ConfigError("grid: resolution must be >= 2");
  const auto& w = window;
  for (double v : w)
    if (!(v >= -1.0 && v <= 1.0)) throw ConfigError("grid: window must lie inside [-1, 1]^2");
  if (!(w[0] < w[1]) || !(w[2] < w[3])) throw ConfigError("grid: window bounds must be increasing");
}

double GridSpec::x(std::size_t ix) const {
  return window[0] + (window[1] - window[0]) * static_cast<double>(ix) / static_cast<double>(resolution - 1);
}

double GridSpec::y(std::size_t iy) const {
  return window[2] + (window[3] - window[2]) * static_cast<double>(iy) / static_cast<double>(resolution - 1);
}

DenseMatrix GridSpec::mesh() const {
  validate();
  DenseMatrix m(resolution * resolution, 2);
  for (std::size_t iy = 0; iy < resolution; ++iy)
    for (std::size_t ix = 0; ix < resolution; ++ix) {
      m(iy * resolution + ix, 0) = x(ix);
      m(iy * resolution + ix, 1) = y(iy);
    }
  return m;
}

void to_json(Json& j, const GridSpec& g) { j = Json{{"resolution", g.resolution}, {"window", g.window}}; }

void from_json(const Json& j, GridSpec& g) {
  read_optional(j, "resolution", g.resolution);
  read_optional(j, "window", g.window);
}

DenseMatrix encode_trajectory(const Projector& model, const Trajectory& traj) {
  if (!(traj.spec == model.target_spec())) throw ShapeError(model.name() + ": trajectory layout differs from the fitted one");
  DenseMatrix normalized(traj.size(), traj.dimension());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto z = model.norm_stats().normalize(traj.checkpoints[i]);
    std::copy(z.begin(), z.end(), normalized.row(i).begin());
  }
  return model.encode_rows(normalized);
}

LandscapeGrid evaluate_grid(const Projector& model, const GridSpec& spec, const LossOracle& oracle,
                            const Trajectory& traj) {
  spec.validate();
  LandscapeGrid grid;
  grid.spec = spec;
  grid.field_name = oracle.name;
  grid.overlay_name = oracle.name;
  grid.field = DenseMatrix(spec.resolution, spec.resolution);
  const DenseMatrix decoded = model.decode_rows(spec.mesh());
  for (std::size_t iy = 0; iy < spec.resolution; ++iy) {
    for (std::size_t ix = 0; ix < spec.resolution; ++ix) {
      double v = std::numeric_limits<double>::quiet_NaN();
      try {
        const FlatParams net{model.target_spec(), model.norm_stats().denormalize(decoded.row(iy * spec.resolution + ix))};
        v = oracle.eval(net);
      } catch (const Error&) {
      }
      if (!std::isfinite(v)) {
        v = std::numeric_limits<double>::quiet_NaN();
        ++grid.failed_points;
      }
      grid.field(iy, ix) = v;
    }
  }
  const std::vector<double> recorded = traj.loss_column(oracle.name);
  const DenseMatrix codes = encode_trajectory(model, traj);
  for (std::size_t i = 0; i < traj.size(); ++i) grid.overlay.push_back({i, {codes(i, 0), codes(i, 1)}, recorded[i]});
  grid.segment_starts = traj.segment_starts;
  grid.provenance = Json{{"method", model.name()}, {"oracle", oracle.name}, {"failed_points", grid.failed_points}};
  return grid;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

Json grid_to_json(const LandscapeGrid& g) {
  Json field = Json::array();
  for (std::size_t iy = 0; iy < g.field.rows(); ++iy) {
    Json row = Json::array();
    for (std::size_t ix = 0; ix < g.field.cols(); ++ix) {
      const double v = g.field(iy, ix);
      row.push_back(std::isfinite(v) ? Json(v) : Json(nullptr));
    }
    field.push_back(std::move(row));
  }
  Json overlay = Json::array();
  for (const auto& p : g.overlay) overlay.push_back(Json{{"index", p.index}, {"x", p.z[0]}, {"y", p.z[1]}, {"value", p.value}});
  return Json{{"spec", g.spec},           {"field_name", g.field_name}, {"field", field},
              {"overlay_name", g.overlay_name}, {"overlay", overlay}, {"segment_starts", g.segment_starts},
              {"failed_points", g.failed_points},
              {"provenance", g.provenance}};
}

LandscapeGrid grid_from_json(const Json& j) {
  LandscapeGrid g;
  try {
    g.spec = j.at("spec").get<GridSpec>();
    g.spec.validate();
    g.field_name = j.at("field_name").get<std::string>();
    g.overlay_name = j.value("overlay_name", g.field_name);
    const auto& field = j.at("field");
    g.field = DenseMatrix(g.spec.resolution, g.spec.resolution);
    if (field.size() != g.spec.resolution) throw ValidationError("grid JSON: field row count mismatch");
    for (std::size_t iy = 0; iy < g.spec.resolution; ++iy) {
      if (field[iy].size() != g.spec.resolution) throw ValidationError("grid JSON: field column count mismatch");
      for (std::size_t ix = 0; ix < g.spec.resolution; ++ix) {
        const auto& v = field[iy][ix];
        g.field(iy, ix) = v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
      }
    }
    for (const auto& p : j.at("overlay"))
      g.overlay.push_back({p.at("index").get<std::size_t>(), {p.at("x").get<double>(), p.at("y").get<double>()},
                           p.at("value").get<double>()});
    g.segment_starts = j.value("segment_starts", std::vector<std::size_t>{0});
    g.failed_points = j.value("failed_points", std::size_t{0});
    g.provenance = j.value("provenance", Json::object());
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("grid JSON: ") + e.what());
  }
  return g;
}

std::string grid_to_csv(const LandscapeGrid& g) {
  std::string out = "x,y,value\n";
  for (std::size_t iy = 0; iy < g.spec.resolution; ++iy)
    for (std::size_t ix = 0; ix < g.spec.resolution; ++ix)
      out += format_double(g.spec.x(ix)) + "," + format_double(g.spec.y(iy)) + "," + format_double(g.field(iy, ix)) + "\n";
  return out;
}

double mean_field_near(const LandscapeGrid& grid, const DenseMatrix& codes, double radius) {
  const DenseMatrix mesh = grid.spec.mesh();
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t m = 0; m < mesh.rows(); ++m) {
    const double v = grid.field.values()[m];
    if (!std::isfinite(v)) continue;
    for (std::size_t i = 0; i < codes.rows(); ++i)
      if (std::hypot(mesh(m, 0) - codes(i, 0), mesh(m, 1) - codes(i, 1)) <= radius) {
        sum += v;
        ++n;
        break;
      }
  }
  if (n == 0) throw ValidationError("mean_field_near: no mesh point within " + format_double(radius) + " of the codes");
  return sum / static_cast<double>(n);
}

}  // namespace lmv
