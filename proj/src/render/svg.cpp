#include "lmv/render/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "lmv/core/errors.hpp"
#include "lmv/render/contour.hpp"

namespace lmv {

namespace {

constexpr double kMargin = 40.0;
constexpr double kColorbarGap = 24.0;
constexpr double kColorbarWidth = 16.0;
constexpr double kLabelWidth = 70.0;

std::string spacing_name(LevelSpacing s) {
  switch (s) {
    case LevelSpacing::log: return "log";
    case LevelSpacing::linear: return "linear";
    default: return "auto";
  }
}

LevelSpacing spacing_from(const std::string& s) {
  if (s == "log") return LevelSpacing::log;
  if (s == "linear") return LevelSpacing::linear;
  if (s == "auto") return LevelSpacing::automatic;
  throw ConfigError("render style: unknown level spacing '" + s + "'");
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::pair<double, double> finite_range(const DenseMatrix& f) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double v : f.values())
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  return {lo, hi};
}

}  // namespace

void RenderStyle::validate() const {
  if (levels.empty() && level_count < 2) throw ValidationError("render style: need at least 2 contour levels");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!std::isfinite(levels[i])) throw ValidationError("render style: levels must be finite");
    if (i > 0 && !(levels[i] > levels[i - 1])) throw ValidationError("render style: levels must be strictly increasing");
  }
  if (levels.size() == 1) throw ValidationError("render style: need at least 2 explicit levels");
  if (spacing == LevelSpacing::log && !levels.empty() && levels.front() <= 0.0)
    throw ValidationError("render style: log spacing needs positive levels");
  Colormap check(colormap);
  (void)check;
  if (!(marker_size > 0.0)) throw ValidationError("render style: marker size must be positive");
  if (!(plot_size > 0.0)) throw ValidationError("render style: plot size must be positive");
}

void to_json(Json& j, const RenderStyle& s) {
  std::vector<std::string> colors;
  for (const Rgb& c : s.colormap) colors.push_back(c.hex());
  j = Json{{"level_count", s.level_count},     {"levels", s.levels},
           {"spacing", spacing_name(s.spacing)}, {"colormap", colors},
           {"marker_size", s.marker_size},     {"highlight_first", s.highlight_first},
           {"highlight_last", s.highlight_last}, {"plot_size", s.plot_size}};
}

void from_json(const Json& j, RenderStyle& s) {
  s = RenderStyle{};
  s.level_count = j.value("level_count", s.level_count);
  s.levels = j.value("levels", s.levels);
  s.spacing = spacing_from(j.value("spacing", std::string("auto")));
  if (j.contains("colormap")) {
    s.colormap.clear();
    for (const auto& c : j.at("colormap")) s.colormap.push_back(Rgb::from_hex(c.get<std::string>()));
  }
  s.marker_size = j.value("marker_size", s.marker_size);
  s.highlight_first = j.value("highlight_first", s.highlight_first);
  s.highlight_last = j.value("highlight_last", s.highlight_last);
  s.plot_size = j.value("plot_size", s.plot_size);
  s.validate();
}

double LevelScale::position(double v) const {
  if (levels.size() < 2) return 0.5;
  if (log) {
    if (!(v > 0.0)) return 0.0;
    return (std::log10(v) - std::log10(levels.front())) / (std::log10(levels.back()) - std::log10(levels.front()));
  }
  return (v - levels.front()) / (levels.back() - levels.front());
}

LevelScale compute_levels(const DenseMatrix& field, const RenderStyle& style) {
  style.validate();
  LevelScale scale;
  if (!style.levels.empty()) {
    scale.levels = style.levels;
    scale.log = style.spacing == LevelSpacing::log ||
                (style.spacing == LevelSpacing::automatic && style.levels.front() > 0.0);
    return scale;
  }
  const auto [lo, hi] = finite_range(field);
  if (!std::isfinite(lo)) return scale;  // nothing finite to contour
  if (lo == hi) {
    scale.levels = {lo};
    return scale;
  }
  if (style.spacing == LevelSpacing::log && lo <= 0.0)
    throw ValidationError("render: log-spaced levels need a positive field, minimum is " + label(lo));
  scale.log = style.spacing == LevelSpacing::log || (style.spacing == LevelSpacing::automatic && lo > 0.0);
  const std::size_t n = style.level_count;
  scale.levels.resize(n);
  const double a = scale.log ? std::log10(lo) : lo;
  const double b = scale.log ? std::log10(hi) : hi;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    scale.levels[i] = scale.log ? std::pow(10.0, u) : u;
  }
  scale.levels.front() = lo;
  scale.levels.back() = hi;
  return scale;
}

RenderStyle default_style(const std::string& field_name) {
  RenderStyle s;
  s.spacing = field_name == "density" ? LevelSpacing::linear : LevelSpacing::automatic;
  return s;
}

std::string render_svg(const LandscapeGrid& grid, const RenderStyle& style) {
  grid.spec.validate();
  const std::size_t res = grid.spec.resolution;
  if (grid.field.rows() != res || grid.field.cols() != res) throw ShapeError("render: field does not match the grid spec");
  const LevelScale scale = compute_levels(grid.field, style);
  const Colormap cmap(style.colormap);

  std::vector<double> xs(res), ys(res);
  for (std::size_t i = 0; i < res; ++i) {
    xs[i] = grid.spec.x(i);
    ys[i] = grid.spec.y(i);
  }
  const auto [x1, x2, y1, y2] = grid.spec.window;
  const double size = style.plot_size;
  auto px = [&](double x) { return kMargin + (x - x1) / (x2 - x1) * size; };
  auto py = [&](double y) { return kMargin + (y2 - y) / (y2 - y1) * size; };
  auto path_of = [&](const std::vector<Point2>& pts, bool closed) {
    std::string d;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      d += (i == 0 ? "M" : "L") + num(px(pts[i][0])) + " " + num(py(pts[i][1]));
    }
    if (closed) d += "Z";
    return d;
  };

  const double width = kMargin + size + kColorbarGap + kColorbarWidth + kLabelWidth;
  const double height = 2 * kMargin + size;
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(height)
     << "\" viewBox=\"0 0 " << num(width) << " " << num(height) << "\">\n";
  os << "<title>" << xml_escape(grid.field_name) << "</title>\n";
  // Overlay clip: the plot square plus room for a whole marker at its edge.
  const double pad = style.marker_size + 3.0;
  os << "<defs><clipPath id=\"plot-area\"><rect x=\"" << num(kMargin - pad) << "\" y=\"" << num(kMargin - pad)
     << "\" width=\"" << num(size + 2 * pad) << "\" height=\"" << num(size + 2 * pad) << "\"/></clipPath></defs>\n";
  // Mesh points without a value show through as gray.
  os << "<rect class=\"background\" x=\"" << num(kMargin) << "\" y=\"" << num(kMargin) << "\" width=\"" << num(size)
     << "\" height=\"" << num(size) << "\" fill=\"#bdbdbd\"/>\n";

  const std::size_t n_levels = scale.levels.size();
  std::vector<Rgb> band_colors;
  os << "<g class=\"bands\">\n";
  if (n_levels == 1) {
    const Rgb c = cmap.at(0.5);
    band_colors.push_back(c);
    os << "<rect class=\"band\" data-lo=\"" << format_double(scale.levels[0]) << "\" data-hi=\""
       << format_double(scale.levels[0]) << "\" x=\"" << num(kMargin) << "\" y=\"" << num(kMargin) << "\" width=\""
       << num(size) << "\" height=\"" << num(size) << "\" fill=\"" << c.hex() << "\"/>\n";
  }
  for (std::size_t b = 0; n_levels >= 2 && b + 1 < n_levels; ++b) {
    const double lo = b == 0 ? -std::numeric_limits<double>::infinity() : scale.levels[b];
    const double hi = b + 2 == n_levels ? std::numeric_limits<double>::infinity() : scale.levels[b + 1];
    const Rgb c = cmap.at(0.5 * (scale.position(scale.levels[b]) + scale.position(scale.levels[b + 1])));
    band_colors.push_back(c);
    const auto polys = filled_band(grid.field, xs, ys, lo, hi);
    if (polys.empty()) continue;
    std::string d;
    for (const auto& p : polys) d += path_of(p, true);
    os << "<path class=\"band\" data-lo=\"" << format_double(scale.levels[b]) << "\" data-hi=\""
       << format_double(scale.levels[b + 1]) << "\" fill=\"" << c.hex() << "\" stroke=\"" << c.hex()
       << "\" stroke-width=\"0.4\" d=\"" << d << "\"/>\n";
  }
  os << "</g>\n";

  os << "<g class=\"isolines\" fill=\"none\" stroke=\"#000000\" stroke-opacity=\"0.35\" stroke-width=\"0.5\">\n";
  for (std::size_t l = 1; l + 1 < n_levels; ++l) {
    const auto lines = marching_squares(grid.field, xs, ys, scale.levels[l]);
    if (lines.empty()) continue;
    std::string d;
    for (const auto& line : lines) d += path_of(line.points, line.closed);
    os << "<path class=\"isoline\" data-level=\"" << format_double(scale.levels[l]) << "\" d=\"" << d << "\"/>\n";
  }
  os << "</g>\n";

  if (!grid.overlay.empty()) {
    os << "<g class=\"trajectory\" clip-path=\"url(#plot-area)\">\n";
    // Each run is its own polyline; its first and last models get the highlights.
    std::vector<bool> starts(grid.overlay.size() + 1, false);
    starts[0] = starts[grid.overlay.size()] = true;
    for (std::size_t s : grid.segment_starts)
      if (s < grid.overlay.size()) starts[s] = true;
    std::string d;
    for (std::size_t i = 0; i < grid.overlay.size(); ++i)
      d += (starts[i] ? "M" : "L") + num(px(grid.overlay[i].z[0])) + " " + num(py(grid.overlay[i].z[1]));
    os << "<path class=\"path\" fill=\"none\" stroke=\"#404040\" stroke-width=\"0.8\" d=\"" << d << "\"/>\n";
    const bool colored = !grid.overlay_name.empty();
    for (std::size_t i = 0; i < grid.overlay.size(); ++i) {
      const OverlayPoint& p = grid.overlay[i];
      const std::string fill =
          !colored ? "#ffffff" : (std::isfinite(p.value) ? cmap.at(scale.position(p.value)).hex() : "#808080");
      const bool first = starts[i] && style.highlight_first;
      const bool last = starts[i + 1] && style.highlight_last;
      const std::string stroke_w = first ? "3" : "0.8";
      const double r = style.marker_size;
      const std::string common = "class=\"model\" data-index=\"" + std::to_string(p.index) + "\" data-value=\"" +
                                 format_double(p.value) + "\" fill=\"" + fill + "\" stroke=\"#000000\" stroke-width=\"" +
                                 stroke_w + "\"";
      if (last) {
        os << "<rect " << common << " x=\"" << num(px(p.z[0]) - r) << "\" y=\"" << num(py(p.z[1]) - r)
           << "\" width=\"" << num(2 * r) << "\" height=\"" << num(2 * r) << "\"/>\n";
      } else {
        os << "<circle " << common << " cx=\"" << num(px(p.z[0])) << "\" cy=\"" << num(py(p.z[1])) << "\" r=\""
           << num(r) << "\"/>\n";
      }
    }
    os << "</g>\n";
  }
  os << "<rect class=\"frame\" x=\"" << num(kMargin) << "\" y=\"" << num(kMargin) << "\" width=\"" << num(size)
     << "\" height=\"" << num(size) << "\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1\"/>\n";

  const double cb_x = kMargin + size + kColorbarGap;
  os << "<g class=\"colorbar\" font-family=\"sans-serif\" font-size=\"9\">\n";
  if (!band_colors.empty()) {
    const double h = size / static_cast<double>(band_colors.size());
    for (std::size_t b = 0; b < band_colors.size(); ++b)
      os << "<rect x=\"" << num(cb_x) << "\" y=\"" << num(kMargin + size - (b + 1) * h) << "\" width=\""
         << num(kColorbarWidth) << "\" height=\"" << num(h) << "\" fill=\"" << band_colors[b].hex() << "\"/>\n";
    for (std::size_t l = 0; l < n_levels; ++l) {
      const double y = n_levels == 1 ? kMargin + 0.5 * size : kMargin + size - l * h;
      os << "<text class=\"level\" data-level=\"" << format_double(scale.levels[l]) << "\" x=\""
         << num(cb_x + kColorbarWidth + 4) << "\" y=\"" << num(y + 3) << "\">" << label(scale.levels[l]) << "</text>\n";
    }
  }
  os << "</g>\n";
  os << "<text class=\"caption\" x=\"" << num(kMargin) << "\" y=\"" << num(kMargin - 12)
     << "\" font-family=\"sans-serif\" font-size=\"12\">" << xml_escape(grid.field_name)
     << (grid.overlay_name.empty() ? "" : " | markers: " + xml_escape(grid.overlay_name)) << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace lmv
