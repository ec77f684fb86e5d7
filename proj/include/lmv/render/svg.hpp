#pragma once

#include <string>
#include <vector>

#include "lmv/core/json_io.hpp"
#include "lmv/landscape/grid.hpp"
#include "lmv/render/colormap.hpp"

namespace lmv {

enum class LevelSpacing { automatic, log, linear };

struct RenderStyle {
  std::size_t level_count = 30;       // number of level values, field min and max included
  std::vector<double> levels;         // explicit levels; overrides level_count and spacing
  LevelSpacing spacing = LevelSpacing::automatic;  // automatic: log when the field is positive
  std::vector<Rgb> colormap = Colormap().anchors();
  double marker_size = 4.0;
  bool highlight_first = true;  // thick border on the initial model
  bool highlight_last = true;   // square marker on the final model
  double plot_size = 400.0;

  void validate() const;
};

void to_json(Json& j, const RenderStyle& s);
void from_json(const Json& j, RenderStyle& s);

/// Level values and the value -> [0, 1] map shared by bands and markers.
struct LevelScale {
  std::vector<double> levels;
  bool log = false;

  double position(double v) const;
};

/// Levels for a field under a style. A constant field yields one level.
LevelScale compute_levels(const DenseMatrix& field, const RenderStyle& style);

/// Default style for a field name: log-spaced for losses, linear for density.
RenderStyle default_style(const std::string& field_name);

std::string render_svg(const LandscapeGrid& grid, const RenderStyle& style);

}  // namespace lmv
