#pragma once

#include <array>
#include <span>
#include <vector>

#include "lmv/core/matrix.hpp"

namespace lmv {

using Point2 = std::array<double, 2>;

struct Polyline {
  std::vector<Point2> points;
  bool closed = false;
};

/// Iso-lines of field(iy, ix) sampled at (xs[ix], ys[iy]). Crossings are
/// linearly interpolated along cell edges; saddles are split by the average
/// of the four corners. Cells touching a NaN are skipped.
std::vector<Polyline> marching_squares(const DenseMatrix& field, std::span<const double> xs,
                                       std::span<const double> ys, double level);

/// Region lo <= f <= hi of the piecewise-linear interpolant, as polygons.
/// Each cell is split into four triangles around its center (value = corner
/// mean), so band boundaries agree with the saddle rule above.
std::vector<std::vector<Point2>> filled_band(const DenseMatrix& field, std::span<const double> xs,
                                             std::span<const double> ys, double lo, double hi);

}  // namespace lmv
