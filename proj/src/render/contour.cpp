#include "lmv/render/contour.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "lmv/core/errors.hpp"

namespace lmv {

namespace {

void check_axes(const DenseMatrix& field, std::span<const double> xs, std::span<const double> ys) {
  if (field.cols() != xs.size() || field.rows() != ys.size())
    throw ShapeError("contour: field is " + std::to_string(field.rows()) + "x" + std::to_string(field.cols()) +
                     " but axes are " + std::to_string(ys.size()) + "x" + std::to_string(xs.size()));
}

bool cell_finite(const DenseMatrix& f, std::size_t iy, std::size_t ix) {
  return std::isfinite(f(iy, ix)) && std::isfinite(f(iy, ix + 1)) && std::isfinite(f(iy + 1, ix)) &&
         std::isfinite(f(iy + 1, ix + 1));
}

// Segment table: for each case, up to two pairs of cell edges
// (0 bottom, 1 right, 2 top, 3 left); -1 terminates.
constexpr int kSegments[16][4] = {
    {-1, -1, -1, -1}, {3, 0, -1, -1}, {0, 1, -1, -1}, {3, 1, -1, -1}, {1, 2, -1, -1}, {-1, -1, -1, -1},
    {0, 2, -1, -1},   {3, 2, -1, -1}, {2, 3, -1, -1}, {0, 2, -1, -1}, {-1, -1, -1, -1}, {1, 2, -1, -1},
    {3, 1, -1, -1},   {0, 1, -1, -1}, {3, 0, -1, -1}, {-1, -1, -1, -1}};

struct Vertex {
  double x, y, f;
};

// Keeps the part of a polygon where sign * (f - bound) >= 0.
std::vector<Vertex> clip(const std::vector<Vertex>& poly, double bound, double sign) {
  std::vector<Vertex> out;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vertex& a = poly[i];
    const Vertex& b = poly[(i + 1) % n];
    const double da = sign * (a.f - bound);
    const double db = sign * (b.f - bound);
    if (da >= 0) out.push_back(a);
    if ((da >= 0) != (db >= 0)) {
      const double t = da / (da - db);
      out.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y), bound});
    }
  }
  return out;
}

double area(const std::vector<Point2>& p) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Point2& a = p[i];
    const Point2& b = p[(i + 1) % p.size()];
    s += a[0] * b[1] - b[0] * a[1];
  }
  return 0.5 * s;
}

}  // namespace

std::vector<Polyline> marching_squares(const DenseMatrix& field, std::span<const double> xs,
                                       std::span<const double> ys, double level) {
  check_axes(field, xs, ys);
  const std::size_t nx = xs.size(), ny = ys.size();
  if (nx < 2 || ny < 2) return {};

  // Edge keys: horizontal edge leaving node (iy, ix) to the right is 2k,
  // vertical edge leaving it upwards is 2k + 1, with k = iy * nx + ix.
  auto node = [nx](std::size_t iy, std::size_t ix) { return iy * nx + ix; };
  auto edge_key = [&](std::size_t iy, std::size_t ix, int e) -> std::size_t {
    switch (e) {
      case 0: return 2 * node(iy, ix);
      case 1: return 2 * node(iy, ix + 1) + 1;
      case 2: return 2 * node(iy + 1, ix);
      default: return 2 * node(iy, ix) + 1;
    }
  };
  auto crossing = [&](std::size_t key) -> Point2 {
    const std::size_t k = key / 2;
    const std::size_t iy = k / nx, ix = k % nx;
    const double fa = field(iy, ix);
    if (key % 2 == 0) {
      const double t = (level - fa) / (field(iy, ix + 1) - fa);
      return {xs[ix] + t * (xs[ix + 1] - xs[ix]), ys[iy]};
    }
    const double t = (level - fa) / (field(iy + 1, ix) - fa);
    return {xs[ix], ys[iy] + t * (ys[iy + 1] - ys[iy])};
  };

  std::vector<std::array<std::size_t, 2>> segs;
  for (std::size_t iy = 0; iy + 1 < ny; ++iy)
    for (std::size_t ix = 0; ix + 1 < nx; ++ix) {
      if (!cell_finite(field, iy, ix)) continue;
      const double c[4] = {field(iy, ix), field(iy, ix + 1), field(iy + 1, ix + 1), field(iy + 1, ix)};
      int code = 0;
      for (int i = 0; i < 4; ++i)
        if (c[i] >= level) code |= 1 << i;
      int pairs[4] = {-1, -1, -1, -1};
      if (code == 5 || code == 10) {
        const bool center_above = 0.25 * (c[0] + c[1] + c[2] + c[3]) >= level;
        // Isolate the two corners on the other side of the center.
        const bool isolate_02 = (code == 5) != center_above;
        const int iso02[4] = {3, 0, 1, 2};
        const int iso13[4] = {0, 1, 2, 3};
        std::copy_n(isolate_02 ? iso02 : iso13, 4, pairs);
      } else {
        std::copy_n(kSegments[code], 4, pairs);
      }
      for (int p = 0; p < 4 && pairs[p] >= 0; p += 2)
        segs.push_back({edge_key(iy, ix, pairs[p]), edge_key(iy, ix, pairs[p + 1])});
    }

  std::unordered_map<std::size_t, std::vector<std::size_t>> at;
  for (std::size_t s = 0; s < segs.size(); ++s)
    for (std::size_t key : segs[s]) at[key].push_back(s);

  std::vector<bool> used(segs.size(), false);
  std::vector<Polyline> out;
  auto walk = [&](std::size_t s, std::size_t start) {
    Polyline line;
    line.points.push_back(crossing(start));
    std::size_t key = start;
    while (true) {
      used[s] = true;
      key = segs[s][0] == key ? segs[s][1] : segs[s][0];
      line.points.push_back(crossing(key));
      std::size_t next = segs.size();
      for (std::size_t cand : at[key])
        if (!used[cand]) next = cand;
      if (next == segs.size()) break;
      s = next;
    }
    if (key == start && line.points.size() > 2) {
      line.closed = true;
      line.points.pop_back();
    }
    out.push_back(std::move(line));
  };
  for (std::size_t s = 0; s < segs.size(); ++s) {
    if (used[s]) continue;
    for (std::size_t key : segs[s])
      if (at[key].size() == 1 && !used[s]) walk(s, key);
  }
  for (std::size_t s = 0; s < segs.size(); ++s)
    if (!used[s]) walk(s, segs[s][0]);
  return out;
}

std::vector<std::vector<Point2>> filled_band(const DenseMatrix& field, std::span<const double> xs,
                                             std::span<const double> ys, double lo, double hi) {
  check_axes(field, xs, ys);
  std::vector<std::vector<Point2>> out;
  auto emit = [&](const std::vector<Vertex>& poly) {
    if (poly.size() < 3) return;
    std::vector<Point2> p;
    p.reserve(poly.size());
    for (const Vertex& v : poly) p.push_back({v.x, v.y});
    if (std::abs(area(p)) > 0.0) out.push_back(std::move(p));
  };
  for (std::size_t iy = 0; iy + 1 < ys.size(); ++iy)
    for (std::size_t ix = 0; ix + 1 < xs.size(); ++ix) {
      if (!cell_finite(field, iy, ix)) continue;
      const Vertex c[4] = {{xs[ix], ys[iy], field(iy, ix)},
                           {xs[ix + 1], ys[iy], field(iy, ix + 1)},
                           {xs[ix + 1], ys[iy + 1], field(iy + 1, ix + 1)},
                           {xs[ix], ys[iy + 1], field(iy + 1, ix)}};
      double fmin = c[0].f, fmax = c[0].f;
      for (const Vertex& v : c) {
        fmin = std::min(fmin, v.f);
        fmax = std::max(fmax, v.f);
      }
      if (fmax < lo || fmin > hi) continue;
      if (fmin >= lo && fmax <= hi) {
        emit({c[0], c[1], c[2], c[3]});
        continue;
      }
      const Vertex center{0.5 * (c[0].x + c[1].x), 0.5 * (c[1].y + c[2].y), 0.25 * (c[0].f + c[1].f + c[2].f + c[3].f)};
      for (int t = 0; t < 4; ++t) {
        std::vector<Vertex> tri{c[t], c[(t + 1) % 4], center};
        if (std::isfinite(lo)) tri = clip(tri, lo, 1.0);
        if (std::isfinite(hi)) tri = clip(tri, hi, -1.0);
        emit(tri);
      }
    }
  return out;
}

}  // namespace lmv
