#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lmv/core/json_io.hpp"

namespace lmv {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  std::string hex() const;  // "#rrggbb"
  static Rgb from_hex(const std::string& s);
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Piecewise-linear ramp over evenly spaced anchor colors.
class Colormap {
 public:
  Colormap();  // dark blue, teal, green, yellow, light yellow
  explicit Colormap(std::vector<Rgb> anchors);

  /// t is clamped to [0, 1]; channels are rounded to the nearest integer.
  Rgb at(double t) const;
  const std::vector<Rgb>& anchors() const { return anchors_; }

 private:
  std::vector<Rgb> anchors_;
};

inline constexpr std::size_t kMinColormapAnchors = 5;

}  // namespace lmv
