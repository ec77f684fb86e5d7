#include "lmv/render/colormap.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "lmv/core/errors.hpp"

namespace lmv {

std::string Rgb::hex() const {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

Rgb Rgb::from_hex(const std::string& s) {
  if (s.size() != 7 || s[0] != '#') throw ValidationError("color '" + s + "' is not #rrggbb");
  auto channel = [&](std::size_t at) {
    unsigned v = 0;
    for (std::size_t i = at; i < at + 2; ++i) {
      const char c = s[i];
      v *= 16;
      if (c >= '0' && c <= '9') v += static_cast<unsigned>(c - '0');
      else if (c >= 'a' && c <= 'f') v += static_cast<unsigned>(c - 'a' + 10);
      else if (c >= 'A' && c <= 'F') v += static_cast<unsigned>(c - 'A' + 10);
      else throw ValidationError("color '" + s + "' is not #rrggbb");
    }
    return static_cast<std::uint8_t>(v);
  };
  return {channel(1), channel(3), channel(5)};
}

Colormap::Colormap()
    : anchors_{{22, 34, 94}, {25, 128, 140}, {62, 170, 82}, {238, 214, 48}, {255, 250, 205}} {}

Colormap::Colormap(std::vector<Rgb> anchors) : anchors_(std::move(anchors)) {
  if (anchors_.size() < kMinColormapAnchors)
    throw ValidationError("colormap needs at least " + std::to_string(kMinColormapAnchors) + " anchors, got " +
                          std::to_string(anchors_.size()));
}

Rgb Colormap::at(double t) const {
  if (std::isnan(t)) t = 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double s = t * static_cast<double>(anchors_.size() - 1);
  const std::size_t i = std::min(static_cast<std::size_t>(s), anchors_.size() - 2);
  const double f = s - static_cast<double>(i);
  auto mix = [f](std::uint8_t a, std::uint8_t b) {
    return static_cast<std::uint8_t>(std::lround(a + f * (static_cast<double>(b) - a)));
  };
  const Rgb& a = anchors_[i];
  const Rgb& b = anchors_[i + 1];
  return {mix(a.r, b.r), mix(a.g, b.g), mix(a.b, b.b)};
}

}  // namespace lmv
