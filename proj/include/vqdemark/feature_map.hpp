#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string_view>
#include <vector>

#include "vqdemark/image.hpp"

namespace vqdemark {

enum class FeatureKind { MaxProbability, Variance, Correlation, Entropy, GradientMagnitude };

constexpr std::string_view to_string(FeatureKind kind) noexcept {
  switch (kind) {
    case FeatureKind::MaxProbability: return "max_probability";
    case FeatureKind::Variance: return "variance";
    case FeatureKind::Correlation: return "correlation";
    case FeatureKind::Entropy: return "entropy";
    case FeatureKind::GradientMagnitude: return "gradient_magnitude";
  }
  return "unknown";
}

/// Real-valued per-pixel map, same raster layout as GrayImage.
struct FeatureMap {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> values;
  FeatureKind feature = FeatureKind::Entropy;

  FeatureMap() = default;
  FeatureMap(std::size_t w, std::size_t h, FeatureKind kind)
      : width(w), height(h), values(w * h, 0.0), feature(kind) {}

  double at(std::size_t x, std::size_t y) const { return values[y * width + x]; }
  double& at(std::size_t x, std::size_t y) { return values[y * width + x]; }
};

/// Min-max rescale to 0..255 with round-half-up. A constant map renders
/// as all zeros.
inline GrayImage render_feature(const FeatureMap& map) {
  GrayImage out(map.width, map.height);
  if (map.values.empty()) return out;
  const auto [lo_it, hi_it] = std::minmax_element(map.values.begin(), map.values.end());
  const double lo = *lo_it;
  const double range = *hi_it - lo;
  if (!(range > 0.0)) return out;
  auto px = out.pixels();
  for (std::size_t i = 0; i < map.values.size(); ++i) {
    const double scaled = std::floor((map.values[i] - lo) / range * 255.0 + 0.5);
    px[i] = static_cast<std::uint8_t>(std::clamp(scaled, 0.0, 255.0));
  }
  return out;
}

}  // namespace vqdemark
