#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "vqdemark/edges.hpp"

namespace vqdemark::metrics {

enum class Connectivity { Four, Eight };

/// Sizes of the connected components of the nonzero pixels of `mask`,
/// in raster order of each component's first pixel.
inline std::vector<std::size_t> component_sizes(const std::vector<std::uint8_t>& mask, std::size_t width,
                                                std::size_t height, Connectivity conn) {
  std::vector<std::uint8_t> seen(mask.size(), 0);
  std::vector<std::size_t> sizes;
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < mask.size(); ++start) {
    if (!mask[start] || seen[start]) continue;
    std::size_t size = 0;
    seen[start] = 1;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t p = stack.back();
      stack.pop_back();
      ++size;
      const auto x = static_cast<std::ptrdiff_t>(p % width);
      const auto y = static_cast<std::ptrdiff_t>(p / width);
      for (std::ptrdiff_t dy = -1; dy <= 1; ++dy) {
        for (std::ptrdiff_t dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          if (conn == Connectivity::Four && dx != 0 && dy != 0) continue;
          const auto nx = x + dx;
          const auto ny = y + dy;
          if (nx < 0 || ny < 0 || nx >= static_cast<std::ptrdiff_t>(width) ||
              ny >= static_cast<std::ptrdiff_t>(height)) {
            continue;
          }
          const auto q = static_cast<std::size_t>(ny) * width + static_cast<std::size_t>(nx);
          if (mask[q] && !seen[q]) {
            seen[q] = 1;
            stack.push_back(q);
          }
        }
      }
    }
    sizes.push_back(size);
  }
  return sizes;
}

/// Components with at least `min_size` pixels.
inline std::size_t count_components(const std::vector<std::uint8_t>& mask, std::size_t width, std::size_t height,
                                    std::size_t min_size, Connectivity conn) {
  std::size_t n = 0;
  for (auto s : component_sizes(mask, width, height, conn)) n += s >= min_size ? 1 : 0;
  return n;
}

/// Mask pixels with a 4-neighbour outside the mask or on the image border.
inline std::vector<std::uint8_t> boundary_of(const std::vector<std::uint8_t>& mask, std::size_t width,
                                             std::size_t height) {
  std::vector<std::uint8_t> out(mask.size(), 0);
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      const std::size_t p = y * width + x;
      if (!mask[p]) continue;
      const bool edge = x == 0 || y == 0 || x + 1 == width || y + 1 == height || !mask[p - 1] || !mask[p + 1] ||
                        !mask[p - width] || !mask[p + width];
      out[p] = edge ? 1 : 0;
    }
  }
  return out;
}

/// Fraction of `truth` pixels within Euclidean distance `radius` of an
/// edge pixel. 1 when `truth` is empty.
inline double boundary_recall(const std::vector<std::uint8_t>& truth, const EdgeMap& edges, double radius) {
  const std::size_t w = edges.width;
  const std::size_t h = edges.height;
  const auto r = static_cast<std::ptrdiff_t>(radius);
  std::size_t total = 0;
  std::size_t hit = 0;
  for (std::size_t p = 0; p < truth.size(); ++p) {
    if (!truth[p]) continue;
    ++total;
    const auto x = static_cast<std::ptrdiff_t>(p % w);
    const auto y = static_cast<std::ptrdiff_t>(p / w);
    bool found = false;
    for (std::ptrdiff_t dy = -r; dy <= r && !found; ++dy) {
      for (std::ptrdiff_t dx = -r; dx <= r && !found; ++dx) {
        if (static_cast<double>(dx * dx + dy * dy) > radius * radius) continue;
        const auto nx = x + dx;
        const auto ny = y + dy;
        if (nx < 0 || ny < 0 || nx >= static_cast<std::ptrdiff_t>(w) || ny >= static_cast<std::ptrdiff_t>(h)) continue;
        found = edges.mask[static_cast<std::size_t>(ny) * w + static_cast<std::size_t>(nx)] != 0;
      }
    }
    hit += found ? 1 : 0;
  }
  return total == 0 ? 1.0 : static_cast<double>(hit) / static_cast<double>(total);
}

}  // namespace vqdemark::metrics
