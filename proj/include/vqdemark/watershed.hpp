#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <vector>

#include "vqdemark/edges.hpp"
#include "vqdemark/feature_map.hpp"
#include "vqdemark/filter.hpp"
#include "vqdemark/image.hpp"

namespace vqdemark::watershed {

/// 0 marks watershed-line pixels, 1..region_count are catchment basins.
struct LabelMap {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::int32_t> labels;
  std::size_t region_count = 0;

  std::int32_t at(std::size_t x, std::size_t y) const { return labels[y * width + x]; }
};

/// Sobel gradient magnitude with edge-replicated borders.
inline FeatureMap gradient_magnitude(const GrayImage& img) {
  if (img.width() < 3 || img.height() < 3) {
    throw Error(ErrorCode::ImageSmallerThanKernel, "gradient needs at least 3x3 pixels");
  }
  auto s = sobel(RealImage::from(img));
  FeatureMap map(img.width(), img.height(), FeatureKind::GradientMagnitude);
  map.values = std::move(s.magnitude.values);
  return map;
}

/// Optional pre-smoothing before the gradient.
inline FeatureMap gradient_magnitude(const GrayImage& img, double smooth_sigma) {
  if (!(smooth_sigma > 0.0)) return gradient_magnitude(img);
  if (img.width() < 3 || img.height() < 3) {
    throw Error(ErrorCode::ImageSmallerThanKernel, "gradient needs at least 3x3 pixels");
  }
  auto s = sobel(gaussian_blur(RealImage::from(img), smooth_sigma));
  FeatureMap map(img.width(), img.height(), FeatureKind::GradientMagnitude);
  map.values = std::move(s.magnitude.values);
  return map;
}

/// Relief levels used by the flooding schedule: min-max rescale to 0..255.
inline std::vector<std::uint8_t> quantize_relief(const FeatureMap& relief) {
  const auto img = render_feature(relief);
  return std::vector<std::uint8_t>(img.pixels().begin(), img.pixels().end());
}

namespace detail {

inline std::array<std::ptrdiff_t, 4> neighbours4(std::size_t p, std::size_t w, std::size_t h, std::size_t& n) {
  std::array<std::ptrdiff_t, 4> out{};
  n = 0;
  const std::size_t x = p % w;
  const std::size_t y = p / w;
  if (y > 0) out[n++] = static_cast<std::ptrdiff_t>(p - w);
  if (x > 0) out[n++] = static_cast<std::ptrdiff_t>(p - 1);
  if (x + 1 < w) out[n++] = static_cast<std::ptrdiff_t>(p + 1);
  if (y + 1 < h) out[n++] = static_cast<std::ptrdiff_t>(p + w);
  return out;
}

}  // namespace detail

/// Immersion watershed (Vincent-Soille) on an 8-bit relief, 4-connected.
/// When `order` is given it receives each pixel once, at the moment it
/// first leaves the masked state.
inline LabelMap watershed_levels(const std::vector<std::uint8_t>& level, std::size_t width, std::size_t height,
                                 std::vector<std::size_t>* order = nullptr) {
  constexpr std::int32_t kInit = -1;
  constexpr std::int32_t kMask = -2;
  constexpr std::int32_t kWshed = 0;
  constexpr std::size_t kFictitious = static_cast<std::size_t>(-1);

  const std::size_t n = width * height;
  LabelMap lm;
  lm.width = width;
  lm.height = height;
  lm.labels.assign(n, kInit);
  std::vector<std::uint32_t> dist(n, 0);

  // counting sort by level, stable in raster order
  std::array<std::size_t, 257> start{};
  for (auto v : level) ++start[static_cast<std::size_t>(v) + 1];
  for (std::size_t i = 1; i < start.size(); ++i) start[i] += start[i - 1];
  std::vector<std::size_t> sorted(n);
  {
    auto pos = start;
    for (std::size_t p = 0; p < n; ++p) sorted[pos[level[p]]++] = p;
  }

  auto& lab = lm.labels;
  std::int32_t current_label = 0;
  std::deque<std::size_t> fifo;
  std::size_t nn = 0;

  for (std::size_t h = 0; h < 256; ++h) {
    const std::size_t first = start[h];
    const std::size_t last = start[h + 1];
    if (first == last) continue;

    for (std::size_t k = first; k < last; ++k) {
      const std::size_t p = sorted[k];
      lab[p] = kMask;
      const auto nb = detail::neighbours4(p, width, height, nn);
      for (std::size_t i = 0; i < nn; ++i) {
        const auto q = static_cast<std::size_t>(nb[i]);
        if (lab[q] >= kWshed) {
          dist[p] = 1;
          fifo.push_back(p);
          break;
        }
      }
    }

    std::uint32_t current_dist = 1;
    fifo.push_back(kFictitious);
    for (;;) {
      std::size_t p = fifo.front();
      fifo.pop_front();
      if (p == kFictitious) {
        if (fifo.empty()) break;
        fifo.push_back(kFictitious);
        ++current_dist;
        p = fifo.front();
        fifo.pop_front();
      }
      const auto nb = detail::neighbours4(p, width, height, nn);
      for (std::size_t i = 0; i < nn; ++i) {
        const auto q = static_cast<std::size_t>(nb[i]);
        if (dist[q] < current_dist && lab[q] >= kWshed) {
          if (order != nullptr && lab[p] == kMask) order->push_back(p);
          if (lab[q] > 0) {
            if (lab[p] == kMask || lab[p] == kWshed) {
              lab[p] = lab[q];
            } else if (lab[p] != lab[q]) {
              lab[p] = kWshed;
            }
          } else if (lab[p] == kMask) {
            lab[p] = kWshed;
          }
        } else if (lab[q] == kMask && dist[q] == 0) {
          dist[q] = current_dist + 1;
          fifo.push_back(q);
        }
      }
    }

    // anything still masked at this level is a new regional minimum
    for (std::size_t k = first; k < last; ++k) {
      const std::size_t p = sorted[k];
      dist[p] = 0;
      if (lab[p] != kMask) continue;
      ++current_label;
      lab[p] = current_label;
      if (order != nullptr) order->push_back(p);
      fifo.push_back(p);
      while (!fifo.empty()) {
        const std::size_t q = fifo.front();
        fifo.pop_front();
        const auto nb = detail::neighbours4(q, width, height, nn);
        for (std::size_t i = 0; i < nn; ++i) {
          const auto r = static_cast<std::size_t>(nb[i]);
          if (lab[r] == kMask) {
            lab[r] = current_label;
            if (order != nullptr) order->push_back(r);
            fifo.push_back(r);
          }
        }
      }
    }
  }
  lm.region_count = static_cast<std::size_t>(current_label);
  return lm;
}

inline LabelMap watershed_segment(const FeatureMap& relief) {
  return watershed_levels(quantize_relief(relief), relief.width, relief.height);
}

/// Watershed-line pixels plus pixels touching a different positive label.
inline EdgeMap watershed_edges(const LabelMap& lm) {
  EdgeMap em(lm.width, lm.height);
  std::size_t nn = 0;
  for (std::size_t p = 0; p < lm.labels.size(); ++p) {
    const auto l = lm.labels[p];
    if (l == 0) {
      em.mask[p] = 1;
      continue;
    }
    const auto nb = detail::neighbours4(p, lm.width, lm.height, nn);
    for (std::size_t i = 0; i < nn; ++i) {
      const auto q = lm.labels[static_cast<std::size_t>(nb[i])];
      if (q > 0 && q != l) {
        em.mask[p] = 1;
        break;
      }
    }
  }
  return em;
}

}  // namespace vqdemark::watershed
