#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <utility>
#include <vector>

#include "vqdemark/error.hpp"
#include "vqdemark/filter.hpp"
#include "vqdemark/image.hpp"

namespace vqdemark {

/// Binary per-pixel mask; nonzero = edge.
struct EdgeMap {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> mask;

  EdgeMap() = default;
  EdgeMap(std::size_t w, std::size_t h) : width(w), height(h), mask(w * h, 0) {}

  bool at(std::size_t x, std::size_t y) const { return mask[y * width + x] != 0; }
  std::size_t count() const {
    return static_cast<std::size_t>(std::count_if(mask.begin(), mask.end(), [](auto v) { return v != 0; }));
  }
};

/// Edge pixels white on black.
inline GrayImage render_edges(const EdgeMap& em) {
  GrayImage out(em.width, em.height);
  for (std::size_t i = 0; i < em.mask.size(); ++i) out.pixels()[i] = em.mask[i] ? 255 : 0;
  return out;
}

/// Copy of the original with edge pixels forced to 255.
inline GrayImage superimpose(const GrayImage& original, const EdgeMap& em) {
  if (original.width() != em.width || original.height() != em.height) {
    throw Error(ErrorCode::DimensionMismatch, "edge map and image dimensions differ");
  }
  GrayImage out = original;
  for (std::size_t i = 0; i < em.mask.size(); ++i) {
    if (em.mask[i]) out.pixels()[i] = 255;
  }
  return out;
}

namespace canny_detail {

// Gradient direction sectors, named by the axis along which NMS compares.
enum Sector : std::uint8_t { kHorizontal = 0, kDiagonalDown = 1, kVertical = 2, kDiagonalUp = 3 };

inline Sector sector_of(double gx, double gy) {
  double deg = std::atan2(gy, gx) * 180.0 / std::numbers::pi;
  if (deg < 0.0) deg += 180.0;
  if (deg < 22.5 || deg >= 157.5) return kHorizontal;
  if (deg < 67.5) return kDiagonalDown;
  if (deg < 112.5) return kVertical;
  return kDiagonalUp;
}

// Step (dx, dy) along the quantized gradient direction; y grows downward.
inline std::pair<int, int> step_of(Sector s) {
  switch (s) {
    case kHorizontal: return {1, 0};
    case kDiagonalDown: return {1, 1};
    case kVertical: return {0, 1};
    case kDiagonalUp: return {1, -1};
  }
  return {1, 0};
}

}  // namespace canny_detail

struct CannyParams {
  double sigma = 1.4;
  double low = 0.1;
  double high = 0.3;

  void validate() const {
    if (!(sigma > 0.0)) throw Error(ErrorCode::InvalidParameter, "canny sigma must be > 0");
    if (!(low > 0.0 && low <= high && high <= 1.0)) {
      throw Error(ErrorCode::InvalidParameter, "canny thresholds need 0 < low <= high <= 1");
    }
  }
};

/// Every intermediate product of the detector, exposed for inspection.
struct CannyStages {
  RealImage magnitude;
  std::vector<std::uint8_t> sector;
  EdgeMap candidates;  // after non-maximum suppression
  EdgeMap edges;       // after hysteresis
  double max_magnitude = 0.0;
};

inline CannyStages canny_stages(const GrayImage& img, const CannyParams& p) {
  p.validate();
  if (img.width() < 3 || img.height() < 3) {
    throw Error(ErrorCode::ImageSmallerThanKernel, "canny needs at least 3x3 pixels");
  }
  const std::size_t w = img.width();
  const std::size_t h = img.height();
  auto grad = sobel(gaussian_blur(RealImage::from(img), p.sigma));

  CannyStages st;
  st.magnitude = std::move(grad.magnitude);
  st.sector.resize(w * h);
  st.candidates = EdgeMap(w, h);
  st.edges = EdgeMap(w, h);
  for (std::size_t i = 0; i < w * h; ++i) {
    st.sector[i] = canny_detail::sector_of(grad.gx.values[i], grad.gy.values[i]);
    st.max_magnitude = std::max(st.max_magnitude, st.magnitude.values[i]);
  }
  if (!(st.max_magnitude > 0.0)) return st;

  // Strict against the backward neighbour, non-strict against the forward
  // one, so a ridge two pixels wide with equal peaks keeps a single pixel.
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const double m = st.magnitude.at(x, y);
      if (m <= 0.0) continue;
      const auto [dx, dy] = canny_detail::step_of(static_cast<canny_detail::Sector>(st.sector[y * w + x]));
      const auto ix = static_cast<std::ptrdiff_t>(x);
      const auto iy = static_cast<std::ptrdiff_t>(y);
      const double forward = st.magnitude.clamped(ix + dx, iy + dy);
      const double backward = st.magnitude.clamped(ix - dx, iy - dy);
      const bool fwd_in = ix + dx >= 0 && ix + dx < static_cast<std::ptrdiff_t>(w) && iy + dy >= 0 &&
                          iy + dy < static_cast<std::ptrdiff_t>(h);
      const bool bwd_in = ix - dx >= 0 && ix - dx < static_cast<std::ptrdiff_t>(w) && iy - dy >= 0 &&
                          iy - dy < static_cast<std::ptrdiff_t>(h);
      const bool beats_backward = !bwd_in || m > backward;
      const bool beats_forward = !fwd_in || m >= forward;
      if (beats_backward && beats_forward) st.candidates.mask[y * w + x] = 1;
    }
  }

  const double hi = p.high * st.max_magnitude;
  const double lo = p.low * st.max_magnitude;
  std::vector<std::size_t> stack;
  for (std::size_t i = 0; i < w * h; ++i) {
    if (st.candidates.mask[i] && st.magnitude.values[i] >= hi) {
      st.edges.mask[i] = 1;
      stack.push_back(i);
    }
  }
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    const auto x = static_cast<std::ptrdiff_t>(i % w);
    const auto y = static_cast<std::ptrdiff_t>(i / w);
    for (std::ptrdiff_t dy = -1; dy <= 1; ++dy) {
      for (std::ptrdiff_t dx = -1; dx <= 1; ++dx) {
        const auto nx = x + dx;
        const auto ny = y + dy;
        if (nx < 0 || ny < 0 || nx >= static_cast<std::ptrdiff_t>(w) || ny >= static_cast<std::ptrdiff_t>(h)) continue;
        const auto j = static_cast<std::size_t>(ny) * w + static_cast<std::size_t>(nx);
        if (st.edges.mask[j] || !st.candidates.mask[j] || st.magnitude.values[j] < lo) continue;
        st.edges.mask[j] = 1;
        stack.push_back(j);
      }
    }
  }
  return st;
}

inline EdgeMap canny(const GrayImage& img, const CannyParams& p) { return canny_stages(img, p).edges; }

}  // namespace vqdemark
