#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "vqdemark/error.hpp"
#include "vqdemark/feature_map.hpp"
#include "vqdemark/image.hpp"

namespace vqdemark {

/// Plain double raster used between filter stages.
struct RealImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> values;

  RealImage() = default;
  RealImage(std::size_t w, std::size_t h) : width(w), height(h), values(w * h, 0.0) {}

  static RealImage from(const GrayImage& img) {
    RealImage r(img.width(), img.height());
    std::copy(img.pixels().begin(), img.pixels().end(), r.values.begin());
    return r;
  }

  double at(std::size_t x, std::size_t y) const { return values[y * width + x]; }
  double& at(std::size_t x, std::size_t y) { return values[y * width + x]; }

  double clamped(std::ptrdiff_t x, std::ptrdiff_t y) const {
    const auto cx = std::clamp<std::ptrdiff_t>(x, 0, static_cast<std::ptrdiff_t>(width) - 1);
    const auto cy = std::clamp<std::ptrdiff_t>(y, 0, static_cast<std::ptrdiff_t>(height) - 1);
    return values[static_cast<std::size_t>(cy) * width + static_cast<std::size_t>(cx)];
  }
};

inline std::vector<double> gaussian_kernel(double sigma) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::InvalidParameter, "gaussian sigma must be > 0");
  const auto radius = static_cast<std::ptrdiff_t>(std::ceil(3.0 * sigma));
  std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (std::ptrdiff_t i = -radius; i <= radius; ++i) {
    const double w = std::exp(-static_cast<double>(i * i) / (2.0 * sigma * sigma));
    k[static_cast<std::size_t>(i + radius)] = w;
    sum += w;
  }
  for (auto& w : k) w /= sum;
  return k;
}

/// Separable Gaussian blur, radius ceil(3 sigma), edge-replicated borders.
inline RealImage gaussian_blur(const RealImage& src, double sigma) {
  const auto k = gaussian_kernel(sigma);
  const auto r = static_cast<std::ptrdiff_t>(k.size() / 2);
  RealImage tmp(src.width, src.height);
  for (std::size_t y = 0; y < src.height; ++y) {
    for (std::size_t x = 0; x < src.width; ++x) {
      double acc = 0.0;
      for (std::ptrdiff_t i = -r; i <= r; ++i) {
        acc += k[static_cast<std::size_t>(i + r)] *
               src.clamped(static_cast<std::ptrdiff_t>(x) + i, static_cast<std::ptrdiff_t>(y));
      }
      tmp.at(x, y) = acc;
    }
  }
  RealImage out(src.width, src.height);
  for (std::size_t y = 0; y < src.height; ++y) {
    for (std::size_t x = 0; x < src.width; ++x) {
      double acc = 0.0;
      for (std::ptrdiff_t i = -r; i <= r; ++i) {
        acc += k[static_cast<std::size_t>(i + r)] *
               tmp.clamped(static_cast<std::ptrdiff_t>(x), static_cast<std::ptrdiff_t>(y) + i);
      }
      out.at(x, y) = acc;
    }
  }
  return out;
}

struct SobelResponse {
  RealImage gx;
  RealImage gy;
  RealImage magnitude;
};

/// 3x3 Sobel. gx grows to the right, gy grows downward.
inline SobelResponse sobel(const RealImage& src) {
  if (src.width < 3 || src.height < 3) {
    throw Error(ErrorCode::ImageSmallerThanKernel, "Sobel needs at least 3x3 pixels");
  }
  SobelResponse s{RealImage(src.width, src.height), RealImage(src.width, src.height),
                  RealImage(src.width, src.height)};
  for (std::size_t y = 0; y < src.height; ++y) {
    for (std::size_t x = 0; x < src.width; ++x) {
      const auto ix = static_cast<std::ptrdiff_t>(x);
      const auto iy = static_cast<std::ptrdiff_t>(y);
      auto p = [&](std::ptrdiff_t dx, std::ptrdiff_t dy) { return src.clamped(ix + dx, iy + dy); };
      const double gx = (p(1, -1) + 2.0 * p(1, 0) + p(1, 1)) - (p(-1, -1) + 2.0 * p(-1, 0) + p(-1, 1));
      const double gy = (p(-1, 1) + 2.0 * p(0, 1) + p(1, 1)) - (p(-1, -1) + 2.0 * p(0, -1) + p(1, -1));
      s.gx.at(x, y) = gx;
      s.gy.at(x, y) = gy;
      s.magnitude.at(x, y) = std::sqrt(gx * gx + gy * gy);
    }
  }
  return s;
}

}  // namespace vqdemark
