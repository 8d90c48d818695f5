#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "vqdemark/error.hpp"
#include "vqdemark/feature_map.hpp"
#include "vqdemark/image.hpp"
#include "vqdemark/parallel.hpp"

namespace vqdemark::glcm {

enum class Angle { Deg0, Deg45, Deg90, Deg135 };

struct Params {
  std::size_t distance = 1;
  Angle angle = Angle::Deg0;
  std::size_t levels = 32;
  std::size_t window = 5;
  bool symmetric = true;

  void validate() const {
    if (window < 3 || window % 2 == 0) throw Error(ErrorCode::InvalidParameter, "window must be odd and >= 3");
    if (levels < 2 || levels > 256) throw Error(ErrorCode::InvalidParameter, "levels must be in [2, 256]");
    if (distance < 1 || distance >= window) throw Error(ErrorCode::InvalidParameter, "distance must be in [1, window)");
  }

  // Pixel offset (dx, dy) of the second pixel of a pair; y grows downward.
  std::pair<std::ptrdiff_t, std::ptrdiff_t> offset() const {
    const auto d = static_cast<std::ptrdiff_t>(distance);
    switch (angle) {
      case Angle::Deg0: return {d, 0};
      case Angle::Deg45: return {d, -d};
      case Angle::Deg90: return {0, -d};
      case Angle::Deg135: return {-d, -d};
    }
    return {d, 0};
  }
};

/// Normalized co-occurrence matrix, row index = first pixel's level.
struct Matrix {
  std::size_t levels = 0;
  std::vector<double> p;
  Params params;

  double at(std::size_t i, std::size_t j) const { return p[i * levels + j]; }
};

struct Stats {
  double mu_x = 0.0;
  double mu_y = 0.0;
  double sigma_x = 0.0;
  double sigma_y = 0.0;
};

inline std::uint8_t quantize(std::uint8_t v, std::size_t levels) {
  return static_cast<std::uint8_t>(static_cast<std::size_t>(v) * levels / 256);
}

/// Co-occurrence matrix of every in-region pair at the configured offset
/// (plus the reversed pair when symmetric), normalized to sum to one.
inline Matrix compute_glcm(const GrayImage& region, const Params& params) {
  params.validate();
  const auto [dx, dy] = params.offset();
  const std::size_t L = params.levels;
  std::vector<std::uint64_t> counts(L * L, 0);
  std::uint64_t total = 0;
  const auto w = static_cast<std::ptrdiff_t>(region.width());
  const auto h = static_cast<std::ptrdiff_t>(region.height());
  for (std::ptrdiff_t y = 0; y < h; ++y) {
    const std::ptrdiff_t ny = y + dy;
    if (ny < 0 || ny >= h) continue;
    for (std::ptrdiff_t x = 0; x < w; ++x) {
      const std::ptrdiff_t nx = x + dx;
      if (nx < 0 || nx >= w) continue;
      const std::size_t a = quantize(region.at(static_cast<std::size_t>(x), static_cast<std::size_t>(y)), L);
      const std::size_t b = quantize(region.at(static_cast<std::size_t>(nx), static_cast<std::size_t>(ny)), L);
      ++counts[a * L + b];
      ++total;
      if (params.symmetric) {
        ++counts[b * L + a];
        ++total;
      }
    }
  }
  if (total == 0) {
    throw Error(ErrorCode::NoPairs, "no pixel pairs at distance " + std::to_string(params.distance) + " in a " +
                                        std::to_string(region.width()) + "x" + std::to_string(region.height()) +
                                        " region");
  }
  Matrix m;
  m.levels = L;
  m.params = params;
  m.p.resize(L * L);
  const double inv = 1.0 / static_cast<double>(total);
  for (std::size_t k = 0; k < counts.size(); ++k) m.p[k] = static_cast<double>(counts[k]) * inv;
  return m;
}

inline Stats glcm_stats(const Matrix& m) {
  Stats s;
  const std::size_t L = m.levels;
  for (std::size_t i = 0; i < L; ++i) {
    for (std::size_t j = 0; j < L; ++j) {
      const double p = m.p[i * L + j];
      s.mu_x += static_cast<double>(i) * p;
      s.mu_y += static_cast<double>(j) * p;
    }
  }
  double vx = 0.0;
  double vy = 0.0;
  for (std::size_t i = 0; i < L; ++i) {
    for (std::size_t j = 0; j < L; ++j) {
      const double p = m.p[i * L + j];
      vx += (static_cast<double>(i) - s.mu_x) * (static_cast<double>(i) - s.mu_x) * p;
      vy += (static_cast<double>(j) - s.mu_y) * (static_cast<double>(j) - s.mu_y) * p;
    }
  }
  s.sigma_x = std::sqrt(vx);
  s.sigma_y = std::sqrt(vy);
  return s;
}

inline double max_probability(const Matrix& m) { return *std::max_element(m.p.begin(), m.p.end()); }

/// Haralick variance: sum (i - mu)^2 P_ij with mu the row-level mean.
inline double glcm_variance(const Matrix& m) {
  const std::size_t L = m.levels;
  double mu = 0.0;
  for (std::size_t i = 0; i < L; ++i) {
    for (std::size_t j = 0; j < L; ++j) mu += static_cast<double>(i) * m.p[i * L + j];
  }
  double var = 0.0;
  for (std::size_t i = 0; i < L; ++i) {
    const double d = static_cast<double>(i) - mu;
    for (std::size_t j = 0; j < L; ++j) var += d * d * m.p[i * L + j];
  }
  return var;
}

/// Zero when either marginal has no spread.
inline double glcm_correlation(const Matrix& m, const Stats& s) {
  const double denom = s.sigma_x * s.sigma_y;
  if (denom == 0.0) return 0.0;
  const std::size_t L = m.levels;
  double acc = 0.0;
  for (std::size_t i = 0; i < L; ++i) {
    for (std::size_t j = 0; j < L; ++j) {
      acc += (static_cast<double>(i) - s.mu_x) * (static_cast<double>(j) - s.mu_y) * m.p[i * L + j];
    }
  }
  return acc / denom;
}

inline double glcm_correlation(const Matrix& m) { return glcm_correlation(m, glcm_stats(m)); }

/// Shannon entropy in bits, 0 log 0 = 0.
inline double glcm_entropy(const Matrix& m) {
  double h = 0.0;
  for (double p : m.p) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

inline double evaluate(const Matrix& m, FeatureKind kind) {
  switch (kind) {
    case FeatureKind::MaxProbability: return max_probability(m);
    case FeatureKind::Variance: return glcm_variance(m);
    case FeatureKind::Correlation: return glcm_correlation(m);
    case FeatureKind::Entropy: return glcm_entropy(m);
    case FeatureKind::GradientMagnitude: break;
  }
  throw Error(ErrorCode::InvalidParameter, "not a co-occurrence feature");
}

/// The w x w window centred on (cx, cy), edge-replicated past the border.
inline GrayImage window_at(const GrayImage& img, std::size_t cx, std::size_t cy, std::size_t window) {
  GrayImage win(window, window);
  const auto half = static_cast<std::ptrdiff_t>(window / 2);
  for (std::size_t y = 0; y < window; ++y) {
    for (std::size_t x = 0; x < window; ++x) {
      win.at(x, y) = img.clamped(static_cast<std::ptrdiff_t>(cx) + static_cast<std::ptrdiff_t>(x) - half,
                                 static_cast<std::ptrdiff_t>(cy) + static_cast<std::ptrdiff_t>(y) - half);
    }
  }
  return win;
}

/// Per-pixel feature of the co-occurrence matrix of the centred window.
/// Rows are computed independently, so the result does not depend on the
/// worker count.
inline FeatureMap feature_map(const GrayImage& img, const Params& params, FeatureKind kind) {
  params.validate();
  if (img.width() < params.window || img.height() < params.window) {
    throw Error(ErrorCode::ImageSmallerThanWindow, "image " + std::to_string(img.width()) + "x" +
                                                       std::to_string(img.height()) + " is smaller than window " +
                                                       std::to_string(params.window));
  }
  FeatureMap map(img.width(), img.height(), kind);
  parallel_for(img.height(), [&](std::size_t y0, std::size_t y1) {
    for (std::size_t y = y0; y < y1; ++y) {
      for (std::size_t x = 0; x < img.width(); ++x) {
        map.at(x, y) = evaluate(compute_glcm(window_at(img, x, y, params.window), params), kind);
      }
    }
  });
  return map;
}

}  // namespace vqdemark::glcm
