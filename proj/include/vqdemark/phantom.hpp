#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "vqdemark/error.hpp"
#include "vqdemark/image.hpp"

namespace vqdemark {

/// Synthetic test image: a bright disc ("tumor") on a darker background,
/// both with Gaussian noise.
struct PhantomSpec {
  std::size_t width = 128;
  std::size_t height = 128;
  std::size_t tumor_cx = 64;
  std::size_t tumor_cy = 64;
  std::size_t tumor_r = 15;
  double bg_mean = 60.0;
  double tumor_mean = 200.0;
  double noise_sigma = 10.0;
  std::uint64_t seed = 1;

  void validate() const {
    if (width == 0 || height == 0) throw Error(ErrorCode::InvalidGeometry, "phantom needs positive dimensions");
    if (tumor_cx < tumor_r || tumor_cy < tumor_r || tumor_cx + tumor_r >= width || tumor_cy + tumor_r >= height) {
      throw Error(ErrorCode::InvalidGeometry, "disc does not fit inside the image");
    }
    if (bg_mean < 0.0 || bg_mean > 255.0 || tumor_mean < 0.0 || tumor_mean > 255.0) {
      throw Error(ErrorCode::InvalidGeometry, "means must lie in [0, 255]");
    }
    if (!(noise_sigma >= 0.0)) throw Error(ErrorCode::InvalidGeometry, "noise sigma must be >= 0");
  }

  bool in_disc(std::size_t x, std::size_t y) const {
    const auto dx = static_cast<std::int64_t>(x) - static_cast<std::int64_t>(tumor_cx);
    const auto dy = static_cast<std::int64_t>(y) - static_cast<std::int64_t>(tumor_cy);
    const auto r = static_cast<std::int64_t>(tumor_r);
    return dx * dx + dy * dy <= r * r;
  }
};

namespace detail {

// Standard normal via Box-Muller on mt19937_64 output; both engine and
// transform are fully specified, so streams agree across platforms.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

  double next() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace detail

inline GrayImage generate_phantom(const PhantomSpec& spec) {
  spec.validate();
  GrayImage img(spec.width, spec.height);
  detail::NormalStream noise(spec.seed);
  for (std::size_t y = 0; y < spec.height; ++y) {
    for (std::size_t x = 0; x < spec.width; ++x) {
      const double mean = spec.in_disc(x, y) ? spec.tumor_mean : spec.bg_mean;
      const double v = spec.noise_sigma > 0.0 ? mean + spec.noise_sigma * noise.next() : mean;
      img.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::round(v), 0.0, 255.0));
    }
  }
  return img;
}

/// 1 inside the disc, 0 outside.
inline std::vector<std::uint8_t> phantom_disc_mask(const PhantomSpec& spec) {
  std::vector<std::uint8_t> mask(spec.width * spec.height, 0);
  for (std::size_t y = 0; y < spec.height; ++y) {
    for (std::size_t x = 0; x < spec.width; ++x) mask[y * spec.width + x] = spec.in_disc(x, y) ? 1 : 0;
  }
  return mask;
}

}  // namespace vqdemark
