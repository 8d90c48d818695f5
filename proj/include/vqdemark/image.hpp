#pragma once

#include <png.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vqdemark/error.hpp"

namespace vqdemark {

/// Row-major 8-bit grayscale raster.
class GrayImage {
 public:
  GrayImage() = default;

  GrayImage(std::size_t width, std::size_t height, std::uint8_t fill = 0)
      : width_(width), height_(height), data_(width * height, fill) {}

  GrayImage(std::size_t width, std::size_t height, std::vector<std::uint8_t> data)
      : width_(width), height_(height), data_(std::move(data)) {
    if (data_.size() != width_ * height_) {
      throw Error(ErrorCode::DimensionMismatch,
                  "pixel buffer holds " + std::to_string(data_.size()) + " values, expected " +
                      std::to_string(width_ * height_));
    }
  }

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  std::span<const std::uint8_t> pixels() const noexcept { return data_; }
  std::span<std::uint8_t> pixels() noexcept { return data_; }

  std::uint8_t at(std::size_t x, std::size_t y) const { return data_[y * width_ + x]; }
  std::uint8_t& at(std::size_t x, std::size_t y) { return data_[y * width_ + x]; }

  /// Edge-replicated access for coordinates outside the raster.
  std::uint8_t clamped(std::ptrdiff_t x, std::ptrdiff_t y) const {
    const auto cx = std::clamp<std::ptrdiff_t>(x, 0, static_cast<std::ptrdiff_t>(width_) - 1);
    const auto cy = std::clamp<std::ptrdiff_t>(y, 0, static_cast<std::ptrdiff_t>(height_) - 1);
    return data_[static_cast<std::size_t>(cy) * width_ + static_cast<std::size_t>(cx)];
  }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<std::uint8_t> data_;
};

struct Histogram {
  std::array<std::uint64_t, 256> counts{};
  std::uint64_t total = 0;
};

inline Histogram compute_histogram(const GrayImage& img) {
  Histogram h;
  for (auto v : img.pixels()) ++h.counts[v];
  h.total = img.size();
  return h;
}

enum class ImageFormat { Pgm, Png };

namespace detail {

inline std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::IoFailure, "read failed for " + path.string());
  return bytes;
}

inline bool is_png_signature(std::span<const std::uint8_t> bytes) {
  static constexpr std::array<std::uint8_t, 8> sig{0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
  return bytes.size() >= sig.size() && std::equal(sig.begin(), sig.end(), bytes.begin());
}

// Reads one unsigned decimal header field, skipping whitespace and '#' comments.
inline std::size_t pgm_header_field(std::span<const std::uint8_t> bytes, std::size_t& pos) {
  while (pos < bytes.size()) {
    if (bytes[pos] == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n' && bytes[pos] != '\r') ++pos;
    } else if (std::isspace(bytes[pos])) {
      ++pos;
    } else {
      break;
    }
  }
  if (pos >= bytes.size() || !std::isdigit(bytes[pos])) {
    throw Error(ErrorCode::MalformedFile, "bad PGM header field");
  }
  std::size_t value = 0;
  while (pos < bytes.size() && std::isdigit(bytes[pos])) {
    value = value * 10 + static_cast<std::size_t>(bytes[pos] - '0');
    if (value > (std::size_t{1} << 32)) throw Error(ErrorCode::MalformedFile, "PGM header value too large");
    ++pos;
  }
  return value;
}

inline GrayImage decode_pgm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
    throw Error(ErrorCode::MalformedFile, "expected binary PGM magic 'P5'");
  }
  std::size_t pos = 2;
  if (pos >= bytes.size() || !(std::isspace(bytes[pos]) || bytes[pos] == '#')) {
    throw Error(ErrorCode::MalformedFile, "missing separator after magic");
  }
  const std::size_t width = pgm_header_field(bytes, pos);
  const std::size_t height = pgm_header_field(bytes, pos);
  const std::size_t maxval = pgm_header_field(bytes, pos);
  if (width == 0 || height == 0) throw Error(ErrorCode::MalformedFile, "zero image dimension");
  if (maxval != 255) throw Error(ErrorCode::UnsupportedDepth, "maxval " + std::to_string(maxval) + " != 255");
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) {
    throw Error(ErrorCode::MalformedFile, "missing whitespace before raster");
  }
  ++pos;
  const std::size_t n = width * height;
  if (bytes.size() - pos < n) throw Error(ErrorCode::MalformedFile, "truncated PGM raster");
  auto first = bytes.begin() + static_cast<std::ptrdiff_t>(pos);
  return GrayImage(width, height, std::vector<std::uint8_t>(first, first + static_cast<std::ptrdiff_t>(n)));
}

inline std::vector<std::uint8_t> encode_pgm(const GrayImage& img) {
  const std::string header =
      "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), img.pixels().begin(), img.pixels().end());
  return out;
}

inline GrayImage decode_png(std::span<const std::uint8_t> bytes) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw Error(ErrorCode::MalformedFile, std::string("PNG header: ") + image.message);
  }
  constexpr auto rejected = PNG_FORMAT_FLAG_COLOR | PNG_FORMAT_FLAG_ALPHA | PNG_FORMAT_FLAG_LINEAR;
  if ((image.format & rejected) != 0) {
    png_image_free(&image);
    throw Error(ErrorCode::UnsupportedDepth, "only 8-bit single-channel PNG is supported");
  }
  image.format = PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> data(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, data.data(), 0, nullptr)) {
    throw Error(ErrorCode::MalformedFile, std::string("PNG raster: ") + image.message);
  }
  return GrayImage(image.width, image.height, std::move(data));
}

inline std::vector<std::uint8_t> encode_png(const GrayImage& img) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width());
  image.height = static_cast<png_uint_32>(img.height());
  image.format = PNG_FORMAT_GRAY;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, img.pixels().data(), 0, nullptr)) {
    throw Error(ErrorCode::IoFailure, std::string("PNG encode: ") + image.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, img.pixels().data(), 0, nullptr)) {
    throw Error(ErrorCode::IoFailure, std::string("PNG encode: ") + image.message);
  }
  out.resize(size);
  return out;
}

}  // namespace detail

/// Loads a binary PGM (P5, maxval 255) or an 8-bit grayscale PNG; the
/// format is chosen by content, not by extension.
inline GrayImage load_image(const std::filesystem::path& path) {
  const auto bytes = detail::read_file_bytes(path);
  if (detail::is_png_signature(bytes)) return detail::decode_png(bytes);
  return detail::decode_pgm(bytes);
}

inline void save_image(const GrayImage& img, const std::filesystem::path& path, ImageFormat format) {
  if (img.empty()) throw Error(ErrorCode::EmptyImage, "refusing to save an empty image");
  const auto bytes = format == ImageFormat::Png ? detail::encode_png(img) : detail::encode_pgm(img);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
}

/// PNG when the extension is .png (any case), PGM otherwise.
inline void save_image(const GrayImage& img, const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  save_image(img, path, ext == ".png" ? ImageFormat::Png : ImageFormat::Pgm);
}

/// Equalization lookup table in the cdf-min form: the lowest occupied bin
/// maps to 0, the highest to 255. A single occupied bin maps everything to 0.
inline std::array<std::uint8_t, 256> equalization_lut(const Histogram& h) {
  std::array<std::uint8_t, 256> lut{};
  std::uint64_t cdf_min = 0;
  for (auto c : h.counts) {
    if (c != 0) {
      cdf_min = c;
      break;
    }
  }
  const std::uint64_t denom = h.total - cdf_min;
  std::uint64_t cdf = 0;
  for (std::size_t v = 0; v < 256; ++v) {
    cdf += h.counts[v];
    if (denom == 0 || cdf < cdf_min) {
      lut[v] = 0;
      continue;
    }
    // round-half-up of 255 * (cdf - cdf_min) / denom in integer arithmetic
    lut[v] = static_cast<std::uint8_t>((2 * 255 * (cdf - cdf_min) + denom) / (2 * denom));
  }
  return lut;
}

inline GrayImage histogram_equalize(const GrayImage& img) {
  const auto lut = equalization_lut(compute_histogram(img));
  GrayImage out(img.width(), img.height());
  std::transform(img.pixels().begin(), img.pixels().end(), out.pixels().begin(),
                 [&](std::uint8_t v) { return lut[v]; });
  return out;
}

}  // namespace vqdemark
