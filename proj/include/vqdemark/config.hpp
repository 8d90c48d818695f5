#pragma once

#include <bit>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>

#include "vqdemark/edges.hpp"
#include "vqdemark/error.hpp"
#include "vqdemark/glcm.hpp"
#include "vqdemark/phantom.hpp"
#include "vqdemark/vq.hpp"

namespace vqdemark {

enum class Emit { Clusters, Edges, Superimposed, Glcm, Watershed, Report };

inline const std::set<Emit>& all_emits() {
  static const std::set<Emit> all{Emit::Clusters, Emit::Edges,     Emit::Superimposed,
                                  Emit::Glcm,     Emit::Watershed, Emit::Report};
  return all;
}

struct PipelineConfig {
  std::size_t codebook_size = 128;
  std::size_t group_count = 8;
  std::size_t block_w = 4;
  std::size_t block_h = 3;
  vq::SplitParams split;
  glcm::Params glcm;
  CannyParams canny;
  double watershed_smooth = 0.0;  // Gaussian sigma before the gradient; 0 = off
  std::filesystem::path output_dir = "out";
  std::set<Emit> emit = all_emits();
  bool record_timings = false;
  std::optional<PhantomSpec> phantom;

  bool emits(Emit e) const { return emit.count(e) != 0; }

  /// Rejects anything the stages would reject later, as InvalidConfig.
  void validate() const {
    auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidConfig, msg); };
    if (codebook_size == 0 || !std::has_single_bit(codebook_size)) fail("codebook_size must be a power of two");
    if (group_count == 0 || !std::has_single_bit(group_count)) fail("groups must be a power of two");
    if (group_count > codebook_size) fail("groups must not exceed codebook_size");
    if (block_w == 0 || block_h == 0) fail("block sides must be >= 1");
    if (!(watershed_smooth >= 0.0)) fail("watershed_smooth must be >= 0");
    try {
      split.validate();
      glcm.validate();
      canny.validate();
      if (phantom) phantom->validate();
    } catch (const Error& e) {
      fail(e.what());
    }
  }
};

namespace config_detail {

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw Error(ErrorCode::InvalidConfig, "bad value '" + std::string(text) + "' for " + std::string(key));
  }
  return value;
}

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw Error(ErrorCode::InvalidConfig, "bad boolean '" + std::string(text) + "' for " + std::string(key));
}

}  // namespace config_detail

/// "4x3" -> {4, 3}.
inline std::pair<std::size_t, std::size_t> parse_block(std::string_view text) {
  const auto x = text.find_first_of("xX");
  if (x == std::string_view::npos) throw Error(ErrorCode::InvalidConfig, "block must look like WxH");
  return {config_detail::parse_number<std::size_t>("block", text.substr(0, x)),
          config_detail::parse_number<std::size_t>("block", text.substr(x + 1))};
}

inline glcm::Angle parse_angle(std::string_view text) {
  if (text == "0") return glcm::Angle::Deg0;
  if (text == "45") return glcm::Angle::Deg45;
  if (text == "90") return glcm::Angle::Deg90;
  if (text == "135") return glcm::Angle::Deg135;
  throw Error(ErrorCode::InvalidConfig, "angle must be one of 0, 45, 90, 135");
}

inline int angle_degrees(glcm::Angle a) {
  switch (a) {
    case glcm::Angle::Deg0: return 0;
    case glcm::Angle::Deg45: return 45;
    case glcm::Angle::Deg90: return 90;
    case glcm::Angle::Deg135: return 135;
  }
  return 0;
}

inline std::string_view to_string(Emit e) {
  switch (e) {
    case Emit::Clusters: return "clusters";
    case Emit::Edges: return "edges";
    case Emit::Superimposed: return "superimposed";
    case Emit::Glcm: return "glcm";
    case Emit::Watershed: return "watershed";
    case Emit::Report: return "report";
  }
  return "";
}

/// Comma-separated emit list; "all" selects everything, "none" nothing.
inline std::set<Emit> parse_emit(std::string_view text) {
  std::set<Emit> out;
  std::stringstream ss{std::string(text)};
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = config_detail::trim(item);
    if (item.empty() || item == "none") continue;
    if (item == "all") {
      out = all_emits();
      continue;
    }
    bool matched = false;
    for (auto e : all_emits()) {
      if (to_string(e) == item) {
        out.insert(e);
        matched = true;
      }
    }
    if (!matched) throw Error(ErrorCode::InvalidConfig, "unknown emit item '" + item + "'");
  }
  return out;
}

/// Applies one `key = value` setting.
inline void apply_setting(PipelineConfig& cfg, const std::string& key, const std::string& raw) {
  using config_detail::parse_number;
  const std::string value = config_detail::trim(raw);
  if (key == "codebook_size") {
    cfg.codebook_size = parse_number<std::size_t>(key, value);
  } else if (key == "groups") {
    cfg.group_count = parse_number<std::size_t>(key, value);
  } else if (key == "block") {
    std::tie(cfg.block_w, cfg.block_h) = parse_block(value);
  } else if (key == "epsilon") {
    cfg.split.epsilon = parse_number<double>(key, value);
  } else if (key == "lloyd_tol") {
    cfg.split.lloyd_tol = parse_number<double>(key, value);
  } else if (key == "max_lloyd_iters") {
    cfg.split.max_lloyd_iters = parse_number<std::size_t>(key, value);
  } else if (key == "window") {
    cfg.glcm.window = parse_number<std::size_t>(key, value);
  } else if (key == "levels") {
    cfg.glcm.levels = parse_number<std::size_t>(key, value);
  } else if (key == "distance") {
    cfg.glcm.distance = parse_number<std::size_t>(key, value);
  } else if (key == "angle") {
    cfg.glcm.angle = parse_angle(value);
  } else if (key == "symmetric") {
    cfg.glcm.symmetric = config_detail::parse_bool(key, value);
  } else if (key == "sigma") {
    cfg.canny.sigma = parse_number<double>(key, value);
  } else if (key == "low") {
    cfg.canny.low = parse_number<double>(key, value);
  } else if (key == "high") {
    cfg.canny.high = parse_number<double>(key, value);
  } else if (key == "watershed_smooth") {
    cfg.watershed_smooth = parse_number<double>(key, value);
  } else if (key == "out") {
    cfg.output_dir = value;
  } else if (key == "emit") {
    cfg.emit = parse_emit(value);
  } else if (key == "timings") {
    cfg.record_timings = config_detail::parse_bool(key, value);
  } else {
    throw Error(ErrorCode::InvalidConfig, "unknown config key '" + key + "'");
  }
}

/// Reads an INI-style file of top-level `key = value` lines into `cfg`.
/// Section headers are not allowed.
inline void load_config(const std::filesystem::path& path, PipelineConfig& cfg) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path.string(), tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    if (!std::filesystem::exists(path)) throw Error(ErrorCode::IoFailure, "cannot read config " + path.string());
    throw Error(ErrorCode::InvalidConfig, e.what());
  }
  for (const auto& [key, node] : tree) {
    if (!node.empty()) throw Error(ErrorCode::InvalidConfig, "sections are not supported: [" + key + "]");
    apply_setting(cfg, key, node.data());
  }
}

}  // namespace vqdemark
