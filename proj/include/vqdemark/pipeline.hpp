#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "vqdemark/config.hpp"
#include "vqdemark/edges.hpp"
#include "vqdemark/glcm.hpp"
#include "vqdemark/image.hpp"
#include "vqdemark/metrics.hpp"
#include "vqdemark/parallel.hpp"
#include "vqdemark/phantom.hpp"
#include "vqdemark/vq.hpp"
#include "vqdemark/watershed.hpp"

namespace vqdemark {

/// Connected components smaller than this are ignored when counting segments.
inline constexpr std::size_t kMinSegmentPixels = 9;

struct PhantomMetrics {
  std::size_t best_group = 0;
  double tumor_capture_fraction = 0.0;         // disc pixels kept by the best group
  std::vector<double> capture_per_group;
  std::size_t groups_capturing_95 = 0;          // groups holding >= 95% of the disc
  double boundary_recall_2px = 0.0;             // disc boundary within 2 px of a best-group edge
  std::size_t best_group_segments = 0;
};

struct ComparisonReport {
  std::size_t width = 0;
  std::size_t height = 0;
  std::string source;

  std::size_t codebook_size = 0;
  std::size_t group_count = 0;
  std::size_t block_w = 0;
  std::size_t block_h = 0;
  double codebook_distortion = 0.0;
  double requantization_distortion = 0.0;
  std::size_t occupied_groups = 0;
  std::vector<std::size_t> group_pixel_counts;
  std::vector<std::size_t> group_segments;

  std::size_t glcm_segments = 0;
  std::size_t glcm_edge_pixels = 0;

  std::size_t watershed_regions = 0;
  std::size_t watershed_edge_pixels = 0;

  std::optional<PhantomMetrics> phantom;
  std::map<std::string, double> timings_ms;  // stage -> wall-clock ms
};

/// Everything one pipeline run computes, before anything is written.
struct PipelineProducts {
  GrayImage input;
  vq::TrainingSet training;
  vq::LbgResult lbg;
  vq::RequantizeResult groups;
  std::vector<std::size_t> group_raster;
  std::vector<GrayImage> clusters;
  std::vector<EdgeMap> cluster_edges;
  std::vector<GrayImage> overlays;
  FeatureMap probability;
  FeatureMap entropy;
  GrayImage probability_img;
  GrayImage probability_eq;
  GrayImage entropy_img;
  GrayImage entropy_eq;
  EdgeMap glcm_edges;
  watershed::LabelMap watershed_labels;
  EdgeMap watershed_edges;
  ComparisonReport report;
};

namespace pipeline_detail {

class StageClock {
 public:
  explicit StageClock(std::map<std::string, double>& sink) : sink_(sink) {}

  template <typename Fn>
  decltype(auto) time(const std::string& stage, Fn&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    struct Record {
      std::map<std::string, double>& sink;
      std::string stage;
      std::chrono::steady_clock::time_point t0;
      ~Record() {
        sink[stage] += std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      }
    } record{sink_, stage, t0};
    return fn();
  }

 private:
  std::map<std::string, double>& sink_;
};

inline PhantomMetrics phantom_metrics(const PhantomSpec& spec, const PipelineProducts& out) {
  const auto disc = phantom_disc_mask(spec);
  const std::size_t w = spec.width;
  const std::size_t h = spec.height;
  const std::size_t groups = out.clusters.size();
  std::vector<std::size_t> kept(groups, 0);
  std::size_t disc_pixels = 0;
  for (std::size_t p = 0; p < disc.size(); ++p) {
    if (!disc[p]) continue;
    ++disc_pixels;
    ++kept[out.group_raster[p]];
  }
  PhantomMetrics m;
  for (std::size_t g = 0; g < groups; ++g) {
    const double f = disc_pixels == 0 ? 0.0 : static_cast<double>(kept[g]) / static_cast<double>(disc_pixels);
    m.capture_per_group.push_back(f);
    if (f >= 0.95) ++m.groups_capturing_95;
    if (kept[g] > kept[m.best_group]) m.best_group = g;
  }
  m.tumor_capture_fraction = m.capture_per_group[m.best_group];
  m.boundary_recall_2px = metrics::boundary_recall(metrics::boundary_of(disc, w, h), out.cluster_edges[m.best_group], 2.0);
  m.best_group_segments = out.report.group_segments[m.best_group];
  return m;
}

}  // namespace pipeline_detail

/// Runs every stage on an in-memory image: VQ segmentation into groups,
/// Canny on each cluster image and its overlay, GLCM probability/entropy
/// maps with their equalized renderings, and the watershed baseline.
inline PipelineProducts analyze(const GrayImage& input, const PipelineConfig& cfg, std::string source = "memory") {
  cfg.validate();
  if (input.empty()) throw Error(ErrorCode::EmptyImage, "input image is empty");
  PipelineProducts out;
  out.input = input;
  auto& rep = out.report;
  pipeline_detail::StageClock clock(rep.timings_ms);
  rep.width = input.width();
  rep.height = input.height();
  rep.source = std::move(source);
  rep.codebook_size = cfg.codebook_size;
  rep.group_count = cfg.group_count;
  rep.block_w = cfg.block_w;
  rep.block_h = cfg.block_h;

  out.training = clock.time("vq_extract", [&] { return vq::extract_training_vectors(input, cfg.block_w, cfg.block_h); });
  if (out.training.vectors.size() < cfg.codebook_size) {
    throw Error(ErrorCode::InvalidConfig, "image yields " + std::to_string(out.training.vectors.size()) +
                                              " blocks, fewer than codebook_size " +
                                              std::to_string(cfg.codebook_size));
  }
  out.lbg = clock.time("vq_lbg", [&] { return vq::lbg_generate(out.training, cfg.codebook_size, cfg.split); });
  out.groups = clock.time("vq_requantize",
                          [&] { return vq::requantize_detailed(out.lbg.codebook, cfg.group_count, cfg.split); });
  clock.time("vq_cluster_images", [&] {
    out.group_raster = vq::group_raster(out.training.geometry, input.width(), input.height(), out.lbg.assignment,
                                        out.groups.groups);
    out.clusters = vq::cluster_images(input, out.training.geometry, out.lbg.assignment, out.groups.groups);
  });
  rep.codebook_distortion = out.lbg.codebook.distortion;
  rep.requantization_distortion = out.groups.group_codebook.distortion;

  rep.group_pixel_counts.assign(cfg.group_count, 0);
  for (auto g : out.group_raster) ++rep.group_pixel_counts[g];
  for (std::size_t g = 0; g < cfg.group_count; ++g) {
    if (rep.group_pixel_counts[g] > 0) ++rep.occupied_groups;
    std::vector<std::uint8_t> mask(out.group_raster.size());
    for (std::size_t p = 0; p < mask.size(); ++p) mask[p] = out.group_raster[p] == g ? 1 : 0;
    rep.group_segments.push_back(metrics::count_components(mask, input.width(), input.height(), kMinSegmentPixels,
                                                           metrics::Connectivity::Eight));
  }

  const bool edges_possible = input.width() >= 3 && input.height() >= 3;
  clock.time("canny", [&] {
    out.cluster_edges.assign(cfg.group_count, EdgeMap(input.width(), input.height()));
    if (!edges_possible) return;
    parallel_for(cfg.group_count, [&](std::size_t g0, std::size_t g1) {
      for (std::size_t g = g0; g < g1; ++g) out.cluster_edges[g] = canny(out.clusters[g], cfg.canny);
    });
  });
  for (const auto& em : out.cluster_edges) out.overlays.push_back(superimpose(input, em));

  if (input.width() >= cfg.glcm.window && input.height() >= cfg.glcm.window) {
    clock.time("glcm", [&] {
      out.probability = glcm::feature_map(input, cfg.glcm, FeatureKind::MaxProbability);
      out.entropy = glcm::feature_map(input, cfg.glcm, FeatureKind::Entropy);
      out.probability_img = render_feature(out.probability);
      out.probability_eq = histogram_equalize(out.probability_img);
      out.entropy_img = render_feature(out.entropy);
      out.entropy_eq = histogram_equalize(out.entropy_img);
      out.glcm_edges = edges_possible ? canny(out.entropy_eq, cfg.canny) : EdgeMap(input.width(), input.height());
    });
    std::vector<std::uint8_t> open(out.glcm_edges.mask.size());
    for (std::size_t p = 0; p < open.size(); ++p) open[p] = out.glcm_edges.mask[p] ? 0 : 1;
    rep.glcm_segments = metrics::count_components(open, input.width(), input.height(), kMinSegmentPixels,
                                                  metrics::Connectivity::Four);
    rep.glcm_edge_pixels = out.glcm_edges.count();
  }

  if (edges_possible) {
    clock.time("watershed", [&] {
      out.watershed_labels = watershed::watershed_segment(watershed::gradient_magnitude(input, cfg.watershed_smooth));
      out.watershed_edges = watershed::watershed_edges(out.watershed_labels);
    });
    rep.watershed_regions = out.watershed_labels.region_count;
    rep.watershed_edge_pixels = out.watershed_edges.count();
  }

  if (cfg.phantom) rep.phantom = pipeline_detail::phantom_metrics(*cfg.phantom, out);
  return out;
}

/// report.json document. Every key is always present; optional sections
/// are null when not applicable.
inline nlohmann::ordered_json report_to_json(const ComparisonReport& r, bool include_timings) {
  nlohmann::ordered_json j;
  j["input"] = {{"source", r.source}, {"width", r.width}, {"height", r.height}};
  j["vq"] = {{"codebook_size", r.codebook_size},
             {"group_count", r.group_count},
             {"block_w", r.block_w},
             {"block_h", r.block_h},
             {"codebook_distortion", r.codebook_distortion},
             {"requantization_distortion", r.requantization_distortion},
             {"occupied_groups", r.occupied_groups},
             {"group_pixel_counts", r.group_pixel_counts},
             {"group_segments", r.group_segments}};
  j["glcm"] = {{"feature", "entropy"}, {"segments", r.glcm_segments}, {"edge_pixels", r.glcm_edge_pixels}};
  j["watershed"] = {{"region_count", r.watershed_regions}, {"edge_pixels", r.watershed_edge_pixels}};
  if (r.phantom) {
    const auto& p = *r.phantom;
    j["phantom"] = {{"best_group", p.best_group},
                    {"tumor_capture_fraction", p.tumor_capture_fraction},
                    {"capture_per_group", p.capture_per_group},
                    {"groups_capturing_95", p.groups_capturing_95},
                    {"boundary_recall_2px", p.boundary_recall_2px},
                    {"best_group_segments", p.best_group_segments}};
  } else {
    j["phantom"] = nullptr;
  }
  j["segment_counts"] = {{"vq_groups", r.occupied_groups},
                         {"vq_best_group_segments", r.phantom ? nlohmann::ordered_json(r.phantom->best_group_segments)
                                                              : nlohmann::ordered_json(nullptr)},
                         {"glcm_segments", r.glcm_segments},
                         {"watershed_regions", r.watershed_regions}};
  if (include_timings) {
    j["timings_ms"] = r.timings_ms;
  } else {
    j["timings_ms"] = nullptr;
  }
  return j;
}

/// Writes the requested outputs into cfg.output_dir, which must exist.
inline void write_products(const PipelineProducts& out, const PipelineConfig& cfg) {
  const auto& dir = cfg.output_dir;
  if (!std::filesystem::is_directory(dir)) throw Error(ErrorCode::IoFailure, "output directory " + dir.string() + " does not exist");
  const std::size_t groups = out.clusters.size();
  for (std::size_t g = 0; g < groups; ++g) {
    const auto suffix = std::to_string(g) + ".pgm";
    if (cfg.emits(Emit::Clusters)) save_image(out.clusters[g], dir / ("cluster_" + suffix), ImageFormat::Pgm);
    if (cfg.emits(Emit::Edges)) save_image(render_edges(out.cluster_edges[g]), dir / ("edges_" + suffix), ImageFormat::Pgm);
    if (cfg.emits(Emit::Superimposed)) save_image(out.overlays[g], dir / ("overlay_" + suffix), ImageFormat::Pgm);
  }
  if (cfg.emits(Emit::Glcm) && !out.entropy.values.empty()) {
    save_image(out.probability_img, dir / "glcm_probability.pgm", ImageFormat::Pgm);
    save_image(out.probability_eq, dir / "glcm_probability_eq.pgm", ImageFormat::Pgm);
    save_image(out.entropy_img, dir / "glcm_entropy.pgm", ImageFormat::Pgm);
    save_image(out.entropy_eq, dir / "glcm_entropy_eq.pgm", ImageFormat::Pgm);
    save_image(superimpose(out.input, out.glcm_edges), dir / "glcm_overlay.pgm", ImageFormat::Pgm);
  }
  if (cfg.emits(Emit::Watershed) && !out.watershed_edges.mask.empty()) {
    save_image(superimpose(out.input, out.watershed_edges), dir / "watershed.pgm", ImageFormat::Pgm);
  }
  if (cfg.emits(Emit::Report)) {
    std::ofstream f(dir / "report.json", std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::IoFailure, "cannot write report.json");
    f << report_to_json(out.report, cfg.record_timings).dump(2) << '\n';
    if (!f) throw Error(ErrorCode::IoFailure, "write failed for report.json");
  }
}

/// Loads the input (or synthesizes the configured phantom when `input` is
/// empty), runs every stage, and writes the enabled outputs.
inline ComparisonReport run_pipeline(const PipelineConfig& cfg, const std::filesystem::path& input) {
  cfg.validate();
  std::map<std::string, double> load_time;
  GrayImage img;
  std::string source;
  {
    const auto t0 = std::chrono::steady_clock::now();
    if (!input.empty()) {
      img = load_image(input);
      source = input.filename().string();
    } else if (cfg.phantom) {
      img = generate_phantom(*cfg.phantom);
      source = "phantom";
    } else {
      throw Error(ErrorCode::InvalidConfig, "no input image and no phantom configured");
    }
    load_time["load"] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  }
  auto out = analyze(img, cfg, source);
  out.report.timings_ms.insert(load_time.begin(), load_time.end());
  const auto t0 = std::chrono::steady_clock::now();
  std::filesystem::create_directories(cfg.output_dir);
  write_products(out, cfg);
  out.report.timings_ms["write"] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return out.report;
}

/// Same analysis as run_pipeline without writing any file.
inline ComparisonReport compare_methods(const GrayImage& input, const PipelineConfig& cfg, std::string source = "memory") {
  return analyze(input, cfg, std::move(source)).report;
}

}  // namespace vqdemark
