#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vqdemark/error.hpp"
#include "vqdemark/image.hpp"
#include "vqdemark/parallel.hpp"

namespace vqdemark::vq {

/// Fixed-dimension list of real vectors stored contiguously.
class PointSet {
 public:
  PointSet() = default;
  explicit PointSet(std::size_t dim) : dim_(dim) {}
  PointSet(std::size_t dim, std::vector<double> flat) : dim_(dim), data_(std::move(flat)) {
    if (dim_ == 0 || data_.size() % dim_ != 0) {
      throw Error(ErrorCode::DimensionMismatch, "flat buffer is not a multiple of the dimension");
    }
  }

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return dim_ == 0 ? 0 : data_.size() / dim_; }
  bool empty() const noexcept { return size() == 0; }

  std::span<const double> operator[](std::size_t i) const { return {data_.data() + i * dim_, dim_}; }
  std::span<double> operator[](std::size_t i) { return {data_.data() + i * dim_, dim_}; }

  void push_back(std::span<const double> v) {
    if (v.size() != dim_) throw Error(ErrorCode::DimensionMismatch, "vector length differs from set dimension");
    data_.insert(data_.end(), v.begin(), v.end());
  }

  std::span<const double> flat() const noexcept { return data_; }

  friend bool operator==(const PointSet&, const PointSet&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    acc += d * d;
  }
  return acc;
}

struct BlockGeometry {
  std::size_t block_w = 4;
  std::size_t block_h = 3;
  std::size_t grid_w = 0;
  std::size_t grid_h = 0;

  std::size_t dim() const noexcept { return block_w * block_h; }
  std::size_t block_count() const noexcept { return grid_w * grid_h; }

  friend bool operator==(const BlockGeometry&, const BlockGeometry&) = default;
};

struct TrainingSet {
  PointSet vectors;
  BlockGeometry geometry;
  std::size_t source_width = 0;
  std::size_t source_height = 0;
};

struct Codebook {
  PointSet codevectors;
  double distortion = 0.0;  // mean squared error per component

  std::size_t size() const noexcept { return codevectors.size(); }
  std::size_t dim() const noexcept { return codevectors.dim(); }
};

struct SplitParams {
  double epsilon = 1.0;
  double lloyd_tol = 1e-4;
  std::size_t max_lloyd_iters = 50;

  void validate() const {
    if (!(epsilon > 0.0)) throw Error(ErrorCode::InvalidParameter, "epsilon must be > 0");
    if (!(lloyd_tol >= 0.0)) throw Error(ErrorCode::InvalidParameter, "lloyd_tol must be >= 0");
    if (max_lloyd_iters < 1) throw Error(ErrorCode::InvalidParameter, "max_lloyd_iters must be >= 1");
  }
};

struct ClusterAssignment {
  std::vector<std::size_t> labels;
  std::vector<std::size_t> counts;
};

struct GroupMap {
  std::vector<std::size_t> group_of;  // one entry per codevector
  std::size_t group_count = 0;

  std::vector<std::size_t> members_per_group() const {
    std::vector<std::size_t> n(group_count, 0);
    for (auto g : group_of) ++n[g];
    return n;
  }
  bool occupied(std::size_t g) const {
    return std::find(group_of.begin(), group_of.end(), g) != group_of.end();
  }
};

/// Per-level record of the Lloyd refinement: distortions[0] is the
/// distortion right after splitting, each later entry follows one
/// centroid update plus reassignment.
struct LevelTrace {
  std::size_t codebook_size = 0;
  std::vector<double> distortions;
  bool converged_to_fixed_point = false;
};

struct LbgResult {
  Codebook codebook;
  ClusterAssignment assignment;
  std::vector<LevelTrace> levels;
};

/// Pads right/bottom by edge replication up to whole blocks, then emits one
/// vector per block (blocks row-major, pixels within a block row-major).
inline TrainingSet extract_training_vectors(const GrayImage& img, std::size_t block_w, std::size_t block_h) {
  if (block_w < 1 || block_h < 1) throw Error(ErrorCode::InvalidParameter, "block sides must be >= 1");
  if (img.empty()) throw Error(ErrorCode::EmptyImage, "cannot extract blocks from an empty image");
  TrainingSet ts;
  ts.geometry.block_w = block_w;
  ts.geometry.block_h = block_h;
  ts.geometry.grid_w = (img.width() + block_w - 1) / block_w;
  ts.geometry.grid_h = (img.height() + block_h - 1) / block_h;
  ts.source_width = img.width();
  ts.source_height = img.height();

  const std::size_t dim = block_w * block_h;
  std::vector<double> flat;
  flat.reserve(ts.geometry.block_count() * dim);
  for (std::size_t by = 0; by < ts.geometry.grid_h; ++by) {
    for (std::size_t bx = 0; bx < ts.geometry.grid_w; ++bx) {
      for (std::size_t dy = 0; dy < block_h; ++dy) {
        for (std::size_t dx = 0; dx < block_w; ++dx) {
          flat.push_back(img.clamped(static_cast<std::ptrdiff_t>(bx * block_w + dx),
                                     static_cast<std::ptrdiff_t>(by * block_h + dy)));
        }
      }
    }
  }
  ts.vectors = PointSet(dim, std::move(flat));
  return ts;
}

/// Nearest codevector for one vector; ties go to the lowest index.
inline std::size_t nearest(std::span<const double> v, const PointSet& codebook) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < codebook.size(); ++c) {
    const double d = squared_distance(v, codebook[c]);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

inline ClusterAssignment assign(const PointSet& points, const PointSet& codebook) {
  if (points.dim() != codebook.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "training vectors have dimension " + std::to_string(points.dim()) +
                                                  ", codebook has " + std::to_string(codebook.dim()));
  }
  if (codebook.empty()) throw Error(ErrorCode::InvalidTargetSize, "empty codebook");
  ClusterAssignment a;
  a.labels.resize(points.size());
  parallel_for(points.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) a.labels[i] = nearest(points[i], codebook);
  });
  a.counts.assign(codebook.size(), 0);
  for (auto l : a.labels) ++a.counts[l];
  return a;
}

inline ClusterAssignment assign(const TrainingSet& ts, const Codebook& cb) {
  return assign(ts.vectors, cb.codevectors);
}

/// Mean squared distance per component, summed in index order.
inline double distortion(const PointSet& points, const PointSet& codebook, const std::vector<std::size_t>& labels) {
  if (points.empty()) return 0.0;
  std::vector<double> per(points.size());
  parallel_for(points.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) per[i] = squared_distance(points[i], codebook[labels[i]]);
  });
  double total = 0.0;
  for (double d : per) total += d;
  return total / static_cast<double>(points.size()) / static_cast<double>(points.dim());
}

inline std::vector<double> centroid(const PointSet& points) {
  std::vector<double> c(points.dim(), 0.0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t k = 0; k < c.size(); ++k) c[k] += points[i][k];
  }
  for (auto& v : c) v /= static_cast<double>(points.size());
  return c;
}

/// Each codevector c becomes the pair (c + eps, c - eps) at positions 2i, 2i+1.
inline PointSet split(const PointSet& codebook, double epsilon) {
  PointSet out(codebook.dim());
  std::vector<double> v(codebook.dim());
  for (std::size_t i = 0; i < codebook.size(); ++i) {
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = codebook[i][k] + epsilon;
    out.push_back(v);
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = codebook[i][k] - epsilon;
    out.push_back(v);
  }
  return out;
}

namespace detail {

// Centroid update. Empty clusters take the centroid of the most populous
// cluster (lowest index on ties) shifted by +epsilon on every component.
inline PointSet update_centroids(const PointSet& points, const ClusterAssignment& a, const PointSet& previous,
                                 double epsilon) {
  const std::size_t n_codes = previous.size();
  const std::size_t dim = points.dim();
  std::vector<double> sums(n_codes * dim, 0.0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto p = points[i];
    double* s = sums.data() + a.labels[i] * dim;
    for (std::size_t k = 0; k < dim; ++k) s[k] += p[k];
  }
  std::size_t most = 0;
  for (std::size_t c = 1; c < n_codes; ++c) {
    if (a.counts[c] > a.counts[most]) most = c;
  }
  for (std::size_t c = 0; c < n_codes; ++c) {
    if (a.counts[c] == 0) continue;
    for (std::size_t k = 0; k < dim; ++k) sums[c * dim + k] /= static_cast<double>(a.counts[c]);
  }
  for (std::size_t c = 0; c < n_codes; ++c) {
    if (a.counts[c] != 0) continue;
    for (std::size_t k = 0; k < dim; ++k) sums[c * dim + k] = sums[most * dim + k] + epsilon;
  }
  return PointSet(dim, std::move(sums));
}

}  // namespace detail

/// Lloyd refinement from a fixed initial codebook. Stops at a fixed point
/// (labels unchanged), when the relative distortion improvement drops below
/// lloyd_tol, or after max_lloyd_iters updates. The returned labels are
/// always the nearest-codevector assignment for the returned codebook.
inline LbgResult lloyd(const PointSet& points, PointSet codebook, const SplitParams& params) {
  LbgResult r;
  LevelTrace trace;
  trace.codebook_size = codebook.size();
  auto a = assign(points, codebook);
  double d = distortion(points, codebook, a.labels);
  trace.distortions.push_back(d);
  for (std::size_t it = 0; it < params.max_lloyd_iters; ++it) {
    auto next_cb = detail::update_centroids(points, a, codebook, params.epsilon);
    auto next_a = assign(points, next_cb);
    const double next_d = distortion(points, next_cb, next_a.labels);
    trace.distortions.push_back(next_d);
    const bool fixed = next_a.labels == a.labels;
    const double improvement = d > 0.0 ? (d - next_d) / d : 0.0;
    codebook = std::move(next_cb);
    a = std::move(next_a);
    d = next_d;
    if (fixed) {
      trace.converged_to_fixed_point = true;
      break;
    }
    if (improvement < params.lloyd_tol) break;
  }
  r.codebook.codevectors = std::move(codebook);
  r.codebook.distortion = d;
  r.assignment = std::move(a);
  r.levels.push_back(std::move(trace));
  return r;
}

/// LBG codebook design by binary splitting: the global centroid first,
/// then split every codevector by +/- epsilon and refine with Lloyd
/// iterations until the codebook reaches target_size.
inline LbgResult lbg_generate(const PointSet& points, std::size_t target_size, const SplitParams& params) {
  params.validate();
  if (target_size == 0 || !std::has_single_bit(target_size)) {
    throw Error(ErrorCode::InvalidTargetSize, "codebook size " + std::to_string(target_size) + " is not a power of two");
  }
  if (points.empty()) throw Error(ErrorCode::EmptyTrainingSet, "no training vectors");

  PointSet codebook(points.dim());
  codebook.push_back(centroid(points));
  LbgResult result;
  {
    // level 0 is already optimal; record its distortion without iterating
    LevelTrace t;
    t.codebook_size = 1;
    result.assignment = assign(points, codebook);
    result.codebook.distortion = distortion(points, codebook, result.assignment.labels);
    t.distortions.push_back(result.codebook.distortion);
    t.converged_to_fixed_point = true;
    result.levels.push_back(std::move(t));
  }
  while (codebook.size() < target_size) {
    auto level = lloyd(points, split(codebook, params.epsilon), params);
    codebook = level.codebook.codevectors;
    result.codebook.distortion = level.codebook.distortion;
    result.assignment = std::move(level.assignment);
    result.levels.push_back(std::move(level.levels.front()));
  }
  result.codebook.codevectors = std::move(codebook);
  return result;
}

inline LbgResult lbg_generate(const TrainingSet& ts, std::size_t target_size, const SplitParams& params) {
  return lbg_generate(ts.vectors, target_size, params);
}

struct RequantizeResult {
  GroupMap groups;
  Codebook group_codebook;  // one codevector per (renumbered) group
};

/// Clusters the codevectors themselves with LBG down to group_count, then
/// renumbers groups by ascending Euclidean norm of their centroid.
inline RequantizeResult requantize_detailed(const Codebook& cb, std::size_t group_count, const SplitParams& params) {
  if (group_count == 0 || !std::has_single_bit(group_count) || group_count > cb.size()) {
    throw Error(ErrorCode::InvalidTargetSize, "group count " + std::to_string(group_count) +
                                                  " must be a power of two <= codebook size " +
                                                  std::to_string(cb.size()));
  }
  PointSet centres(cb.dim());
  std::vector<std::size_t> raw_group(cb.size());
  double dist = 0.0;
  if (group_count == cb.size()) {
    centres = cb.codevectors;
    std::iota(raw_group.begin(), raw_group.end(), std::size_t{0});
  } else {
    auto lbg = lbg_generate(cb.codevectors, group_count, params);
    centres = std::move(lbg.codebook.codevectors);
    raw_group = std::move(lbg.assignment.labels);
    dist = lbg.codebook.distortion;
  }

  std::vector<double> norms(group_count);
  for (std::size_t g = 0; g < group_count; ++g) {
    double sq = 0.0;
    for (double v : centres[g]) sq += v * v;
    norms[g] = std::sqrt(sq);
  }
  std::vector<std::size_t> order(group_count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return norms[a] < norms[b]; });
  std::vector<std::size_t> rank(group_count);
  for (std::size_t i = 0; i < group_count; ++i) rank[order[i]] = i;

  RequantizeResult r;
  r.groups.group_count = group_count;
  r.groups.group_of.resize(cb.size());
  for (std::size_t c = 0; c < cb.size(); ++c) r.groups.group_of[c] = rank[raw_group[c]];
  r.group_codebook.codevectors = PointSet(cb.dim());
  for (std::size_t i = 0; i < group_count; ++i) r.group_codebook.codevectors.push_back(centres[order[i]]);
  r.group_codebook.distortion = dist;
  return r;
}

inline GroupMap requantize(const Codebook& cb, std::size_t group_count, const SplitParams& params) {
  return requantize_detailed(cb, group_count, params).groups;
}

/// Per-pixel group index over the source raster (padding cropped).
inline std::vector<std::size_t> group_raster(const BlockGeometry& geom, std::size_t width, std::size_t height,
                                             const ClusterAssignment& asg, const GroupMap& gm) {
  if (asg.labels.size() != geom.block_count() || geom.grid_w * geom.block_w < width ||
      geom.grid_h * geom.block_h < height) {
    throw Error(ErrorCode::GeometryMismatch, "assignment does not cover the block grid of the image");
  }
  std::vector<std::size_t> out(width * height);
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      const std::size_t block = (y / geom.block_h) * geom.grid_w + x / geom.block_w;
      const std::size_t label = asg.labels[block];
      if (label >= gm.group_of.size()) throw Error(ErrorCode::GeometryMismatch, "label outside group map");
      out[y * width + x] = gm.group_of[label];
    }
  }
  return out;
}

/// One image per group: original pixels where the block belongs to the
/// group, zero elsewhere.
inline std::vector<GrayImage> cluster_images(const GrayImage& img, const BlockGeometry& geom,
                                             const ClusterAssignment& asg, const GroupMap& gm) {
  const auto groups = group_raster(geom, img.width(), img.height(), asg, gm);
  std::vector<GrayImage> out(gm.group_count, GrayImage(img.width(), img.height()));
  const auto src = img.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) out[groups[i]].pixels()[i] = src[i];
  return out;
}

}  // namespace vqdemark::vq
