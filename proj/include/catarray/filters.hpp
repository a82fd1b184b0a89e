#pragma once

#include "catarray/types.hpp"

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <random>
#include <vector>

namespace catarray {

/// Output of a filter. `kept` lists the retained input indices in increasing
/// order, so every filter is a stable subset operator.
struct FilterResult {
  PointCloud cloud;
  std::vector<std::size_t> kept;
  bool degenerate_input = false;  ///< input too small to process; returned unchanged
};

namespace detail {

inline FilterResult select(const PointCloud& cloud, std::vector<std::size_t> kept) {
  FilterResult out;
  out.cloud.frame_index = cloud.frame_index;
  out.cloud.points.reserve(kept.size());
  for (std::size_t i : kept) out.cloud.points.push_back(cloud.points[i]);
  out.kept = std::move(kept);
  return out;
}

inline FilterResult identity(const PointCloud& cloud) {
  std::vector<std::size_t> all(cloud.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return select(cloud, std::move(all));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Corridor

/// Rectangle between two pylon anchors plus an elevation-histogram ground cut.
///
/// The ground search only looks at bins starting at or below
/// max(anchor z) + ground_band; anchors are expected at pylon base height.
struct CorridorSpec {
  Point3 anchor_a = Point3::Zero();
  Point3 anchor_b = Point3::Zero();
  double half_width = 15.0;
  double bin_size = 1.0;
  double ground_fraction = 0.05;  ///< occupancy a bin needs to count as ground
  int ground_margin_bins = 2;
  double ground_band = 10.0;

  void check() const {
    if ((anchor_a.head<2>() - anchor_b.head<2>()).norm() <= 0.0) {
      throw ArgumentError("corridor anchors must be horizontally distinct");
    }
    if (!(half_width > 0.0)) throw ArgumentError("corridor half-width must be positive");
    if (!(bin_size > 0.0)) throw ArgumentError("histogram bin size must be positive");
    if (!(ground_fraction >= 0.0 && ground_fraction <= 1.0)) {
      throw ArgumentError("ground fraction must lie in [0, 1]");
    }
    if (ground_margin_bins < 0) throw ArgumentError("ground margin must be non-negative");
  }
};

/// Elevation below which points count as ground, or -inf when no bin in the
/// search band reaches the occupancy threshold.
inline double ground_cut_height(const std::vector<double>& z, const CorridorSpec& spec) {
  const double none = -std::numeric_limits<double>::infinity();
  if (z.empty()) return none;
  const double z_min = *std::min_element(z.begin(), z.end());
  const double band_top = std::max(spec.anchor_a.z(), spec.anchor_b.z()) + spec.ground_band;
  if (z_min > band_top) return none;
  const double origin = std::floor(z_min / spec.bin_size) * spec.bin_size;
  const auto n_bins = static_cast<std::size_t>((band_top - origin) / spec.bin_size) + 1;
  std::vector<std::size_t> hist(n_bins, 0);
  for (double v : z) {
    const double idx = std::floor((v - origin) / spec.bin_size);
    if (idx >= 0.0 && idx < static_cast<double>(n_bins)) ++hist[static_cast<std::size_t>(idx)];
  }
  const double needed = spec.ground_fraction * static_cast<double>(z.size());
  for (std::size_t b = 0; b < n_bins; ++b) {
    if (static_cast<double>(hist[b]) > needed) {
      return origin + static_cast<double>(b + static_cast<std::size_t>(spec.ground_margin_bins)) *
                          spec.bin_size;
    }
  }
  return none;
}

inline FilterResult corridor_filter(const PointCloud& cloud, const CorridorSpec& spec) {
  spec.check();
  const Eigen::Vector2d a = spec.anchor_a.head<2>();
  const Eigen::Vector2d axis = spec.anchor_b.head<2>() - a;
  const double length = axis.norm();
  const Eigen::Vector2d u = axis / length;
  const Eigen::Vector2d n(-u.y(), u.x());

  std::vector<std::size_t> inside;
  std::vector<double> z;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Eigen::Vector2d rel = cloud.points[i].head<2>() - a;
    const double along = rel.dot(u);
    if (along >= 0.0 && along <= length && std::abs(rel.dot(n)) <= spec.half_width) {
      inside.push_back(i);
      z.push_back(cloud.points[i].z());
    }
  }
  const double cut = ground_cut_height(z, spec);
  std::vector<std::size_t> kept;
  for (std::size_t j = 0; j < inside.size(); ++j) {
    if (z[j] >= cut) kept.push_back(inside[j]);
  }
  return detail::select(cloud, std::move(kept));
}

// ---------------------------------------------------------------------------
// RANSAC ground plane

struct RansacSpec {
  int iterations = 200;
  double threshold = 0.3;
  double min_inlier_fraction = 0.2;

  void check() const {
    if (iterations < 1) throw ArgumentError("RANSAC needs at least one iteration");
    if (!(threshold > 0.0)) throw ArgumentError("RANSAC threshold must be positive");
  }
};

struct PlaneFit {
  Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
  double offset = 0.0;  ///< plane: normal . x + offset = 0
  std::vector<std::size_t> inliers;
};

/// Plane with the most inliers among `spec.iterations` three-point hypotheses.
template <typename Rng>
PlaneFit ransac_plane(const PointCloud& cloud, const RansacSpec& spec, Rng& rng) {
  spec.check();
  PlaneFit best;
  if (cloud.size() < 3) return best;
  std::uniform_int_distribution<std::size_t> pick(0, cloud.size() - 1);
  std::vector<std::size_t> inliers;
  for (int it = 0; it < spec.iterations; ++it) {
    const std::size_t i0 = pick(rng);
    const std::size_t i1 = pick(rng);
    const std::size_t i2 = pick(rng);
    if (i0 == i1 || i0 == i2 || i1 == i2) continue;
    const Point3& p0 = cloud.points[i0];
    Eigen::Vector3d normal = (cloud.points[i1] - p0).cross(cloud.points[i2] - p0);
    const double norm = normal.norm();
    if (norm < 1e-12) continue;
    normal /= norm;
    const double offset = -normal.dot(p0);
    inliers.clear();
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      if (std::abs(normal.dot(cloud.points[i]) + offset) <= spec.threshold) inliers.push_back(i);
    }
    if (inliers.size() > best.inliers.size()) {
      best.normal = normal;
      best.offset = offset;
      best.inliers = inliers;
    }
  }
  return best;
}

/// Removes the dominant plane when it holds at least min_inlier_fraction of
/// the cloud; otherwise returns the cloud unchanged.
template <typename Rng>
FilterResult ground_filter_ransac(const PointCloud& cloud, const RansacSpec& spec, Rng& rng) {
  spec.check();
  if (cloud.size() < 3) {
    FilterResult out = detail::identity(cloud);
    out.degenerate_input = true;
    return out;
  }
  const PlaneFit plane = ransac_plane(cloud, spec, rng);
  const double fraction =
      static_cast<double>(plane.inliers.size()) / static_cast<double>(cloud.size());
  if (fraction < spec.min_inlier_fraction) return detail::identity(cloud);
  std::vector<bool> is_inlier(cloud.size(), false);
  for (std::size_t i : plane.inliers) is_inlier[i] = true;
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (!is_inlier[i]) kept.push_back(i);
  }
  return detail::select(cloud, std::move(kept));
}

// ---------------------------------------------------------------------------
// DBSCAN + line-shape test

struct ClusterSpec {
  double epsilon = 1.5;
  int min_points = 4;
  double linearity_ratio = 10.0;

  void check() const {
    if (!(epsilon > 0.0)) throw ArgumentError("DBSCAN epsilon must be positive");
    if (min_points < 1) throw ArgumentError("DBSCAN min_points must be at least 1");
    if (!(linearity_ratio >= 1.0)) throw ArgumentError("linearity ratio must be >= 1");
  }
};

inline constexpr int kNoiseCluster = -1;

/// DBSCAN labels: cluster id >= 0 or kNoiseCluster. A point is core when its
/// epsilon-neighbourhood, itself included, holds at least min_points points.
/// Clusters are numbered in order of their first core point.
inline std::vector<int> dbscan(const std::vector<Point3>& points, double epsilon,
                               int min_points) {
  constexpr int kUnvisited = -2;
  const std::size_t n = points.size();
  const double eps2 = epsilon * epsilon;
  std::vector<int> labels(n, kUnvisited);

  auto region = [&](std::size_t i) {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < n; ++j) {
      if ((points[i] - points[j]).squaredNorm() <= eps2) out.push_back(j);
    }
    return out;
  };

  int cluster = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] != kUnvisited) continue;
    std::vector<std::size_t> seeds = region(i);
    if (static_cast<int>(seeds.size()) < min_points) {
      labels[i] = kNoiseCluster;
      continue;
    }
    labels[i] = cluster;
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      const std::size_t j = seeds[s];
      if (labels[j] == kNoiseCluster) labels[j] = cluster;  // border point
      if (labels[j] != kUnvisited) continue;
      labels[j] = cluster;
      std::vector<std::size_t> more = region(j);
      if (static_cast<int>(more.size()) >= min_points) {
        seeds.insert(seeds.end(), more.begin(), more.end());
      }
    }
    ++cluster;
  }
  return labels;
}

/// Covariance eigenvalues sorted descending.
inline Eigen::Vector3d covariance_eigenvalues(const std::vector<Point3>& points) {
  if (points.empty()) return Eigen::Vector3d::Zero();
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const auto& p : points) mean += p;
  mean /= static_cast<double>(points.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : points) cov += (p - mean) * (p - mean).transpose();
  cov /= static_cast<double>(points.size());
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov, Eigen::EigenvaluesOnly);
  const Eigen::Vector3d ascending = solver.eigenvalues();
  return {ascending[2], ascending[1], ascending[0]};
}

inline bool is_line_like(const std::vector<Point3>& points, double ratio_threshold) {
  const Eigen::Vector3d ev = covariance_eigenvalues(points);
  if (ev[1] <= 0.0) return ev[0] > 0.0;
  return ev[0] / ev[1] >= ratio_threshold;
}

/// Ground removal, DBSCAN, then keep only clusters shaped like a line.
template <typename Rng>
FilterResult clustering_filter(const PointCloud& cloud, const RansacSpec& ransac,
                               const ClusterSpec& spec, Rng& rng) {
  spec.check();
  const FilterResult ground = ground_filter_ransac(cloud, ransac, rng);
  const std::vector<int> labels =
      dbscan(ground.cloud.points, spec.epsilon, spec.min_points);
  const int n_clusters =
      labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  std::vector<std::vector<Point3>> members(static_cast<std::size_t>(n_clusters));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= 0) members[static_cast<std::size_t>(labels[i])].push_back(ground.cloud.points[i]);
  }
  std::vector<bool> keep_cluster(static_cast<std::size_t>(n_clusters), false);
  for (int c = 0; c < n_clusters; ++c) {
    keep_cluster[static_cast<std::size_t>(c)] =
        is_line_like(members[static_cast<std::size_t>(c)], spec.linearity_ratio);
  }
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= 0 && keep_cluster[static_cast<std::size_t>(labels[i])]) {
      kept.push_back(ground.kept[i]);
    }
  }
  FilterResult out = detail::select(cloud, std::move(kept));
  out.degenerate_input = ground.degenerate_input;
  return out;
}

}  // namespace catarray
