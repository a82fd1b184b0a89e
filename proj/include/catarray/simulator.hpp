#pragma once

#include "catarray/config.hpp"
#include "catarray/geometry.hpp"
#include "catarray/params.hpp"
#include "catarray/solver.hpp"
#include "catarray/types.hpp"

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace catarray {

enum class ObservationMode { kGlobal, kPartial };

inline std::string to_string(ObservationMode mode) {
  return mode == ObservationMode::kGlobal ? "global" : "partial";
}

inline ObservationMode parse_mode(const std::string& s) {
  if (s == "global") return ObservationMode::kGlobal;
  if (s == "partial") return ObservationMode::kPartial;
  throw ArgumentError("unknown observation mode '" + s + "' (expected global or partial)");
}

/// Axis-aligned world box holding the outlier cluster.
struct OutlierBox {
  Point3 center = Point3::Zero();
  Eigen::Vector3d extent = Eigen::Vector3d::Constant(10.0);

  bool contains(const Point3& pt) const {
    return ((pt - center).cwiseAbs().array() <= 0.5 * extent.array()).all();
  }
};

struct Scenario {
  ConductorConfig config = config_222();
  ParamVector truth;
  ObservationMode mode = ObservationMode::kGlobal;
  double span = 200.0;          ///< global mode: x_j uniform in [-span/2, span/2]
  double slice_center = 30.0;   ///< partial mode: x_j uniform in slice_center +/- width/2
  double slice_width = 5.0;
  int pts_per_line_max = 10;
  double noise_sigma = 0.1;
  int n_outliers = 0;
  OutlierBox outlier_box;
  int n_frames = 100;
  std::uint64_t seed = 0;

  void check() const {
    truth.check(config);
    if (!(span > 0.0)) throw ArgumentError("span must be positive");
    if (!(slice_width > 0.0)) throw ArgumentError("slice width must be positive");
    if (!(noise_sigma >= 0.0)) throw ArgumentError("noise sigma must be non-negative");
    if (n_outliers < 0) throw ArgumentError("outlier count must be non-negative");
    if (pts_per_line_max < 0) throw ArgumentError("points per line must be non-negative");
    if (n_frames < 0) throw ArgumentError("frame count must be non-negative");
    if ((outlier_box.extent.array() < 0.0).any()) {
      throw ArgumentError("outlier box extent must be non-negative");
    }
  }
};

/// Label of a simulated point: a conductor index, or one of the negative tags.
inline constexpr int kOutlierLabel = -1;
inline constexpr int kGroundLabel = -2;
inline constexpr int kPylonLabel = -3;

struct LabeledFrame {
  PointCloud cloud;
  std::vector<int> labels;
  ParamVector truth;
};

/// Default truth for the double-circuit layout: stacks 8 m apart, 4 m vertical spacing.
inline ParamVector default_truth(const ConductorConfig& config) {
  Eigen::VectorXd v(config.parameter_count());
  v.head<5>() << 0.0, 0.0, 25.0, 0.2, 1000.0;
  v.tail(config.offset_count()).setConstant(4.0);
  return ParamVector(v);
}

/// Cube of side `extent` centred `lateral` meters to the side of the array
/// axis, at the mean conductor height, at abscissa `along` on the reference curve.
inline OutlierBox default_outlier_box(const ConductorConfig& config, const ParamVector& truth,
                                      double along, double extent = 10.0,
                                      double lateral = 15.0) {
  const ArrayModel model(truth, config);
  const double z_mean = model.offsets().row(2).mean();
  const double y_mid = model.offsets().row(1).mean();
  const double xc = along;
  const double yc = y_mid + lateral;
  const double zc = catenary_z(along, truth.a()) + z_mean;
  OutlierBox box;
  box.extent.setConstant(extent);
  box.center = {model.cos_psi() * xc - model.sin_psi() * yc + truth.x_o(),
                model.sin_psi() * xc + model.cos_psi() * yc + truth.y_o(), zc + truth.z_o()};
  return box;
}

/// Scenario with the default layout, truth and outlier cluster for `mode`.
inline Scenario make_scenario(ObservationMode mode, int n_outliers, int n_frames,
                              std::uint64_t seed, const ConductorConfig& config = config_222(),
                              double outlier_extent = 10.0, double outlier_lateral = 15.0) {
  Scenario s;
  s.config = config;
  s.truth = default_truth(config);
  s.mode = mode;
  s.n_outliers = n_outliers;
  s.n_frames = n_frames;
  s.seed = seed;
  const double along = mode == ObservationMode::kGlobal ? 0.0 : s.slice_center;
  s.outlier_box = default_outlier_box(config, s.truth, along, outlier_extent, outlier_lateral);
  return s;
}

/// One synthetic frame: per conductor, Uniform{0..pts_per_line_max} model points
/// with Gaussian noise on each axis, then n_outliers points uniform in the box.
template <typename Rng>
LabeledFrame generate_frame(const Scenario& scenario, std::size_t frame_index, Rng& rng) {
  const ArrayModel model(scenario.truth, scenario.config);
  std::uniform_int_distribution<int> count_dist(0, scenario.pts_per_line_max);
  double lo = -0.5 * scenario.span;
  double hi = 0.5 * scenario.span;
  if (scenario.mode == ObservationMode::kPartial) {
    lo = scenario.slice_center - 0.5 * scenario.slice_width;
    hi = scenario.slice_center + 0.5 * scenario.slice_width;
  }
  std::uniform_real_distribution<double> x_dist(lo, hi);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> unit(-0.5, 0.5);

  LabeledFrame frame;
  frame.truth = scenario.truth;
  frame.cloud.frame_index = frame_index;
  for (int k = 0; k < model.conductor_count(); ++k) {
    const int count = count_dist(rng);
    for (int j = 0; j < count; ++j) {
      Point3 pt = model.forward_point(k, x_dist(rng));
      const double nx = noise(rng);
      const double ny = noise(rng);
      const double nz = noise(rng);
      pt += scenario.noise_sigma * Eigen::Vector3d(nx, ny, nz);
      frame.cloud.points.push_back(pt);
      frame.labels.push_back(k);
    }
  }
  for (int o = 0; o < scenario.n_outliers; ++o) {
    const double ux = unit(rng);
    const double uy = unit(rng);
    const double uz = unit(rng);
    frame.cloud.points.push_back(scenario.outlier_box.center +
                                 scenario.outlier_box.extent.cwiseProduct(Eigen::Vector3d(ux, uy, uz)));
    frame.labels.push_back(kOutlierLabel);
  }
  return frame;
}

/// n_frames frames from a single stream seeded by scenario.seed.
inline std::vector<LabeledFrame> generate_sequence(const Scenario& scenario) {
  scenario.check();
  std::mt19937_64 rng(scenario.seed);
  std::vector<LabeledFrame> frames;
  frames.reserve(static_cast<std::size_t>(scenario.n_frames));
  for (int t = 0; t < scenario.n_frames; ++t) {
    frames.push_back(generate_frame(scenario, static_cast<std::size_t>(t), rng));
  }
  return frames;
}

/// Scene for filter comparisons: a partial slice of conductor points, a flat
/// ground patch and a spherical pylon blob near the array.
struct ClutterSpec {
  Scenario base;                   ///< conductor part (partial slice, no outliers)
  int ground_points = 600;
  double ground_z = 0.0;
  double ground_along_min = 40.0;  ///< array-frame extent of the ground patch
  double ground_along_max = 120.0;
  double ground_half_width = 30.0;
  double ground_noise = 0.05;
  int pylon_points = 500;
  double pylon_along = 100.0;
  double pylon_lateral = 8.0;
  double pylon_radius = 7.0;
  double pylon_rise = 10.0;  ///< blob centre height above the mean conductor height
  double anchor_along = 92.0;  ///< corridor anchors at +/- this abscissa, on the ground

  void check() const {
    base.check();
    if (ground_points < 0 || pylon_points < 0) throw ArgumentError("point counts must be non-negative");
    if (!(ground_along_max > ground_along_min)) throw ArgumentError("empty ground patch");
    if (!(ground_half_width > 0.0)) throw ArgumentError("ground half-width must be positive");
    if (!(pylon_radius > 0.0)) throw ArgumentError("pylon radius must be positive");
  }

  /// Corridor anchors at +/- anchor_along on the array axis, at ground level.
  std::pair<Point3, Point3> anchors() const {
    return {array_to_world(-anchor_along, 0.0, ground_z), array_to_world(anchor_along, 0.0, ground_z)};
  }

  /// World point of array-frame abscissa `along`, lateral offset and height.
  Point3 array_to_world(double along, double lateral, double z) const {
    const double c = std::cos(base.truth.psi());
    const double s = std::sin(base.truth.psi());
    return {c * along - s * lateral + base.truth.x_o(), s * along + c * lateral + base.truth.y_o(),
            z};
  }
};

/// Defaults: about 100 conductor points in a slice at abscissa 88, 600 ground
/// points, and a 500-point pylon head at abscissa 100, 8 m to the side and
/// 10 m above the conductors.
inline ClutterSpec default_clutter(std::uint64_t seed, int n_frames = 1,
                                   const ConductorConfig& config = config_222()) {
  ClutterSpec c;
  c.base = make_scenario(ObservationMode::kPartial, 0, n_frames, seed, config);
  c.base.slice_center = 88.0;
  c.base.pts_per_line_max = (200 + config.conductor_count() - 1) / config.conductor_count();
  return c;
}

template <typename Rng>
LabeledFrame generate_cluttered_frame(const ClutterSpec& spec, std::size_t frame_index, Rng& rng) {
  LabeledFrame frame = generate_frame(spec.base, frame_index, rng);
  std::uniform_real_distribution<double> along(spec.ground_along_min, spec.ground_along_max);
  std::uniform_real_distribution<double> lateral(-spec.ground_half_width, spec.ground_half_width);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (int i = 0; i < spec.ground_points; ++i) {
    const double u = along(rng);
    const double v = lateral(rng);
    const double dz = spec.ground_noise * noise(rng);
    frame.cloud.points.push_back(spec.array_to_world(u, v, spec.ground_z + dz));
    frame.labels.push_back(kGroundLabel);
  }
  const ArrayModel model(spec.base.truth, spec.base.config);
  const double height = spec.base.truth.z_o() + model.offsets().row(2).mean() +
                        catenary_z(spec.pylon_along, spec.base.truth.a()) + spec.pylon_rise;
  const Point3 center = spec.array_to_world(
      spec.pylon_along, model.offsets().row(1).mean() + spec.pylon_lateral, height);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int i = 0; i < spec.pylon_points; ++i) {
    Eigen::Vector3d d;
    do {
      const double dx = unit(rng);
      const double dy = unit(rng);
      const double dz = unit(rng);
      d = {dx, dy, dz};
    } while (d.squaredNorm() > 1.0);
    frame.cloud.points.push_back(center + spec.pylon_radius * d);
    frame.labels.push_back(kPylonLabel);
  }
  return frame;
}

inline std::vector<LabeledFrame> generate_cluttered_sequence(const ClutterSpec& spec) {
  spec.check();
  std::mt19937_64 rng(spec.base.seed);
  std::vector<LabeledFrame> frames;
  for (int t = 0; t < spec.base.n_frames; ++t) {
    frames.push_back(generate_cluttered_frame(spec, static_cast<std::size_t>(t), rng));
  }
  return frames;
}

/// truth + N(0, diag(sigma^2)), clamped into `bounds`.
template <typename Rng>
ParamVector random_prior(const ParamVector& truth, const Eigen::VectorXd& perturbation_sigma,
                         const Bounds& bounds, Rng& rng) {
  if (perturbation_sigma.size() != truth.size()) {
    throw ArgumentError("perturbation sigma size differs from parameter vector size");
  }
  if ((perturbation_sigma.array() < 0.0).any()) {
    throw ArgumentError("perturbation sigma must be non-negative");
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd v = truth.values();
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] += perturbation_sigma[i] * normal(rng);
  return ParamVector(bounds.project(v));
}

}  // namespace catarray
