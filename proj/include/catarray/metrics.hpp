#pragma once

#include "catarray/config.hpp"
#include "catarray/geometry.hpp"
#include "catarray/params.hpp"
#include "catarray/simulator.hpp"
#include "catarray/solver.hpp"
#include "catarray/types.hpp"

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace catarray {

/// Points explained (within `threshold` of the curves) by the estimate and by
/// the truth. The ratio is left uncapped: an estimate that also explains
/// outliers can exceed 100 %.
struct AccuracyResult {
  std::size_t explained_est = 0;
  std::size_t explained_truth = 0;
  std::optional<double> accuracy_pct;  ///< empty when the truth explains nothing

  bool exceeds_100() const { return accuracy_pct && *accuracy_pct > 100.0; }
};

inline std::size_t count_explained(const ParamVector& p, const ConductorConfig& config,
                                   const PointCloud& cloud, double threshold) {
  const ArrayModel model(p, config);
  std::size_t n = 0;
  for (const auto& pt : cloud.points) {
    if (model.distance(pt).d <= threshold) ++n;
  }
  return n;
}

inline AccuracyResult accuracy(const ParamVector& p_est, const ParamVector& p_truth,
                               const PointCloud& cloud, const ConductorConfig& config,
                               double threshold = 1.0) {
  AccuracyResult r;
  r.explained_est = count_explained(p_est, config, cloud, threshold);
  r.explained_truth = count_explained(p_truth, config, cloud, threshold);
  if (r.explained_truth > 0) {
    r.accuracy_pct = 100.0 * static_cast<double>(r.explained_est) /
                     static_cast<double>(r.explained_truth);
  }
  return r;
}

/// Angle wrapped to (-pi, pi].
inline double wrap_angle(double angle) {
  double w = std::remainder(angle, 2.0 * std::numbers::pi);
  if (w <= -std::numbers::pi) w += 2.0 * std::numbers::pi;
  return w;
}

/// Signed errors, estimate minus truth.
struct ParameterErrors {
  double psi_error = 0.0;  ///< radians, wrapped
  double a_error = 0.0;
  Eigen::Vector3d translation_error = Eigen::Vector3d::Zero();
  Eigen::VectorXd delta_errors;
};

inline ParameterErrors parameter_errors(const ParamVector& p_est, const ParamVector& p_truth) {
  if (p_est.size() != p_truth.size()) {
    throw ArgumentError("estimate and truth have different parameter counts");
  }
  ParameterErrors e;
  e.psi_error = wrap_angle(p_est.psi() - p_truth.psi());
  e.a_error = p_est.a() - p_truth.a();
  e.translation_error = p_est.values().head<3>() - p_truth.values().head<3>();
  e.delta_errors = p_est.deltas() - p_truth.deltas();
  return e;
}

/// Per-frame record of one tracked run.
struct FrameMetrics {
  int n_outliers = 0;
  int repeat = 0;
  std::size_t frame = 0;
  std::size_t n_pts = 0;
  double solve_time_ms = 0.0;  ///< mean wall time per solver start
  AccuracyResult accuracy;
  ParameterErrors errors;
};

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
  std::size_t count = 0;
};

/// Mean and population standard deviation, skipping NaN entries.
inline MeanStd mean_std(const std::vector<double>& values) {
  MeanStd r;
  double sum = 0.0;
  for (double v : values) {
    if (std::isnan(v)) continue;
    sum += v;
    ++r.count;
  }
  if (r.count == 0) {
    r.mean = r.std = std::numeric_limits<double>::quiet_NaN();
    return r;
  }
  r.mean = sum / static_cast<double>(r.count);
  double sq = 0.0;
  for (double v : values) {
    if (!std::isnan(v)) sq += (v - r.mean) * (v - r.mean);
  }
  r.std = std::sqrt(sq / static_cast<double>(r.count));
  return r;
}

/// Aggregates over the last-frames window of every repeat for one outlier count.
/// Statistics are taken over the per-frame values; `acc_pooled` is the
/// alternative pooled ratio sum(explained_est) / sum(explained_truth).
struct StudyRow {
  int n_outliers = 0;
  MeanStd n_pts;
  MeanStd dt_ms;
  MeanStd accuracy;
  MeanStd psi_error;
  MeanStd a_error;
  MeanStd abs_a_error;
  double acc_pooled = std::numeric_limits<double>::quiet_NaN();
  std::size_t frames_over_100 = 0;
  std::size_t missing_accuracy = 0;
  int failed_runs = 0;
};

inline StudyRow aggregate_window(int n_outliers, const std::vector<FrameMetrics>& window,
                                 int failed_runs = 0) {
  StudyRow row;
  row.n_outliers = n_outliers;
  row.failed_runs = failed_runs;
  std::vector<double> n_pts, dt, acc, psi, a, abs_a;
  std::size_t est_sum = 0;
  std::size_t truth_sum = 0;
  for (const auto& m : window) {
    n_pts.push_back(static_cast<double>(m.n_pts));
    dt.push_back(m.solve_time_ms);
    acc.push_back(m.accuracy.accuracy_pct.value_or(std::numeric_limits<double>::quiet_NaN()));
    psi.push_back(m.errors.psi_error);
    a.push_back(m.errors.a_error);
    abs_a.push_back(std::abs(m.errors.a_error));
    est_sum += m.accuracy.explained_est;
    truth_sum += m.accuracy.explained_truth;
    if (!m.accuracy.accuracy_pct) ++row.missing_accuracy;
    if (m.accuracy.exceeds_100()) ++row.frames_over_100;
  }
  row.n_pts = mean_std(n_pts);
  row.dt_ms = mean_std(dt);
  row.accuracy = mean_std(acc);
  row.psi_error = mean_std(psi);
  row.a_error = mean_std(a);
  row.abs_a_error = mean_std(abs_a);
  if (truth_sum > 0) {
    row.acc_pooled = 100.0 * static_cast<double>(est_sum) / static_cast<double>(truth_sum);
  }
  return row;
}

/// Protocol of a sensitivity study: the scenario is rebuilt for every outlier
/// count and repeat, the initial prior is a random perturbation of the truth.
struct StudyTemplate {
  ObservationMode mode = ObservationMode::kGlobal;
  std::string config_name = "222";
  int n_frames = 100;
  int window = 10;  ///< last frames used for metrics
  double noise_sigma = 0.1;
  double accuracy_threshold = 1.0;
  double outlier_extent = 10.0;
  double outlier_lateral = 15.0;
  Eigen::VectorXd prior_sigma;  ///< empty: default_prior_sigma
  std::uint64_t seed = 0;
};

/// Spread of the random initial guesses of a study run.
inline Eigen::VectorXd default_prior_sigma(const ConductorConfig& config) {
  Eigen::VectorXd s(config.parameter_count());
  s.head<5>() << 2.0, 2.0, 2.0, 0.05, 200.0;
  s.tail(config.offset_count()).setConstant(0.5);
  return s;
}

/// Seed of repeat `r` at outlier count `n_o`.
inline std::uint64_t run_seed(std::uint64_t base, int n_outliers, int repeat) {
  return frame_seed(frame_seed(base, static_cast<std::size_t>(n_outliers)),
                    static_cast<std::size_t>(repeat));
}

struct RunLog {
  std::vector<FrameMetrics> frames;  ///< every frame of the run
  std::string failure;               ///< empty on success
};

/// One tracked run of a study: simulate, perturb the prior, track, score.
inline RunLog run_study_repeat(const StudyTemplate& tpl, int n_outliers, int repeat,
                               const EstimatorSettings& settings) {
  const ConductorConfig config = config_by_name(tpl.config_name);
  const std::uint64_t seed = run_seed(tpl.seed, n_outliers, repeat);
  Scenario scenario = make_scenario(tpl.mode, n_outliers, tpl.n_frames, seed, config,
                                    tpl.outlier_extent, tpl.outlier_lateral);
  scenario.noise_sigma = tpl.noise_sigma;
  const auto frames = generate_sequence(scenario);

  std::mt19937_64 prior_rng(frame_seed(seed, 0xB0A7));
  const Eigen::VectorXd sigma =
      tpl.prior_sigma.size() != 0 ? tpl.prior_sigma : default_prior_sigma(config);
  const ParamVector prior = random_prior(scenario.truth, sigma,
                                         settings.bounds.resolve(scenario.truth), prior_rng);

  EstimatorSettings run_settings = settings;
  run_settings.seed = frame_seed(seed, 0x5EA2C4);
  std::vector<PointCloud> clouds;
  clouds.reserve(frames.size());
  for (const auto& f : frames) clouds.push_back(f.cloud);

  RunLog log;
  std::vector<EstimationResult> results;
  try {
    results = track_sequence(clouds, prior, run_settings, config);
  } catch (const std::exception& e) {
    log.failure = e.what();
    return log;
  }
  for (std::size_t t = 0; t < results.size(); ++t) {
    FrameMetrics m;
    m.n_outliers = n_outliers;
    m.repeat = repeat;
    m.frame = t;
    m.n_pts = clouds[t].size();
    double total = 0.0;
    for (double s : results[t].start_times_s) total += s;
    m.solve_time_ms = 1e3 * total / static_cast<double>(results[t].start_times_s.size());
    m.accuracy = accuracy(results[t].p_hat_new, scenario.truth, clouds[t], config,
                          tpl.accuracy_threshold);
    m.errors = parameter_errors(results[t].p_hat_new, scenario.truth);
    log.frames.push_back(std::move(m));
  }
  return log;
}

struct StudyReport {
  std::vector<StudyRow> rows;
  std::vector<FrameMetrics> frame_log;  ///< every frame of every successful run
  std::vector<std::string> failures;
};

/// Runs n_repeats tracked sequences per outlier count and aggregates the last
/// `window` frames of each.
inline StudyReport sensitivity_study(const StudyTemplate& tpl,
                                     const std::vector<int>& outlier_counts, int n_repeats,
                                     const EstimatorSettings& settings) {
  if (n_repeats < 1) throw ArgumentError("sensitivity study needs at least one repeat");
  if (tpl.window < 1 || tpl.window > tpl.n_frames) {
    throw ArgumentError("metrics window must lie in [1, n_frames]");
  }
  StudyReport report;
  for (int n_o : outlier_counts) {
    std::vector<FrameMetrics> window;
    int failed = 0;
    for (int r = 0; r < n_repeats; ++r) {
      RunLog log = run_study_repeat(tpl, n_o, r, settings);
      if (!log.failure.empty()) {
        ++failed;
        report.failures.push_back("n_o=" + std::to_string(n_o) + " repeat=" +
                                  std::to_string(r) + ": " + log.failure);
        continue;
      }
      const std::size_t first = log.frames.size() - static_cast<std::size_t>(tpl.window);
      for (std::size_t t = first; t < log.frames.size(); ++t) window.push_back(log.frames[t]);
      report.frame_log.insert(report.frame_log.end(), log.frames.begin(), log.frames.end());
    }
    report.rows.push_back(aggregate_window(n_o, window, failed));
  }
  return report;
}

}  // namespace catarray
