#pragma once

#include "catarray/config.hpp"
#include "catarray/loss.hpp"
#include "catarray/params.hpp"
#include "catarray/types.hpp"

#include <Eigen/Core>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace catarray {

/// Box constraints on the parameter vector.
struct Bounds {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  Eigen::VectorXd project(const Eigen::VectorXd& x) const {
    return x.cwiseMax(lower).cwiseMin(upper);
  }
  bool contains(const Eigen::VectorXd& x) const {
    return x.size() == lower.size() && (x.array() >= lower.array()).all() &&
           (x.array() <= upper.array()).all();
  }
};

/// Bounds that may be expressed relative to the prior: where `relative[i]` is
/// set, the effective bound is prior[i] + lower[i] (resp. upper[i]).
struct BoundsSpec {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  std::vector<bool> relative;

  Bounds resolve(const ParamVector& prior) const {
    if (lower.size() != prior.size() || upper.size() != prior.size() ||
        relative.size() != static_cast<std::size_t>(prior.size())) {
      throw ArgumentError("bounds size does not match parameter vector size " +
                          std::to_string(prior.size()));
    }
    Bounds b{lower, upper};
    for (Eigen::Index i = 0; i < prior.size(); ++i) {
      if (relative[static_cast<std::size_t>(i)]) {
        b.lower[i] += prior[i];
        b.upper[i] += prior[i];
      }
    }
    if ((b.lower.array() > b.upper.array()).any()) {
      throw ArgumentError("lower bound exceeds upper bound");
    }
    if (!(b.lower[kSag] > 0.0)) {
      throw ArgumentError("sag lower bound must be strictly positive");
    }
    return b;
  }
};

/// Hyper-parameters of the estimator plus local solver tolerances.
struct EstimatorSettings {
  BoundsSpec bounds;
  int n_search = 2;
  Eigen::VectorXd sigma;  ///< per-parameter std-dev of restart perturbations
  LossWeights weights;
  int max_iterations = 200;
  double cost_tolerance = 1e-9;
  double step_tolerance = 1e-8;
  std::uint64_t seed = 0;

  void check(const ConductorConfig& config) const {
    const auto n = static_cast<Eigen::Index>(config.parameter_count());
    if (sigma.size() != n) {
      throw ArgumentError("sigma has " + std::to_string(sigma.size()) + " entries, expected " +
                          std::to_string(n));
    }
    if ((sigma.array() < 0.0).any()) throw ArgumentError("sigma must be non-negative");
    if (n_search < 0) throw ArgumentError("n_search must be non-negative");
    if (max_iterations < 1) throw ArgumentError("max_iterations must be at least 1");
  }
};

/// Defaults: translations prior +/- 50 m, psi prior +/- 0.5 rad,
/// a in [100, 5000] m, offsets in [0.1, 15] m; two perturbed restarts.
inline EstimatorSettings default_settings(const ConductorConfig& config) {
  const int n = config.parameter_count();
  const int l = config.offset_count();
  EstimatorSettings s;
  s.bounds.lower.resize(n);
  s.bounds.upper.resize(n);
  s.bounds.relative.assign(static_cast<std::size_t>(n), false);
  s.bounds.lower.head<5>() << -50.0, -50.0, -50.0, -0.5, 100.0;
  s.bounds.upper.head<5>() << 50.0, 50.0, 50.0, 0.5, 5000.0;
  for (int i = 0; i < 4; ++i) s.bounds.relative[static_cast<std::size_t>(i)] = true;
  s.bounds.lower.tail(l).setConstant(0.1);
  s.bounds.upper.tail(l).setConstant(15.0);

  s.sigma.resize(n);
  s.sigma.head<5>() << 5.0, 5.0, 2.0, 0.05, 500.0;
  s.sigma.tail(l).setConstant(0.5);

  s.weights.q_diagonal.resize(n);
  s.weights.q_diagonal.head<5>() << 0.1, 0.1, 0.1, 10.0, 1e-4;
  s.weights.q_diagonal.tail(l).setConstant(1.0);
  return s;
}

struct LocalSolution {
  ParamVector p;
  double cost = 0.0;
  int iterations = 0;
};

namespace detail {

inline double safe_cost(const ParamVector& p, const PointCloud& cloud, const ParamVector& prior,
                        const LossWeights& weights, const ConductorConfig& config,
                        LossEvaluation* eval) {
  try {
    *eval = evaluate_loss(p, cloud, prior, weights, config);
    return std::isfinite(eval->cost) ? eval->cost : std::numeric_limits<double>::infinity();
  } catch (const DomainError&) {
    return std::numeric_limits<double>::infinity();
  }
}

inline Eigen::MatrixXd initial_inverse_hessian(const Eigen::VectorXd& curvature) {
  Eigen::VectorXd h(curvature.size());
  for (Eigen::Index i = 0; i < curvature.size(); ++i) {
    h[i] = curvature[i] > 1e-12 ? 1.0 / curvature[i] : 1.0;
  }
  return h.asDiagonal();
}

}  // namespace detail

/// Projected BFGS on the box [lower, upper] from `p0`.
///
/// Variables pinned at a bound with the gradient pushing outward are frozen
/// for the iteration; the quasi-Newton step on the free variables is followed
/// along the projection arc with Armijo backtracking. The inverse Hessian
/// starts from the Gauss-Newton diagonal, which absorbs the large scale gap
/// between the sag parameter and the pose.
inline LocalSolution solve_local(const PointCloud& cloud, const ParamVector& prior,
                                 const ParamVector& p0, const Bounds& bounds,
                                 const EstimatorSettings& settings,
                                 const ConductorConfig& config) {
  ParamVector x(bounds.project(p0.values()));
  LossEvaluation eval;
  double f = detail::safe_cost(x, cloud, prior, settings.weights, config, &eval);
  if (!std::isfinite(f)) {
    std::ostringstream msg;
    msg << "non-finite cost at start point [" << x.values().transpose() << "]";
    throw SolverError(msg.str());
  }
  const Eigen::Index n = x.size();
  Eigen::VectorXd g = eval.gradient;
  Eigen::MatrixXd h = detail::initial_inverse_hessian(eval.curvature);

  constexpr double kArmijo = 1e-4;
  constexpr int kMaxBacktracks = 40;

  LocalSolution out{x, f, 0};
  for (int iter = 0; iter < settings.max_iterations; ++iter) {
    out.iterations = iter + 1;
    std::vector<bool> active(static_cast<std::size_t>(n), false);
    Eigen::VectorXd pg = g;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double tol = 1e-12 * (1.0 + std::abs(x[i]));
      const bool at_lower = x[i] <= bounds.lower[i] + tol && g[i] > 0.0;
      const bool at_upper = x[i] >= bounds.upper[i] - tol && g[i] < 0.0;
      if (at_lower || at_upper) {
        active[static_cast<std::size_t>(i)] = true;
        pg[i] = 0.0;
      }
    }
    if (pg.lpNorm<Eigen::Infinity>() == 0.0) break;

    bool accepted = false;
    Eigen::VectorXd x_new;
    double f_new = f;
    LossEvaluation eval_new;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      if (attempt == 1) h = detail::initial_inverse_hessian(eval.curvature);
      Eigen::MatrixXd h_free = h;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (active[static_cast<std::size_t>(i)]) {
          h_free.row(i).setZero();
          h_free.col(i).setZero();
        }
      }
      Eigen::VectorXd dir = -h_free * pg;
      if (g.dot(dir) >= 0.0) {
        if (attempt == 0) continue;
        dir = -pg;
      }
      double t = 1.0;
      for (int bt = 0; bt < kMaxBacktracks; ++bt, t *= 0.5) {
        x_new = bounds.project(x.values() + t * dir);
        const double decrease_model = g.dot(x_new - x.values());
        if (decrease_model >= 0.0) continue;
        f_new = detail::safe_cost(ParamVector(x_new), cloud, prior, settings.weights, config,
                                  &eval_new);
        if (f_new <= f + kArmijo * decrease_model) {
          accepted = true;
          break;
        }
      }
    }
    if (!accepted) break;

    const Eigen::VectorXd s = x_new - x.values();
    const Eigen::VectorXd y = eval_new.gradient - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd left = Eigen::MatrixXd::Identity(n, n) - rho * s * y.transpose();
      h = left * h * left.transpose() + rho * s * s.transpose();
    }
    const double decrease = f - f_new;
    x = ParamVector(x_new);
    f = f_new;
    g = eval_new.gradient;
    eval = std::move(eval_new);
    if (decrease < settings.cost_tolerance || s.lpNorm<Eigen::Infinity>() < settings.step_tolerance) {
      break;
    }
  }
  out.p = x;
  out.cost = f;
  return out;
}

/// Local minimization from `p0` with bounds resolved around `prior`.
inline LocalSolution solve_single(const PointCloud& cloud, const ParamVector& prior,
                                  const ParamVector& p0, const EstimatorSettings& settings,
                                  const ConductorConfig& config) {
  settings.check(config);
  prior.check(config);
  if (p0.size() != prior.size()) throw ArgumentError("start point size differs from prior");
  return solve_local(cloud, prior, p0, settings.bounds.resolve(prior), settings, config);
}

struct EstimationResult {
  ParamVector p_hat_new;
  double cost = 0.0;
  std::vector<PointTerm> per_point;
  int restarts_run = 0;
  int best_restart_index = 0;
  double solve_time_s = 0.0;
  std::vector<double> start_times_s;
  std::vector<double> start_costs;  ///< +inf for starts that failed
  std::vector<std::string> start_failures;
};

/// Starting points of one estimation: the prior itself, then `n_search`
/// Gaussian perturbations of it clamped into the bounds.
inline std::vector<ParamVector> start_points(const ParamVector& prior, const Bounds& bounds,
                                             const EstimatorSettings& settings) {
  std::vector<ParamVector> starts;
  starts.reserve(static_cast<std::size_t>(settings.n_search) + 1);
  starts.emplace_back(bounds.project(prior.values()));
  std::mt19937_64 rng(settings.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int s = 0; s < settings.n_search; ++s) {
    Eigen::VectorXd v = prior.values();
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] += settings.sigma[i] * normal(rng);
    starts.emplace_back(bounds.project(v));
  }
  return starts;
}

/// Multi-start estimation for one frame. Keeps the lowest-cost start; ties go
/// to the lower start index.
inline EstimationResult estimate_frame(const PointCloud& cloud, const ParamVector& prior,
                                       const EstimatorSettings& settings,
                                       const ConductorConfig& config) {
  using Clock = std::chrono::steady_clock;
  settings.check(config);
  prior.check(config);
  const Bounds bounds = settings.bounds.resolve(prior);
  if (!bounds.contains(prior.values())) {
    throw ArgumentError("prior lies outside the solver bounds");
  }
  const auto starts = start_points(prior, bounds, settings);

  EstimationResult result;
  result.restarts_run = static_cast<int>(starts.size());
  double best = std::numeric_limits<double>::infinity();
  std::optional<ParamVector> best_p;
  const auto t_all = Clock::now();
  for (std::size_t s = 0; s < starts.size(); ++s) {
    const auto t0 = Clock::now();
    try {
      const LocalSolution sol = solve_local(cloud, prior, starts[s], bounds, settings, config);
      result.start_costs.push_back(sol.cost);
      result.start_failures.emplace_back();
      if (sol.cost < best) {
        best = sol.cost;
        best_p = sol.p;
        result.best_restart_index = static_cast<int>(s);
      }
    } catch (const std::exception& e) {
      result.start_costs.push_back(std::numeric_limits<double>::infinity());
      result.start_failures.emplace_back(e.what());
    }
    result.start_times_s.push_back(std::chrono::duration<double>(Clock::now() - t0).count());
  }
  result.solve_time_s = std::chrono::duration<double>(Clock::now() - t_all).count();

  if (!best_p) {
    std::string msg = "all " + std::to_string(starts.size()) + " solver starts failed:";
    for (std::size_t s = 0; s < result.start_failures.size(); ++s) {
      msg += " [" + std::to_string(s) + "] " + result.start_failures[s];
    }
    throw SolverError(msg);
  }
  result.p_hat_new = *best_p;
  const LossReport report = total_loss(*best_p, cloud, prior, settings.weights, config);
  result.cost = report.total;
  result.per_point = report.per_point;
  return result;
}

/// Seed used for frame `t` of a tracked sequence.
inline std::uint64_t frame_seed(std::uint64_t seed, std::size_t t) {
  // splitmix64 finalizer over (seed, t)
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (static_cast<std::uint64_t>(t) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Frame loop: frame t is estimated with the frame t-1 estimate as prior.
inline std::vector<EstimationResult> track_sequence(const std::vector<PointCloud>& frames,
                                                    const ParamVector& initial_prior,
                                                    const EstimatorSettings& settings,
                                                    const ConductorConfig& config) {
  if (frames.empty()) throw ArgumentError("track_sequence needs at least one frame");
  std::vector<EstimationResult> results;
  results.reserve(frames.size());
  ParamVector prior = initial_prior;
  EstimatorSettings frame_settings = settings;
  for (std::size_t t = 0; t < frames.size(); ++t) {
    frame_settings.seed = frame_seed(settings.seed, t);
    try {
      results.push_back(estimate_frame(frames[t], prior, frame_settings, config));
    } catch (const SolverError& e) {
      throw SolverError("frame " + std::to_string(t) + ": " + e.what());
    }
    prior = results.back().p_hat_new;
  }
  return results;
}

}  // namespace catarray
