#pragma once

#include "catarray/config.hpp"
#include "catarray/geometry.hpp"
#include "catarray/params.hpp"
#include "catarray/types.hpp"

#include <Eigen/Core>

#include <cmath>
#include <numbers>
#include <vector>

namespace catarray {

/// Logarithm used by the Lorentzian point cost. Base 10 is the default; the
/// base only rescales the points cost, so it never moves a minimizer when Q = 0.
enum class CostBase { kLog10, kNatural };

/// Weights of the regularized loss.
///
/// `point_weights` empty means uniform 1; a single entry is broadcast to every
/// point. `q_diagonal` is the diagonal of Q; empty means Q = 0.
struct LossWeights {
  Eigen::VectorXd point_weights;
  Eigen::VectorXd q_diagonal;
  CostBase base = CostBase::kLog10;

  double point_weight(std::size_t i) const {
    if (point_weights.size() == 0) return 1.0;
    if (point_weights.size() == 1) return point_weights[0];
    return point_weights[static_cast<Eigen::Index>(i)];
  }

  void check(std::size_t n_points, Eigen::Index n_params) const {
    if (point_weights.size() > 1 && static_cast<std::size_t>(point_weights.size()) != n_points) {
      throw ArgumentError("point weight vector has " + std::to_string(point_weights.size()) +
                          " entries for " + std::to_string(n_points) + " points");
    }
    if ((point_weights.array() < 0.0).any()) {
      throw ArgumentError("point weights must be non-negative");
    }
    if (q_diagonal.size() != 0 && q_diagonal.size() != n_params) {
      throw ArgumentError("Q diagonal has " + std::to_string(q_diagonal.size()) +
                          " entries for " + std::to_string(n_params) + " parameters");
    }
    if ((q_diagonal.array() < 0.0).any()) {
      throw ArgumentError("Q diagonal must be non-negative");
    }
  }
};

inline double log_base_factor(CostBase base) {
  return base == CostBase::kLog10 ? std::numbers::ln10 : 1.0;
}

/// Lorentzian cost log(1 + d^2) in the given base.
inline double point_cost(double d, CostBase base = CostBase::kLog10) {
  return std::log1p(d * d) / log_base_factor(base);
}

struct PointTerm {
  double d = 0.0;
  double cost = 0.0;
  int k_star = 0;
};

struct LossReport {
  double total = 0.0;
  double points_cost = 0.0;
  double regularization = 0.0;
  std::vector<PointTerm> per_point;
};

namespace detail {

inline double regularization_term(const ParamVector& p, const ParamVector& prior,
                                  const LossWeights& weights) {
  if (weights.q_diagonal.size() == 0) return 0.0;
  const Eigen::VectorXd diff = prior.values() - p.values();
  return (weights.q_diagonal.array() * diff.array().square()).sum();
}

inline void check_inputs(const ParamVector& p, const PointCloud& cloud, const ParamVector& prior,
                         const LossWeights& weights, const ConductorConfig& config) {
  p.check(config);
  if (prior.size() != p.size()) {
    throw ArgumentError("prior and parameter vector sizes differ");
  }
  weights.check(cloud.size(), p.size());
}

}  // namespace detail

/// J(p) = sum_i R_i c_i(p) + (prior - p)^T Q (prior - p).
inline LossReport total_loss(const ParamVector& p, const PointCloud& cloud,
                             const ParamVector& prior, const LossWeights& weights,
                             const ConductorConfig& config) {
  detail::check_inputs(p, cloud, prior, weights, config);
  const ArrayModel model(p, config);
  LossReport report;
  report.per_point.reserve(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const ConductorDistance cd = model.distance(cloud.points[i]);
    const double c = point_cost(cd.d, weights.base);
    report.per_point.push_back({cd.d, c, cd.k_star});
    report.points_cost += weights.point_weight(i) * c;
  }
  report.regularization = detail::regularization_term(p, prior, weights);
  report.total = report.points_cost + report.regularization;
  return report;
}

/// Cost, gradient and a Gauss-Newton estimate of the Hessian diagonal from a
/// single pass over the cloud.
struct LossEvaluation {
  double cost = 0.0;
  Eigen::VectorXd gradient;
  Eigen::VectorXd curvature;
};

/// Evaluates the loss and its analytical gradient.
///
/// Each point is attached to its nearest conductor k* at `p`, and k* is held
/// fixed while differentiating. The per-point chain is
///   dc/dp = dc/dd * (e / d)^T * de/dp = 2 e^T de/dp / (ln(b) (1 + d^2)),
/// which tends to 0 with d, so points on the model contribute nothing.
/// The regularization gradient is +2 Q (p - prior).
inline LossEvaluation evaluate_loss(const ParamVector& p, const PointCloud& cloud,
                                    const ParamVector& prior, const LossWeights& weights,
                                    const ConductorConfig& config, bool with_gradient = true) {
  detail::check_inputs(p, cloud, prior, weights, config);
  const ArrayModel model(p, config);
  const Eigen::Index n = p.size();
  const int l_count = config.offset_count();
  const double ln_base = log_base_factor(weights.base);
  const double a = p.a();
  const double c = model.cos_psi();
  const double s = model.sin_psi();

  LossEvaluation out;
  out.gradient = Eigen::VectorXd::Zero(n);
  out.curvature = Eigen::VectorXd::Zero(n);

  // Rows 2 and 3 of de/dp; row 1 is identically zero.
  Eigen::VectorXd lateral(n);
  Eigen::VectorXd vertical(n);

  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Point3& pt = cloud.points[i];
    const ConductorDistance cd = model.distance(pt);
    const double r = weights.point_weight(i);
    out.cost += r * point_cost(cd.d, weights.base);
    if (!with_gradient || r == 0.0 || cd.d == 0.0) continue;

    const int k = cd.k_star;
    const double dx = pt.x() - p.x_o();
    const double dy = pt.y() - p.y_o();
    const double u = cd.x_j / a;
    const double sh = std::sinh(u);
    const double dz_da = std::cosh(u) - u * sh - 1.0;
    const double dxj_dpsi = -s * dx + c * dy;

    lateral.setZero();
    vertical.setZero();
    lateral[kXo] = s;
    lateral[kYo] = -c;
    lateral[kPsi] = -c * dx - s * dy;
    vertical[kXo] = sh * c;  // -dz/dx_j * dx_j/dx_o with dx_j/dx_o = -c
    vertical[kYo] = sh * s;
    vertical[kZo] = -1.0;
    vertical[kPsi] = -sh * dxj_dpsi;
    vertical[kSag] = -dz_da;
    for (int l = 0; l < l_count; ++l) {
      const auto col = config.offset_jacobian(l).col(k);
      lateral[kFirstOffset + l] = -col.y();
      // dz_j/dx_k = -sinh(u), so -dz_j/dx_k * dx_k/d(delta) = +sinh(u) dx_k/d(delta).
      vertical[kFirstOffset + l] = sh * col.x() - col.z();
    }

    const double scale = 2.0 / (ln_base * (1.0 + cd.d * cd.d));
    out.gradient += (r * scale) * (cd.e_c.y() * lateral + cd.e_c.z() * vertical);
    out.curvature += (r * scale) * (lateral.array().square() + vertical.array().square()).matrix();
  }

  out.cost += detail::regularization_term(p, prior, weights);
  if (with_gradient && weights.q_diagonal.size() != 0) {
    out.gradient += 2.0 * (weights.q_diagonal.array() * (p.values() - prior.values()).array())
                              .matrix();
    out.curvature += 2.0 * weights.q_diagonal;
  }
  return out;
}

inline Eigen::VectorXd loss_gradient(const ParamVector& p, const PointCloud& cloud,
                                     const ParamVector& prior, const LossWeights& weights,
                                     const ConductorConfig& config) {
  return evaluate_loss(p, cloud, prior, weights, config).gradient;
}

}  // namespace catarray
