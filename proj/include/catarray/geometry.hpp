#pragma once

#include "catarray/config.hpp"
#include "catarray/params.hpp"
#include "catarray/types.hpp"

#include <Eigen/Core>

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace catarray {

/// Largest |x / a| accepted by the catenary; cosh overflows double near 710.
inline constexpr double kMaxCatenaryRatio = 700.0;

namespace detail {

inline void check_ratio(double ratio) {
  if (!(std::abs(ratio) <= kMaxCatenaryRatio)) {
    std::ostringstream msg;
    msg << "catenary argument x/a = " << ratio << " outside [-" << kMaxCatenaryRatio << ", "
        << kMaxCatenaryRatio << "]";
    throw DomainError(msg.str());
  }
}

}  // namespace detail

/// Height of a catenary with sag parameter `a` above its vertex at abscissa `x`.
inline double catenary_z(double x, double a) {
  const double ratio = x / a;
  detail::check_ratio(ratio);
  // a (cosh u - 1) = 2 a sinh^2(u / 2), which keeps precision near the vertex.
  const double s = std::sinh(0.5 * ratio);
  return 2.0 * a * s * s;
}

inline Eigen::Matrix3Xd offset_matrix(const ConductorConfig& config,
                                      const Eigen::Ref<const Eigen::VectorXd>& deltas) {
  return config.offset_matrix(deltas);
}

/// Distance from a point to the array and the conductor it is attached to.
struct ConductorDistance {
  double d = 0.0;
  int k_star = 0;
  Eigen::Vector3d e_c = Eigen::Vector3d::Zero();  ///< error in the catenary basis
  double x_j = 0.0;                               ///< associated abscissa on conductor k_star
};

/// Precomputed view of the array model for one parameter vector. Cheap to
/// build; hot loops (loss, metrics) build one per evaluation and reuse it.
class ArrayModel {
 public:
  ArrayModel(const ParamVector& p, const ConductorConfig& config)
      : config_(&config),
        p_(p),
        cos_psi_(std::cos(p.psi())),
        sin_psi_(std::sin(p.psi())) {
    p.check(config);
    offsets_ = config.offset_matrix(p.deltas());
  }

  const ParamVector& params() const { return p_; }
  const ConductorConfig& config() const { return *config_; }
  int conductor_count() const { return config_->conductor_count(); }
  const Eigen::Matrix3Xd& offsets() const { return offsets_; }
  double cos_psi() const { return cos_psi_; }
  double sin_psi() const { return sin_psi_; }

  Point3 forward_point(int k, double x_j) const {
    check_conductor(k);
    const double xc = x_j + offsets_(0, k);
    const double yc = offsets_(1, k);
    const double zc = catenary_z(x_j, p_.a()) + offsets_(2, k);
    return {cos_psi_ * xc - sin_psi_ * yc + p_.x_o(), sin_psi_ * xc + cos_psi_ * yc + p_.y_o(),
            zc + p_.z_o()};
  }

  /// Abscissa of the model point cut by the plane through `pt` normal to c1.
  double associate_x(int k, const Point3& pt) const {
    check_conductor(k);
    return cos_psi_ * (pt.x() - p_.x_o()) + sin_psi_ * (pt.y() - p_.y_o()) - offsets_(0, k);
  }

  Eigen::Vector3d error_vector(int k, const Point3& pt) const {
    const double x_j = associate_x(k, pt);
    return error_at(k, pt, x_j);
  }

  ConductorDistance distance(const Point3& pt) const {
    ConductorDistance best;
    best.d = std::numeric_limits<double>::infinity();
    for (int k = 0; k < conductor_count(); ++k) {
      const double x_j = associate_x(k, pt);
      const Eigen::Vector3d e = error_at(k, pt, x_j);
      const double d = e.norm();
      if (d < best.d) {  // strict: ties keep the lowest index
        best.d = d;
        best.k_star = k;
        best.e_c = e;
        best.x_j = x_j;
      }
    }
    return best;
  }

 private:
  void check_conductor(int k) const {
    if (k < 0 || k >= conductor_count()) {
      throw ArgumentError("conductor index " + std::to_string(k) + " outside [0, " +
                          std::to_string(conductor_count()) + ")");
    }
  }

  Eigen::Vector3d error_at(int k, const Point3& pt, double x_j) const {
    const double dx = pt.x() - p_.x_o();
    const double dy = pt.y() - p_.y_o();
    return {0.0, -sin_psi_ * dx + cos_psi_ * dy - offsets_(1, k),
            pt.z() - p_.z_o() - offsets_(2, k) - catenary_z(x_j, p_.a())};
  }

  const ConductorConfig* config_;
  ParamVector p_;
  double cos_psi_;
  double sin_psi_;
  Eigen::Matrix3Xd offsets_;
};

inline Point3 forward_point(const ParamVector& p, const ConductorConfig& config, int k,
                            double x_j) {
  return ArrayModel(p, config).forward_point(k, x_j);
}

inline double associate_x(const ParamVector& p, const ConductorConfig& config, int k,
                          const Point3& pt) {
  return ArrayModel(p, config).associate_x(k, pt);
}

inline Eigen::Vector3d error_vector(const ParamVector& p, const ConductorConfig& config, int k,
                                    const Point3& pt) {
  return ArrayModel(p, config).error_vector(k, pt);
}

inline ConductorDistance distance_to_model(const ParamVector& p, const ConductorConfig& config,
                                           const Point3& pt) {
  return ArrayModel(p, config).distance(pt);
}

/// n uniformly spaced model points per conductor over [x_min, x_max].
inline std::vector<std::vector<Point3>> sample_curves(const ParamVector& p,
                                                      const ConductorConfig& config,
                                                      double x_min, double x_max, int n) {
  if (n < 2) throw ArgumentError("sample_curves needs n >= 2");
  if (!(x_min < x_max)) throw ArgumentError("sample_curves needs x_min < x_max");
  const ArrayModel model(p, config);
  std::vector<std::vector<Point3>> curves(model.conductor_count());
  const double step = (x_max - x_min) / (n - 1);
  for (int k = 0; k < model.conductor_count(); ++k) {
    curves[k].reserve(n);
    for (int j = 0; j < n; ++j) {
      const double x_j = (j == n - 1) ? x_max : x_min + j * step;
      curves[k].push_back(model.forward_point(k, x_j));
    }
  }
  return curves;
}

}  // namespace catarray
