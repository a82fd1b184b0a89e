#pragma once

#include "catarray/types.hpp"

#include <Eigen/Core>

#include <string>
#include <utility>
#include <vector>

namespace catarray {

/// Layout of a conductor array: q conductors whose vertex offsets in the
/// catenary frame are a linear function of l internal offset parameters.
///
/// Column k of offset_jacobians[l] holds d(x_k, y_k, z_k)/d(delta_l). Because
/// every supported layout is linear with a zero matrix at delta = 0, the
/// jacobians fully determine the offset matrix.
class ConductorConfig {
 public:
  ConductorConfig(std::string name, int conductor_count,
                  std::vector<Eigen::Matrix3Xd> offset_jacobians)
      : name_(std::move(name)),
        conductor_count_(conductor_count),
        offset_jacobians_(std::move(offset_jacobians)) {
    if (conductor_count_ < 1) {
      throw ArgumentError("conductor config '" + name_ + "': needs at least one conductor");
    }
    for (const auto& jac : offset_jacobians_) {
      if (jac.cols() != conductor_count_) {
        throw ArgumentError("conductor config '" + name_ +
                            "': offset jacobian column count differs from conductor count");
      }
    }
  }

  const std::string& name() const { return name_; }
  int conductor_count() const { return conductor_count_; }
  int offset_count() const { return static_cast<int>(offset_jacobians_.size()); }
  int parameter_count() const { return 5 + offset_count(); }

  const std::vector<Eigen::Matrix3Xd>& offset_jacobians() const { return offset_jacobians_; }
  const Eigen::Matrix3Xd& offset_jacobian(int l) const { return offset_jacobians_.at(l); }

  /// 3 x q matrix of per-conductor translations [x_k; y_k; z_k].
  Eigen::Matrix3Xd offset_matrix(const Eigen::Ref<const Eigen::VectorXd>& deltas) const {
    if (deltas.size() != offset_count()) {
      throw ArgumentError("conductor config '" + name_ + "' expects " +
                          std::to_string(offset_count()) + " offset parameters, got " +
                          std::to_string(deltas.size()));
    }
    Eigen::Matrix3Xd m = Eigen::Matrix3Xd::Zero(3, conductor_count_);
    for (int l = 0; l < offset_count(); ++l) {
      m += deltas[l] * offset_jacobians_[l];
    }
    return m;
  }

 private:
  std::string name_;
  int conductor_count_;
  std::vector<Eigen::Matrix3Xd> offset_jacobians_;
};

namespace detail {

inline Eigen::Matrix3Xd row_pattern(int q, int row, std::initializer_list<double> values) {
  Eigen::Matrix3Xd m = Eigen::Matrix3Xd::Zero(3, q);
  int k = 0;
  for (double v : values) m(row, k++) = v;
  return m;
}

}  // namespace detail

/// Single conductor, no internal offsets.
inline ConductorConfig single_conductor_config() { return ConductorConfig("1", 1, {}); }

/// Three conductors on a horizontal crossarm plus two above it:
///   y row = [-d1, 0, d1, -d3, d3], z row = [0, 0, 0, d2, d2].
inline ConductorConfig config_32() {
  std::vector<Eigen::Matrix3Xd> jac;
  jac.push_back(detail::row_pattern(5, 1, {-1, 0, 1, 0, 0}));
  jac.push_back(detail::row_pattern(5, 2, {0, 0, 0, 1, 1}));
  jac.push_back(detail::row_pattern(5, 1, {0, 0, 0, -1, 1}));
  return ConductorConfig("32", 5, std::move(jac));
}

/// Double circuit: two vertical stacks of three conductors.
/// d1 is half the horizontal stack separation, d2 the vertical spacing.
inline ConductorConfig config_222() {
  std::vector<Eigen::Matrix3Xd> jac;
  jac.push_back(detail::row_pattern(6, 1, {-1, -1, -1, 1, 1, 1}));
  jac.push_back(detail::row_pattern(6, 2, {0, 1, 2, 0, 1, 2}));
  return ConductorConfig("222", 6, std::move(jac));
}

inline std::vector<std::string> catalog_names() { return {"1", "32", "222"}; }

inline ConductorConfig config_by_name(const std::string& name) {
  if (name == "1") return single_conductor_config();
  if (name == "32") return config_32();
  if (name == "222") return config_222();
  throw ArgumentError("unknown conductor config '" + name + "' (known: 1, 32, 222)");
}

}  // namespace catarray
