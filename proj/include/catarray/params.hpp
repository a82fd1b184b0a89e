#pragma once

#include "catarray/config.hpp"
#include "catarray/types.hpp"

#include <Eigen/Core>

#include <initializer_list>
#include <string>
#include <utility>

namespace catarray {

/// Slot of each entry in the (5 + l)-vector [x_o, y_o, z_o, psi, a, delta_1 .. delta_l].
enum ParamIndex : Eigen::Index {
  kXo = 0,
  kYo = 1,
  kZo = 2,
  kPsi = 3,
  kSag = 4,
  kFirstOffset = 5,
};

/// Array pose, sag and internal offsets.
///
/// (x_o, y_o, z_o) locates the catenary frame origin, the vertex of the
/// reference curve. That vertex may be virtual: it need not lie on any
/// physical conductor, and for steep spans it may sit outside the span.
class ParamVector {
 public:
  ParamVector() : values_(Eigen::VectorXd::Zero(5)) { values_[kSag] = 1.0; }

  explicit ParamVector(Eigen::VectorXd values) : values_(std::move(values)) {
    if (values_.size() < 5) {
      throw ArgumentError("parameter vector needs at least 5 entries, got " +
                          std::to_string(values_.size()));
    }
  }

  ParamVector(double x_o, double y_o, double z_o, double psi, double a,
              std::initializer_list<double> deltas = {})
      : values_(5 + static_cast<Eigen::Index>(deltas.size())) {
    values_.head<5>() << x_o, y_o, z_o, psi, a;
    Eigen::Index i = kFirstOffset;
    for (double d : deltas) values_[i++] = d;
  }

  double x_o() const { return values_[kXo]; }
  double y_o() const { return values_[kYo]; }
  double z_o() const { return values_[kZo]; }
  double psi() const { return values_[kPsi]; }
  double a() const { return values_[kSag]; }

  auto deltas() const { return values_.tail(values_.size() - 5); }
  double delta(int l) const { return values_[kFirstOffset + l]; }

  Eigen::Index size() const { return values_.size(); }
  int offset_count() const { return static_cast<int>(values_.size() - 5); }

  const Eigen::VectorXd& values() const { return values_; }
  Eigen::VectorXd& values() { return values_; }

  double operator[](Eigen::Index i) const { return values_[i]; }
  double& operator[](Eigen::Index i) { return values_[i]; }

  bool operator==(const ParamVector& other) const {
    return values_.size() == other.values_.size() && values_ == other.values_;
  }

  /// Throws ArgumentError unless the vector matches `config` and a > 0.
  void check(const ConductorConfig& config) const {
    if (offset_count() != config.offset_count()) {
      throw ArgumentError("config '" + config.name() + "' expects " +
                          std::to_string(config.parameter_count()) + " parameters, got " +
                          std::to_string(values_.size()));
    }
    if (!(a() > 0.0)) {
      throw ArgumentError("sag parameter must be positive, got " + std::to_string(a()));
    }
  }

 private:
  Eigen::VectorXd values_;
};

}  // namespace catarray
