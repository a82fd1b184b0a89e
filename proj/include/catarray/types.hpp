#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace catarray {

/// World-frame point, meters.
using Point3 = Eigen::Vector3d;

/// One LiDAR frame. Point order is stable; index i identifies a point within the frame.
struct PointCloud {
  std::vector<Point3> points;
  std::size_t frame_index = 0;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

/// Raised when a model evaluation leaves the representable range (e.g. cosh overflow).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised on malformed arguments: wrong vector lengths, unknown names, degenerate specs.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when the optimizer cannot produce a result.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace catarray
