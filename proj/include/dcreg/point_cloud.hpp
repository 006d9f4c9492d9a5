#ifndef DCREG_POINT_CLOUD_HPP
#define DCREG_POINT_CLOUD_HPP

#include <vector>

#include "dcreg/se3.hpp"

namespace dcreg {

/// Point set with optional per-point unit normals. A zero normal is the
/// sentinel for "no reliable normal here" (degenerate neighborhood); such
/// points are skipped by correspondence search.
struct PointCloud {
  std::vector<Vector3> points;
  std::vector<Vector3> normals;  // empty, or same length as points

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  bool has_normals() const { return !normals.empty(); }

  /// True when the stored normal is usable (unit within 1e-6).
  bool normal_valid(std::size_t i) const {
    return has_normals() && std::abs(normals[i].norm() - 1.0) <= 1e-6;
  }

  PointCloud transformed(const RigidTransform& pose) const {
    PointCloud out;
    out.points.reserve(points.size());
    for (const auto& p : points) out.points.push_back(pose.apply(p));
    out.normals.reserve(normals.size());
    for (const auto& n : normals) {
      out.normals.push_back(n.isZero() ? Vector3::Zero() : Vector3(pose.rotation() * n));
    }
    return out;
  }
};

}  // namespace dcreg

#endif
