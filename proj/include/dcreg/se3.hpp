#ifndef DCREG_SE3_HPP
#define DCREG_SE3_HPP

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <cmath>

#include "dcreg/errors.hpp"

namespace dcreg {

using Vector3 = Eigen::Vector3d;
using Matrix3 = Eigen::Matrix3d;
using Vector6 = Eigen::Matrix<double, 6, 1>;
using Matrix6 = Eigen::Matrix<double, 6, 6>;

/// Skew-symmetric operator: skew(v) * w == v x w.
inline Matrix3 skew(const Vector3& v) {
  Matrix3 m;
  // clang-format off
  m <<    0.0, -v.z(),  v.y(),
        v.z(),    0.0, -v.x(),
       -v.y(),  v.x(),    0.0;
  // clang-format on
  return m;
}

/// SO(3) exponential map (Rodrigues). Below 1e-8 rad the trig coefficients
/// are replaced by their second-order Taylor expansions; at that magnitude
/// the truncation error is under 1e-16, while the exact formula would divide
/// by a vanishing angle.
inline Matrix3 exp_so3(const Vector3& phi) {
  const double theta = phi.norm();
  const Matrix3 k = skew(phi);
  double a, b;  // R = I + a*K + b*K^2
  if (theta < 1e-8) {
    const double t2 = theta * theta;
    a = 1.0 - t2 / 6.0;
    b = 0.5 - t2 / 24.0;
  } else {
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / (theta * theta);
  }
  return Matrix3::Identity() + a * k + b * (k * k);
}

/// Rigid transform {R, t}. Immutable after construction; construction and
/// every update re-validate orthonormality (||R^T R - I||_F <= 1e-9,
/// det(R) within 1e-9 of 1).
class RigidTransform {
 public:
  RigidTransform() : rotation_(Matrix3::Identity()), translation_(Vector3::Zero()) {}

  RigidTransform(const Matrix3& rotation, const Vector3& translation)
      : rotation_(rotation), translation_(translation) {
    renormalize();
    validate();
  }

  static RigidTransform identity() { return RigidTransform(); }

  const Matrix3& rotation() const { return rotation_; }
  const Vector3& translation() const { return translation_; }

  Vector3 apply(const Vector3& p) const { return rotation_ * p + translation_; }

  RigidTransform compose(const RigidTransform& other) const {
    return RigidTransform(rotation_ * other.rotation_,
                          rotation_ * other.translation_ + translation_);
  }

  RigidTransform inverse() const {
    return RigidTransform(rotation_.transpose(), -(rotation_.transpose() * translation_));
  }

  double orthonormality_error() const {
    return (rotation_.transpose() * rotation_ - Matrix3::Identity()).norm();
  }

 private:
  /// One Newton step of the polar projection R <- R(3I - R^T R)/2; for a
  /// near-orthonormal input this squares the orthonormality error, keeping
  /// long update chains within the 1e-9 invariant.
  void renormalize() {
    rotation_ = rotation_ * (3.0 * Matrix3::Identity() - rotation_.transpose() * rotation_) * 0.5;
  }

  void validate() const {
    if (!rotation_.allFinite() || !translation_.allFinite()) {
      throw DivergedIncrement("rigid transform has non-finite entries");
    }
    if (orthonormality_error() > 1e-9) {
      throw DivergedIncrement("rotation lost orthonormality");
    }
    if (std::abs(rotation_.determinant() - 1.0) > 1e-9) {
      throw DivergedIncrement("rotation determinant drifted from 1");
    }
  }

  Matrix3 rotation_;
  Vector3 translation_;
};

/// Minimal update [phi; delta_t]: axis-angle rotation increment and
/// translation increment.
struct PoseIncrement {
  Vector3 phi = Vector3::Zero();
  Vector3 delta_t = Vector3::Zero();

  static PoseIncrement from_vector(const Vector6& xi) {
    PoseIncrement inc;
    inc.phi = xi.head<3>();
    inc.delta_t = xi.tail<3>();
    return inc;
  }

  Vector6 to_vector() const {
    Vector6 xi;
    xi << phi, delta_t;
    return xi;
  }

  double rotation_norm() const { return phi.norm(); }
  double translation_norm() const { return delta_t.norm(); }
};

/// Left-multiplicative pose update: R <- exp_so3(phi) * R, t <- t + delta_t.
/// The linearizer's Jacobian signs assume exactly this composition.
inline RigidTransform apply_increment(const RigidTransform& pose, const PoseIncrement& xi) {
  if (!xi.phi.allFinite() || !xi.delta_t.allFinite()) {
    throw DivergedIncrement("pose increment has non-finite entries");
  }
  if (xi.phi.norm() >= M_PI) {
    throw DivergedIncrement("rotation increment magnitude reached pi");
  }
  return RigidTransform(exp_so3(xi.phi) * pose.rotation(), pose.translation() + xi.delta_t);
}

inline Vector3 transform_point(const RigidTransform& pose, const Vector3& p) {
  return pose.apply(p);
}

}  // namespace dcreg

#endif
