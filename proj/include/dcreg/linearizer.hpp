#ifndef DCREG_LINEARIZER_HPP
#define DCREG_LINEARIZER_HPP

#include <vector>

#include "dcreg/kdtree.hpp"
#include "dcreg/point_cloud.hpp"
#include "dcreg/se3.hpp"

namespace dcreg {

/// One point-to-plane pair. source_point is the source point already mapped
/// through the current pose; the residual and Jacobian are evaluated at that
/// linearization point.
struct Correspondence {
  Vector3 source_point;   // pose * original source point
  Vector3 target_point;
  Vector3 target_normal;  // unit
  double distance;        // ||source_point - target_point||
};

/// 6x6 Gauss-Newton normal equations in block form, parameter order
/// [phi; delta_t]:
///
///   H = | h_rr  h_rt |     g = | g_r |
///       | h_rt' h_tt |         | g_t |
///
/// h_rr carries the lever-arm (rad^-2) curvature, h_tt the translational
/// (m^-2) curvature.
struct HessianSystem {
  Matrix3 h_rr = Matrix3::Zero();
  Matrix3 h_rt = Matrix3::Zero();
  Matrix3 h_tt = Matrix3::Zero();
  Vector3 g_r = Vector3::Zero();
  Vector3 g_t = Vector3::Zero();
  double residual_sq_sum = 0.0;
  std::size_t count = 0;

  Matrix6 full() const {
    Matrix6 h;
    h.topLeftCorner<3, 3>() = h_rr;
    h.topRightCorner<3, 3>() = h_rt;
    h.bottomLeftCorner<3, 3>() = h_rt.transpose();
    h.bottomRightCorner<3, 3>() = h_tt;
    return h;
  }

  Vector6 gradient() const {
    Vector6 g;
    g << g_r, g_t;
    return g;
  }

  double residual_rmse() const {
    return count == 0 ? 0.0 : std::sqrt(residual_sq_sum / static_cast<double>(count));
  }
};

/// Row-stacked Jacobian split into rotational and translational columns,
/// plus the residual vector. Feeds the projection-form Schur oracle.
struct StackedJacobian {
  Eigen::Matrix<double, Eigen::Dynamic, 3> rot;
  Eigen::Matrix<double, Eigen::Dynamic, 3> trans;
  Eigen::VectorXd residuals;
};

/// Nearest-neighbor matching at the given pose. Each source point maps
/// through `pose`, takes its single nearest target neighbor, and the pair is
/// kept iff the Euclidean gap is within max_distance and the target normal
/// is valid. Output order follows source index order.
///
/// Throws NoCorrespondences when nothing survives the gate.
std::vector<Correspondence> find_correspondences(const PointCloud& source,
                                                 const KdTree& target_index,
                                                 const PointCloud& target,
                                                 const RigidTransform& pose,
                                                 double max_distance);

/// Point-to-plane residual r = n.(p - q) and its 1x6 Jacobian row
/// J = [-n^T [p]_x | n^T] at the linearization point.
void residual_jacobian(const Correspondence& c, double& r, Eigen::Matrix<double, 1, 6>& jac);

/// Blockwise accumulation H = sum J_i^T J_i, g = sum J_i^T r_i. Chunked
/// fixed-order reduction keeps the sums bitwise identical for any thread
/// count. Throws NoCorrespondences on empty input.
HessianSystem assemble_system(const std::vector<Correspondence>& correspondences);

/// The stacked [J_R | J_t] and residuals for the same correspondences.
StackedJacobian stack_jacobian(const std::vector<Correspondence>& correspondences);

}  // namespace dcreg

#endif
