#ifndef DCREG_PIPELINE_HPP
#define DCREG_PIPELINE_HPP

#include <optional>
#include <string>
#include <vector>

#include "dcreg/characterizer.hpp"
#include "dcreg/mitigator.hpp"

namespace dcreg {

enum class SolverKind { kDcregPcg, kSr, kTsvd, kTreg, kPlain };

std::string solver_name(SolverKind kind);
std::optional<SolverKind> solver_from_name(const std::string& name);

struct SolverConfig {
  double kappa_th = 10.0;           // detection threshold on normalized eigenvalues
  double kappa_tg = 10.0;           // preconditioner target condition number
  int max_icp_iterations = 30;      // 30 simulated / 10 real-world
  double trans_convergence = 1e-3;  // m
  double rot_convergence = 1e-5;    // rad
  double corr_radius = 1.0;         // m
  double pcg_tol = 1e-6;
  int pcg_max_iter = 10;
  SolverKind solver = SolverKind::kDcregPcg;
  double treg_lambda = 100.0;

  void validate() const;
};

/// One completed ICP iteration. kappa_* are the raw Schur condition numbers
/// at detection time; clamped_kappa_* the post-mitigation subspace values the
/// preconditioned solve actually faces (equal to the raw ones for solvers
/// that do not precondition).
struct IterationTrace {
  int iteration = 0;
  RigidTransform pose;
  std::size_t correspondence_count = 0;
  double residual_rmse = 0.0;
  double update_rot_norm = 0.0;    // rad
  double update_trans_norm = 0.0;  // m
  double kappa_r = 1.0;
  double kappa_t = 1.0;
  double clamped_kappa_r = 1.0;
  double clamped_kappa_t = 1.0;
  double diag_kappa_r = 1.0;  // kappa(H_RR), diagonal-block comparison
  double diag_kappa_t = 1.0;  // kappa(H_tt)
  double full_kappa = 1.0;    // kappa of the 6x6 Hessian
  DegeneracyMask mask;
  int pcg_iterations = 0;
};

enum class ConvergenceReason {
  kConverged,
  kMaxIterations,
  kNoCorrespondences,
  kDiverged,
  kSingularSystem,
  kNoInformation,  // detection found no positive eigenvalue
};

std::string reason_name(ConvergenceReason reason);

struct RegistrationMetrics {
  double fitness_pct = 0.0;
  double rmse = 0.0;
  double chamfer = 0.0;
  std::optional<double> trans_error = std::nullopt;      // m, vs ground truth
  std::optional<double> rot_error_deg = std::nullopt;
};

struct RegistrationResult {
  RigidTransform final_pose;
  bool converged = false;
  ConvergenceReason reason = ConvergenceReason::kMaxIterations;
  std::vector<IterationTrace> trace;
  RegistrationMetrics metrics;
};

/// Point-to-plane ICP with per-iteration degeneracy detection,
/// characterization and the configured mitigation. Target normals are
/// estimated (k = 5) when absent. Convergence requires both update norms
/// under their thresholds.
RegistrationResult register_clouds(const PointCloud& source, const PointCloud& target,
                                   const RigidTransform& init, const SolverConfig& config);

/// Inlier fraction (%) and inlier RMSE of source-vs-target nearest-neighbor
/// distances at the given pose.
std::pair<double, double> fitness_and_rmse(const PointCloud& source, const KdTree& target_index,
                                           const RigidTransform& pose, double inlier_radius);

/// Symmetric mean nearest-neighbor distance between two clouds.
double chamfer_distance(const PointCloud& a, const PointCloud& b);

/// Translation gap (m) and rotation gap (deg, trace formula on R_e R_g^T).
std::pair<double, double> pose_error(const RigidTransform& estimate,
                                     const RigidTransform& ground_truth);

}  // namespace dcreg

#endif
