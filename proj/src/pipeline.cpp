#include "dcreg/pipeline.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "dcreg/errors.hpp"
#include "dcreg/normals.hpp"

namespace dcreg {

std::string solver_name(SolverKind kind) {
  switch (kind) {
    case SolverKind::kDcregPcg: return "dcreg-pcg";
    case SolverKind::kSr: return "sr";
    case SolverKind::kTsvd: return "tsvd";
    case SolverKind::kTreg: return "treg";
    case SolverKind::kPlain: return "plain";
  }
  return "unknown";
}

std::optional<SolverKind> solver_from_name(const std::string& name) {
  if (name == "dcreg-pcg") return SolverKind::kDcregPcg;
  if (name == "sr") return SolverKind::kSr;
  if (name == "tsvd") return SolverKind::kTsvd;
  if (name == "treg") return SolverKind::kTreg;
  if (name == "plain") return SolverKind::kPlain;
  return std::nullopt;
}

std::string reason_name(ConvergenceReason reason) {
  switch (reason) {
    case ConvergenceReason::kConverged: return "converged";
    case ConvergenceReason::kMaxIterations: return "max-iterations";
    case ConvergenceReason::kNoCorrespondences: return "no-correspondences";
    case ConvergenceReason::kDiverged: return "diverged";
    case ConvergenceReason::kSingularSystem: return "singular-system";
    case ConvergenceReason::kNoInformation: return "no-information";
  }
  return "unknown";
}

void SolverConfig::validate() const {
  if (!(kappa_th > 1.0)) throw InvalidSpec("kappa_th must exceed 1");
  if (!(kappa_tg > 1.0)) throw InvalidSpec("kappa_tg must exceed 1");
  if (max_icp_iterations <= 0) throw InvalidSpec("max_icp_iterations must be positive");
  if (!(trans_convergence > 0.0)) throw InvalidSpec("trans_convergence must be positive");
  if (!(rot_convergence > 0.0)) throw InvalidSpec("rot_convergence must be positive");
  if (!(corr_radius > 0.0)) throw InvalidSpec("corr_radius must be positive");
  if (!(pcg_tol > 0.0)) throw InvalidSpec("pcg_tol must be positive");
  if (pcg_max_iter <= 0) throw InvalidSpec("pcg_max_iter must be positive");
  if (!(treg_lambda > 0.0)) throw InvalidSpec("treg_lambda must be positive");
}

namespace {

double block_condition(const Matrix3& block) {
  Eigen::SelfAdjointEigenSolver<Matrix3> evd(block);
  const double lam_max = evd.eigenvalues()(2);
  if (!(lam_max > 0.0)) return kKappaInfinite;
  const double lam_min = evd.eigenvalues()(0);
  return lam_min > 0.0 ? lam_max / lam_min : kKappaInfinite;
}

double full_condition(const Matrix6& h) {
  Eigen::SelfAdjointEigenSolver<Matrix6> evd(h);
  const double lam_max = evd.eigenvalues()(5);
  if (!(lam_max > 0.0)) return kKappaInfinite;
  const double lam_min = evd.eigenvalues()(0);
  return lam_min > 0.0 ? lam_max / lam_min : kKappaInfinite;
}

}  // namespace

RegistrationResult register_clouds(const PointCloud& source, const PointCloud& target,
                                   const RigidTransform& init, const SolverConfig& config) {
  config.validate();
  if (source.empty() || target.empty()) throw EmptyCloud("registration needs two non-empty clouds");

  PointCloud estimated;
  const PointCloud* target_ptr = &target;
  if (!target.has_normals()) {
    estimated = estimate_normals(target, 5);
    target_ptr = &estimated;
  }
  const PointCloud& tgt = *target_ptr;

  const KdTree index(tgt);

  RegistrationResult result;
  result.final_pose = init;
  RigidTransform pose = init;

  for (int it = 1; it <= config.max_icp_iterations; ++it) {
    std::vector<Correspondence> corr;
    try {
      corr = find_correspondences(source, index, tgt, pose, config.corr_radius);
    } catch (const NoCorrespondences&) {
      result.converged = false;
      result.reason = ConvergenceReason::kNoCorrespondences;
      break;
    }

    const HessianSystem sys = assemble_system(corr);

    SchurSpectrum spec;
    DegeneracyMask mask;
    try {
      std::tie(spec, mask) = detect(sys, config.kappa_th);
    } catch (const AllZeroSpectrum&) {
      result.converged = false;
      result.reason = ConvergenceReason::kNoInformation;
      break;
    }
    const DegeneracyReport report = characterize_detection(spec, mask);
    (void)report;  // per-iteration characterization; surfaced by the inspect tool

    IterationTrace trace;
    trace.iteration = it;
    trace.correspondence_count = corr.size();
    trace.residual_rmse = sys.residual_rmse();
    trace.kappa_r = spec.kappa_r;
    trace.kappa_t = spec.kappa_t;
    trace.clamped_kappa_r = spec.kappa_r;
    trace.clamped_kappa_t = spec.kappa_t;
    trace.diag_kappa_r = block_condition(sys.h_rr);
    trace.diag_kappa_t = block_condition(sys.h_tt);
    trace.full_kappa = full_condition(sys.full());
    trace.mask = mask;

    PoseIncrement increment;
    try {
      switch (config.solver) {
        case SolverKind::kDcregPcg: {
          const Preconditioner precond = build_preconditioner(spec, config.kappa_tg);
          const SolveOutcome outcome =
              pcg_solve(sys, sys.gradient(), precond, config.pcg_tol, config.pcg_max_iter);
          increment = outcome.increment;
          trace.pcg_iterations = outcome.inner_iterations;
          trace.clamped_kappa_r = precond.rot_condition();
          trace.clamped_kappa_t = precond.trans_condition();
          break;
        }
        case SolverKind::kSr:
          increment = solve_sr(sys, sys.gradient(), mask, spec);
          break;
        case SolverKind::kTsvd:
          increment = solve_tsvd(sys, sys.gradient(), mask, spec);
          break;
        case SolverKind::kTreg:
          increment = solve_treg(sys, sys.gradient(), config.treg_lambda);
          break;
        case SolverKind::kPlain:
          increment = solve_plain(sys, sys.gradient());
          break;
      }
    } catch (const AllZeroSpectrum&) {
      result.converged = false;
      result.reason = ConvergenceReason::kNoInformation;
      break;
    } catch (const SingularSystem&) {
      result.converged = false;
      result.reason = ConvergenceReason::kSingularSystem;
      break;
    }

    if (!increment.phi.allFinite() || !increment.delta_t.allFinite()) {
      result.converged = false;
      result.reason = ConvergenceReason::kSingularSystem;
      break;
    }

    try {
      pose = apply_increment(pose, increment);
    } catch (const DivergedIncrement&) {
      result.converged = false;
      result.reason = ConvergenceReason::kDiverged;
      break;
    }

    trace.pose = pose;
    trace.update_rot_norm = increment.rotation_norm();
    trace.update_trans_norm = increment.translation_norm();
    result.trace.push_back(trace);

    if (trace.update_trans_norm < config.trans_convergence &&
        trace.update_rot_norm < config.rot_convergence) {
      result.converged = true;
      result.reason = ConvergenceReason::kConverged;
      break;
    }
  }

  if (!result.trace.empty()) {
    result.final_pose = result.trace.back().pose;
  }

  const auto [fitness, rmse] = fitness_and_rmse(source, index, result.final_pose,
                                                config.corr_radius);
  result.metrics.fitness_pct = fitness;
  result.metrics.rmse = rmse;
  result.metrics.chamfer = chamfer_distance(source.transformed(result.final_pose), tgt);
  return result;
}

std::pair<double, double> fitness_and_rmse(const PointCloud& source, const KdTree& target_index,
                                           const RigidTransform& pose, double inlier_radius) {
  if (source.empty()) return {0.0, 0.0};
  std::size_t inliers = 0;
  double sq_sum = 0.0;
  for (const auto& p : source.points) {
    const auto hit = target_index.nearest(pose.apply(p));
    if (hit.distance <= inlier_radius) {
      ++inliers;
      sq_sum += hit.distance * hit.distance;
    }
  }
  const double fitness = 100.0 * static_cast<double>(inliers) / static_cast<double>(source.size());
  const double rmse = inliers == 0 ? 0.0 : std::sqrt(sq_sum / static_cast<double>(inliers));
  return {fitness, rmse};
}

double chamfer_distance(const PointCloud& a, const PointCloud& b) {
  if (a.empty() || b.empty()) throw EmptyCloud("chamfer distance needs two non-empty clouds");
  const KdTree index_a(a);
  const KdTree index_b(b);
  double sum_ab = 0.0;
  for (const auto& p : a.points) sum_ab += index_b.nearest(p).distance;
  double sum_ba = 0.0;
  for (const auto& q : b.points) sum_ba += index_a.nearest(q).distance;
  return 0.5 * (sum_ab / static_cast<double>(a.size()) + sum_ba / static_cast<double>(b.size()));
}

std::pair<double, double> pose_error(const RigidTransform& estimate,
                                     const RigidTransform& ground_truth) {
  const double trans = (estimate.translation() - ground_truth.translation()).norm();
  const Matrix3 rel = estimate.rotation() * ground_truth.rotation().transpose();
  const double cos_angle = std::clamp((rel.trace() - 1.0) * 0.5, -1.0, 1.0);
  const double rot_deg = std::acos(cos_angle) * 180.0 / M_PI;
  return {trans, rot_deg};
}

}  // namespace dcreg
