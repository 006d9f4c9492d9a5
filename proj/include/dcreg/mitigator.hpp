#ifndef DCREG_MITIGATOR_HPP
#define DCREG_MITIGATOR_HPP

#include "dcreg/detector.hpp"

namespace dcreg {

constexpr double kKappaTargetDefault = 10.0;
constexpr double kPcgTolDefault = 1e-6;
constexpr int kPcgMaxIterDefault = 10;
constexpr double kTregLambdaDefault = 100.0;

/// lambda_i floored at lambda_max / kappa_tg, per subspace. Preserves
/// ascending order and the top eigenvalue. Throws AllZeroSpectrum when
/// lambda_max <= 0, InvalidSpec when kappa_tg <= 1.
Vector3 clamp_eigenvalues(const Vector3& eigvals_ascending, double kappa_tg);

/// Block-diagonal spectral preconditioner built from the Schur spectra:
/// the applied operator is blkdiag(V_R L_R^-1 V_R^T, V_t L_t^-1 V_t^T) with
/// L the clamped eigenvalues — a bounded-condition approximate inverse.
class Preconditioner {
 public:
  Preconditioner(const SchurSpectrum& spectrum, double kappa_tg);

  /// Identity operator (plain CG).
  static Preconditioner identity();

  Vector6 apply(const Vector6& r) const;

  const Matrix3& rot_eigvecs() const { return rot_eigvecs_; }
  const Matrix3& trans_eigvecs() const { return trans_eigvecs_; }
  const Vector3& rot_clamped() const { return rot_clamped_; }
  const Vector3& trans_clamped() const { return trans_clamped_; }
  double kappa_tg() const { return kappa_tg_; }

  /// Condition numbers of the clamped subspace spectra (<= kappa_tg by
  /// construction).
  double rot_condition() const { return rot_clamped_[2] / rot_clamped_[0]; }
  double trans_condition() const { return trans_clamped_[2] / trans_clamped_[0]; }

 private:
  Preconditioner() = default;

  Matrix3 rot_eigvecs_ = Matrix3::Identity();
  Matrix3 trans_eigvecs_ = Matrix3::Identity();
  Vector3 rot_clamped_ = Vector3::Ones();
  Vector3 trans_clamped_ = Vector3::Ones();
  double kappa_tg_ = 1.0;
};

Preconditioner build_preconditioner(const SchurSpectrum& spectrum,
                                    double kappa_tg = kKappaTargetDefault);

inline Vector6 apply_preconditioner(const Preconditioner& p, const Vector6& r) {
  return p.apply(r);
}

enum class PcgStatus { kConverged, kMaxIterations, kCurvatureBreakdown };

struct SolveOutcome {
  PoseIncrement increment;
  int inner_iterations = 0;
  double final_residual_norm = 0.0;
  double preconditioned_condition_estimate = 0.0;
  PcgStatus status = PcgStatus::kConverged;
};

/// Preconditioned conjugate gradient on H xi = -g. Terminates on
/// ||r_k|| <= tol * ||r_0||, on max_iter, or on vanishing curvature
/// p^T H p <= 1e-15 ||p||^2 (PSD-but-singular systems are expected in
/// degenerate scenes and must not crash).
SolveOutcome pcg_solve(const HessianSystem& h, const Vector6& g, const Preconditioner& p,
                       double tol = kPcgTolDefault, int max_iter = kPcgMaxIterDefault);

/// Solution remapping: solve the full system, then zero the update components
/// along masked Schur eigendirections. Throws SingularSystem when the
/// unmasked subproblem itself is singular.
PoseIncrement solve_sr(const HessianSystem& h, const Vector6& g, const DegeneracyMask& mask,
                       const SchurSpectrum& spectrum);

/// Truncated solve: pseudoinverse restricted to the unmasked Schur
/// eigendirections; masked components of the update are exactly zero.
PoseIncrement solve_tsvd(const HessianSystem& h, const Vector6& g, const DegeneracyMask& mask,
                         const SchurSpectrum& spectrum);

/// Tikhonov baseline: (H + lambda I) xi = -g.
PoseIncrement solve_treg(const HessianSystem& h, const Vector6& g,
                         double lambda = kTregLambdaDefault);

/// Direct dense solve H xi = -g (no degeneracy handling). The increment may
/// be non-finite on singular systems; callers treat that as failure.
PoseIncrement solve_plain(const HessianSystem& h, const Vector6& g);

/// Minimum-norm solve x = S^+ g for a symmetric PSD 3x3; oracle for the
/// decoupled-subspace reconstruction and its regularization limit.
Vector3 pinv_reduced_solve(const Matrix3& s, const Vector3& g_reduced,
                           double tol = kPinvTolDefault);

}  // namespace dcreg

#endif
