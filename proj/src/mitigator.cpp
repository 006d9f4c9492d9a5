#include "dcreg/mitigator.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "dcreg/errors.hpp"

namespace dcreg {

Vector3 clamp_eigenvalues(const Vector3& eigvals_ascending, double kappa_tg) {
  if (!(kappa_tg > 1.0)) throw InvalidSpec("target condition number must exceed 1");
  const double lam_max = eigvals_ascending[2];
  if (!(lam_max > 0.0)) throw AllZeroSpectrum();
  const double floor = lam_max / kappa_tg;
  Vector3 out;
  for (int i = 0; i < 3; ++i) out[i] = std::max(eigvals_ascending[i], floor);
  return out;
}

Preconditioner::Preconditioner(const SchurSpectrum& spectrum, double kappa_tg)
    : rot_eigvecs_(spectrum.eigvecs_r),
      trans_eigvecs_(spectrum.eigvecs_t),
      rot_clamped_(clamp_eigenvalues(spectrum.eigvals_r, kappa_tg)),
      trans_clamped_(clamp_eigenvalues(spectrum.eigvals_t, kappa_tg)),
      kappa_tg_(kappa_tg) {}

Preconditioner Preconditioner::identity() { return Preconditioner(); }

Vector6 Preconditioner::apply(const Vector6& r) const {
  Vector6 z;
  z.head<3>() = rot_eigvecs_ * (rot_eigvecs_.transpose() * r.head<3>()).cwiseQuotient(rot_clamped_);
  z.tail<3>() =
      trans_eigvecs_ * (trans_eigvecs_.transpose() * r.tail<3>()).cwiseQuotient(trans_clamped_);
  return z;
}

Preconditioner build_preconditioner(const SchurSpectrum& spectrum, double kappa_tg) {
  return Preconditioner(spectrum, kappa_tg);
}

namespace {

// kappa of the symmetrically preconditioned system P^1/2 H P^1/2; diagnostic
// only, +inf sentinel when the preconditioned system is still singular.
double preconditioned_condition(const Matrix6& h, const Preconditioner& p) {
  Matrix6 sqrt_p = Matrix6::Zero();
  sqrt_p.topLeftCorner<3, 3>() = p.rot_eigvecs() *
                                 p.rot_clamped().cwiseSqrt().cwiseInverse().asDiagonal() *
                                 p.rot_eigvecs().transpose();
  sqrt_p.bottomRightCorner<3, 3>() = p.trans_eigvecs() *
                                     p.trans_clamped().cwiseSqrt().cwiseInverse().asDiagonal() *
                                     p.trans_eigvecs().transpose();
  const Matrix6 m = sqrt_p * h * sqrt_p;
  Eigen::SelfAdjointEigenSolver<Matrix6> evd(0.5 * (m + m.transpose()));
  const double lam_max = evd.eigenvalues()(5);
  const double lam_min = evd.eigenvalues()(0);
  if (!(lam_max > 0.0) || lam_min <= 0.0) return kKappaInfinite;
  return lam_max / lam_min;
}

}  // namespace

SolveOutcome pcg_solve(const HessianSystem& h, const Vector6& g, const Preconditioner& p,
                       double tol, int max_iter) {
  const Matrix6 hess = h.full();

  SolveOutcome outcome;
  outcome.preconditioned_condition_estimate = preconditioned_condition(hess, p);

  Vector6 xi = Vector6::Zero();
  Vector6 r = -g;
  const double r0_norm = r.norm();
  if (r0_norm == 0.0) {
    outcome.increment = PoseIncrement::from_vector(xi);
    outcome.status = PcgStatus::kConverged;
    return outcome;
  }

  Vector6 z = p.apply(r);
  Vector6 dir = z;
  double rz = r.dot(z);
  outcome.status = PcgStatus::kMaxIterations;

  for (int k = 0; k < max_iter; ++k) {
    const Vector6 h_dir = hess * dir;
    const double curvature = dir.dot(h_dir);
    if (curvature <= 1e-15 * dir.squaredNorm()) {
      outcome.status = PcgStatus::kCurvatureBreakdown;
      break;
    }
    const double alpha = rz / curvature;
    xi += alpha * dir;
    r -= alpha * h_dir;
    outcome.inner_iterations = k + 1;
    if (r.norm() <= tol * r0_norm) {
      outcome.status = PcgStatus::kConverged;
      break;
    }
    z = p.apply(r);
    const double rz_next = r.dot(z);
    dir = z + (rz_next / rz) * dir;
    rz = rz_next;
  }

  outcome.increment = PoseIncrement::from_vector(xi);
  outcome.final_residual_norm = r.norm();
  return outcome;
}

namespace {

// 6x6 orthonormal block basis from the two Schur eigenvector sets.
Matrix6 block_basis(const SchurSpectrum& spectrum) {
  Matrix6 b = Matrix6::Zero();
  b.topLeftCorner<3, 3>() = spectrum.eigvecs_r;
  b.bottomRightCorner<3, 3>() = spectrum.eigvecs_t;
  return b;
}

std::array<bool, 6> joint_mask(const DegeneracyMask& mask) {
  return {mask.rot[0], mask.rot[1], mask.rot[2], mask.trans[0], mask.trans[1], mask.trans[2]};
}

}  // namespace

PoseIncrement solve_sr(const HessianSystem& h, const Vector6& g, const DegeneracyMask& mask,
                       const SchurSpectrum& spectrum) {
  const Matrix6 hess = h.full();
  const Matrix6 basis = block_basis(spectrum);
  const auto masked = joint_mask(mask);

  // The remapping is only meaningful when the retained subproblem is
  // invertible: check min eig of B_u^T H B_u over the unmasked columns.
  int unmasked = 0;
  Eigen::Matrix<double, 6, Eigen::Dynamic> b_u(6, 6);
  for (int i = 0; i < 6; ++i) {
    if (!masked[static_cast<std::size_t>(i)]) b_u.col(unmasked++) = basis.col(i);
  }
  if (unmasked > 0) {
    const Eigen::MatrixXd reduced =
        b_u.leftCols(unmasked).transpose() * hess * b_u.leftCols(unmasked);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> evd(0.5 * (reduced + reduced.transpose()));
    const double lam_max = evd.eigenvalues().maxCoeff();
    if (evd.eigenvalues().minCoeff() <= 1e-12 * std::max(lam_max, 1e-300)) {
      throw SingularSystem("unmasked subproblem is singular under solution remapping");
    }
  }

  // Full solve (rank-revealing QR keeps singular masked directions finite),
  // then zero the masked eigencomponents.
  Vector6 xi = Eigen::ColPivHouseholderQR<Matrix6>(hess).solve(-g);
  for (int i = 0; i < 6; ++i) {
    if (masked[static_cast<std::size_t>(i)]) {
      const Vector6 v = basis.col(i);
      xi -= v.dot(xi) * v;
    }
  }
  if (!xi.allFinite()) throw SingularSystem("solution remapping produced non-finite update");
  return PoseIncrement::from_vector(xi);
}

PoseIncrement solve_tsvd(const HessianSystem& h, const Vector6& g, const DegeneracyMask& mask,
                         const SchurSpectrum& spectrum) {
  const Matrix6 basis = block_basis(spectrum);
  const auto masked = joint_mask(mask);

  int unmasked = 0;
  Eigen::Matrix<double, 6, Eigen::Dynamic> b_u(6, 6);
  for (int i = 0; i < 6; ++i) {
    if (!masked[static_cast<std::size_t>(i)]) b_u.col(unmasked++) = basis.col(i);
  }
  if (unmasked == 0) return PoseIncrement{};

  const Eigen::MatrixXd b = b_u.leftCols(unmasked);
  const Eigen::MatrixXd raw = b.transpose() * h.full() * b;
  const Eigen::MatrixXd reduced = 0.5 * (raw + raw.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> evd(reduced);
  const double lam_max = evd.eigenvalues().maxCoeff();
  Eigen::VectorXd inv_evals(unmasked);
  for (int i = 0; i < unmasked; ++i) {
    const double lam = evd.eigenvalues()(i);
    inv_evals(i) = (lam_max > 0.0 && lam > kPinvTolDefault * lam_max) ? 1.0 / lam : 0.0;
  }
  const Eigen::VectorXd reduced_rhs = b.transpose() * (-g);
  const Eigen::VectorXd solved = evd.eigenvectors() * inv_evals.asDiagonal() *
                                 evd.eigenvectors().transpose() * reduced_rhs;
  return PoseIncrement::from_vector(b * solved);
}

PoseIncrement solve_treg(const HessianSystem& h, const Vector6& g, double lambda) {
  if (!(lambda > 0.0)) throw InvalidSpec("damping weight must be positive");
  const Matrix6 damped = h.full() + lambda * Matrix6::Identity();
  return PoseIncrement::from_vector(damped.ldlt().solve(-g));
}

PoseIncrement solve_plain(const HessianSystem& h, const Vector6& g) {
  return PoseIncrement::from_vector(h.full().ldlt().solve(-g));
}

Vector3 pinv_reduced_solve(const Matrix3& s, const Vector3& g_reduced, double tol) {
  return pinv_spd3(s, tol) * g_reduced;
}

}  // namespace dcreg
