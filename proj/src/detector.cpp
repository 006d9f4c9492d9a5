#include "dcreg/detector.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "dcreg/errors.hpp"
#include "dcreg/normals.hpp"

namespace dcreg {

namespace {

// Inverse of a symmetric PSD 3x3, switching to the pseudoinverse when the
// block is singular at the given relative tolerance.
Matrix3 inv_or_pinv(const Matrix3& block, double tol, bool& used_pinv) {
  Eigen::SelfAdjointEigenSolver<Matrix3> evd(block);
  const Vector3 evals = evd.eigenvalues();
  const double lam_max = evals[2];
  used_pinv = !(lam_max > 0.0) || evals[0] < tol * lam_max;
  Vector3 inv_evals;
  for (int i = 0; i < 3; ++i) {
    const bool observable = lam_max > 0.0 && evals[i] >= tol * lam_max;
    inv_evals[i] = observable ? 1.0 / evals[i] : 0.0;
  }
  return evd.eigenvectors() * inv_evals.asDiagonal() * evd.eigenvectors().transpose();
}

}  // namespace

Matrix3 pinv_spd3(const Matrix3& s, double tol) {
  bool unused;
  return inv_or_pinv(s, tol, unused);
}

SchurPair schur_complements(const HessianSystem& h, double pinv_tol) {
  SchurPair out;
  const Matrix3 inv_tt = inv_or_pinv(h.h_tt, pinv_tol, out.pinv_tt);
  const Matrix3 inv_rr = inv_or_pinv(h.h_rr, pinv_tol, out.pinv_rr);
  out.s_r = h.h_rr - h.h_rt * inv_tt * h.h_rt.transpose();
  out.s_t = h.h_tt - h.h_rt.transpose() * inv_rr * h.h_rt;
  // The elimination is symmetric in exact arithmetic; symmetrize to keep the
  // EVD contract tight.
  out.s_r = 0.5 * (out.s_r + out.s_r.transpose()).eval();
  out.s_t = 0.5 * (out.s_t + out.s_t.transpose()).eval();
  return out;
}

Matrix3 projection_form_schur(const Eigen::Matrix<double, Eigen::Dynamic, 3>& j_r,
                              const Eigen::Matrix<double, Eigen::Dynamic, 3>& j_t) {
  // I - J_t J_t^+ projects onto the orthogonal complement of range(J_t).
  // Applied via a thin SVD basis U_r of range(J_t): P_t = U_r U_r^T.
  Eigen::JacobiSVD<Eigen::Matrix<double, Eigen::Dynamic, 3>> svd(j_t, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  const double cutoff = sv.size() > 0 ? sv[0] * 1e-12 : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv[i] > cutoff) ++rank;
  }
  const Eigen::MatrixXd u_range = svd.matrixU().leftCols(rank);
  const Eigen::MatrixXd projected = j_r - u_range * (u_range.transpose() * j_r);
  Matrix3 s = j_r.transpose() * projected;
  return 0.5 * (s + s.transpose());
}

void spectrum(const Matrix3& s, Vector3& eigvals, Matrix3& eigvecs) {
  const double scale = std::max(1.0, s.norm());
  if ((s - s.transpose()).norm() > 1e-9 * scale) {
    throw NotSymmetric("matrix is not symmetric within tolerance");
  }
  const Matrix3 sym = 0.5 * (s + s.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix3> evd(sym);
  eigvals = evd.eigenvalues();
  eigvecs = evd.eigenvectors();
  for (int i = 0; i < 3; ++i) {
    eigvecs.col(i) = canonicalize_sign(eigvecs.col(i));
    const double residual = (sym * eigvecs.col(i) - eigvals[i] * eigvecs.col(i)).norm();
    if (residual > 1e-10 * std::max(1.0, sym.norm())) {
      throw NumericalCollapse("eigendecomposition residual check failed");
    }
  }
}

double condition_number(const Vector3& eigvals_ascending) {
  const double lam_max = eigvals_ascending[2];
  if (!(lam_max > 0.0)) throw AllZeroSpectrum();
  const double lam_min = eigvals_ascending[0];
  if (lam_min <= 0.0) return kKappaInfinite;
  return lam_max / lam_min;
}

namespace {

Vector3 normalized_eigenvalues(const Vector3& evals) {
  const double lam_max = evals[2];
  if (!(lam_max > 0.0)) throw AllZeroSpectrum();
  Vector3 out;
  for (int i = 0; i < 3; ++i) {
    out[i] = evals[i] > 0.0 ? lam_max / evals[i] : kKappaInfinite;
  }
  return out;
}

}  // namespace

std::pair<SchurSpectrum, DegeneracyMask> detect(const HessianSystem& h, double kappa_th,
                                                double pinv_tol) {
  if (!(kappa_th > 1.0)) throw InvalidSpec("detection threshold must exceed 1");
  const SchurPair pair = schur_complements(h, pinv_tol);

  SchurSpectrum spec;
  spec.s_r = pair.s_r;
  spec.s_t = pair.s_t;
  spec.pinv_tt = pair.pinv_tt;
  spec.pinv_rr = pair.pinv_rr;
  spectrum(pair.s_r, spec.eigvals_r, spec.eigvecs_r);
  spectrum(pair.s_t, spec.eigvals_t, spec.eigvecs_t);
  spec.normalized_r = normalized_eigenvalues(spec.eigvals_r);
  spec.normalized_t = normalized_eigenvalues(spec.eigvals_t);
  spec.kappa_r = condition_number(spec.eigvals_r);
  spec.kappa_t = condition_number(spec.eigvals_t);

  DegeneracyMask mask;
  for (int i = 0; i < 3; ++i) {
    mask.rot[static_cast<std::size_t>(i)] = spec.normalized_r[i] > kappa_th;
    mask.trans[static_cast<std::size_t>(i)] = spec.normalized_t[i] > kappa_th;
  }
  return {spec, mask};
}

}  // namespace dcreg
