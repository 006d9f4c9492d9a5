#ifndef DCREG_DETECTOR_HPP
#define DCREG_DETECTOR_HPP

#include <array>
#include <limits>
#include <utility>

#include "dcreg/linearizer.hpp"

namespace dcreg {

constexpr double kPinvTolDefault = 1e-10;
constexpr double kKappaThresholdDefault = 10.0;
constexpr double kKappaInfinite = std::numeric_limits<double>::infinity();

/// Eigenstructure of both Schur complements. Eigenvalues ascending,
/// eigenvector columns matching that order with deterministic sign
/// (largest-magnitude component positive). normalized_* holds the
/// direction-specific condition numbers lambda_max / lambda_i (>= 1, +inf
/// where lambda_i <= 0).
struct SchurSpectrum {
  Matrix3 s_r = Matrix3::Zero();
  Matrix3 s_t = Matrix3::Zero();
  Vector3 eigvals_r = Vector3::Zero();
  Vector3 eigvals_t = Vector3::Zero();
  Matrix3 eigvecs_r = Matrix3::Identity();
  Matrix3 eigvecs_t = Matrix3::Identity();
  double kappa_r = 1.0;
  double kappa_t = 1.0;
  Vector3 normalized_r = Vector3::Ones();
  Vector3 normalized_t = Vector3::Ones();
  // Records whether eliminating the complementary block needed the
  // Moore-Penrose branch (singular H_tt / H_RR).
  bool pinv_tt = false;
  bool pinv_rr = false;
};

/// Per-direction flags in ascending-eigenvalue order; true = ill-conditioned.
struct DegeneracyMask {
  std::array<bool, 3> rot{{false, false, false}};
  std::array<bool, 3> trans{{false, false, false}};

  bool any() const {
    return rot[0] || rot[1] || rot[2] || trans[0] || trans[1] || trans[2];
  }
  int count() const {
    return int(rot[0]) + int(rot[1]) + int(rot[2]) + int(trans[0]) + int(trans[1]) + int(trans[2]);
  }
};

/// Schur complements of the 6x6 system:
///   S_R = H_RR - H_Rt H_tt^-1 H_tR,   S_t = H_tt - H_tR H_RR^-1 H_Rt.
/// When the eliminated block is singular (min eigenvalue below
/// pinv_tol * max eigenvalue) its Moore-Penrose pseudoinverse is used; the
/// flags on the returned pair report which branch ran.
struct SchurPair {
  Matrix3 s_r;
  Matrix3 s_t;
  bool pinv_tt;
  bool pinv_rr;
};
SchurPair schur_complements(const HessianSystem& h, double pinv_tol = kPinvTolDefault);

/// Independent oracle for the Schur complement: J_R^T (I - J_t J_t^+) J_R.
Matrix3 projection_form_schur(const Eigen::Matrix<double, Eigen::Dynamic, 3>& j_r,
                              const Eigen::Matrix<double, Eigen::Dynamic, 3>& j_t);

/// Symmetric 3x3 eigendecomposition, ascending eigenvalues, deterministic
/// eigenvector signs, residual-checked (||Sv - lambda v|| <= 1e-10 ||S||).
/// Throws NotSymmetric if ||S - S^T|| exceeds 1e-9 * max(1, ||S||).
void spectrum(const Matrix3& s, Vector3& eigvals, Matrix3& eigvecs);

/// lambda_max / lambda_min. Returns +inf when lambda_min <= 0 < lambda_max;
/// throws AllZeroSpectrum when lambda_max <= 0.
double condition_number(const Vector3& eigvals_ascending);

/// Direction-specific ill-conditioning detection: Schur complements,
/// ascending EVDs, normalized eigenvalues lambda_3 / lambda_i per subspace,
/// mask true where the ratio exceeds kappa_th.
std::pair<SchurSpectrum, DegeneracyMask> detect(const HessianSystem& h,
                                                double kappa_th = kKappaThresholdDefault,
                                                double pinv_tol = kPinvTolDefault);

/// Moore-Penrose pseudoinverse of a symmetric PSD 3x3 (eigenvalues below
/// tol * lambda_max are treated as zero).
Matrix3 pinv_spd3(const Matrix3& s, double tol = kPinvTolDefault);

}  // namespace dcreg

#endif
