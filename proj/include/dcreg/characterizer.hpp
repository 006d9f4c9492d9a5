#ifndef DCREG_CHARACTERIZER_HPP
#define DCREG_CHARACTERIZER_HPP

#include <array>
#include <string>
#include <vector>

#include "dcreg/detector.hpp"

namespace dcreg {

/// Physical-axis alignment of one subspace's eigenvectors.
/// Row i describes eigenvector i (ascending eigenvalue order), column j the
/// canonical axis (0=x, 1=y, 2=z):
///   coefficients(i,j) = |v_i . e_j|
///   dominant_axis[i]  = argmax_j, ties to the lowest axis index
///   strength[i]       = max_j coefficients(i,j)
///   contributions(i,j)= percentage |v_j| / sum_k |v_k| * 100
///   angles_deg[i]     = acos(strength[i]) in degrees
struct AxisAlignment {
  Matrix3 coefficients = Matrix3::Zero();
  std::array<int, 3> dominant_axis{{0, 0, 0}};
  Vector3 strength = Vector3::Zero();
  Matrix3 contributions = Matrix3::Zero();
  Vector3 angles_deg = Vector3::Zero();
};

/// Gram-Schmidt-stabilized basis. Columns are in processing order;
/// processing_order[c] gives the input eigenvector index handled at output
/// column c.
struct AlignedBasis {
  Matrix3 basis = Matrix3::Identity();
  std::array<int, 3> processing_order{{0, 1, 2}};
};

/// |v_i . e_j| for every eigenvector/axis pair. Absolute values make the
/// result invariant to eigenvector sign flips.
Matrix3 alignment_coefficients(const Matrix3& eigvecs);

/// Full axis characterization of one subspace (coefficients, dominant axes,
/// strengths, L1 contribution percentages, alignment angles).
AxisAlignment characterize(const Matrix3& eigvecs);

/// Gram-Schmidt orthogonalization processed in descending alignment-strength
/// order (ties broken by ascending eigenvalue index). Classic projection with
/// renormalization; throws NumericalCollapse if a projected vector vanishes
/// (impossible for orthonormal input; signals upstream corruption).
AlignedBasis orthogonalize(const Matrix3& eigvecs, const AxisAlignment& alignment);

/// One row of the characterization report consumed by the CLI.
struct DegeneracyRow {
  std::string subspace;  // "rot" | "trans"
  int eig_index = 0;     // ascending eigenvalue position
  double eigenvalue = 0.0;
  double normalized_kappa = 0.0;
  bool degenerate = false;
  char dominant_axis = 'x';
  double strength = 0.0;
  double angle_deg = 0.0;
  Vector3 contributions_pct = Vector3::Zero();
};

/// Flattened report: detection plus characterization of both subspaces,
/// rows ordered rot 0..2 then trans 0..2.
struct DegeneracyReport {
  AxisAlignment rot_alignment;
  AxisAlignment trans_alignment;
  AlignedBasis rot_basis;
  AlignedBasis trans_basis;
  std::vector<DegeneracyRow> rows;
};

DegeneracyReport characterize_detection(const SchurSpectrum& spectrum,
                                        const DegeneracyMask& mask);

}  // namespace dcreg

#endif
