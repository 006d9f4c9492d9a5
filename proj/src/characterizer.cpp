#include "dcreg/characterizer.hpp"

#include <algorithm>
#include <cmath>

#include "dcreg/errors.hpp"

namespace dcreg {

Matrix3 alignment_coefficients(const Matrix3& eigvecs) {
  // coefficients(i, j) = |j-th component of eigenvector i|
  return eigvecs.transpose().cwiseAbs();
}

AxisAlignment characterize(const Matrix3& eigvecs) {
  AxisAlignment out;
  out.coefficients = alignment_coefficients(eigvecs);
  for (int i = 0; i < 3; ++i) {
    int best_axis = 0;
    double best = out.coefficients(i, 0);
    for (int j = 1; j < 3; ++j) {
      if (out.coefficients(i, j) > best) {  // strict: ties keep the lower axis
        best = out.coefficients(i, j);
        best_axis = j;
      }
    }
    out.dominant_axis[static_cast<std::size_t>(i)] = best_axis;
    out.strength[i] = best;
    const double l1 = out.coefficients.row(i).sum();
    for (int j = 0; j < 3; ++j) {
      out.contributions(i, j) = l1 > 0.0 ? 100.0 * out.coefficients(i, j) / l1 : 0.0;
    }
    out.angles_deg[i] = std::acos(std::clamp(best, 0.0, 1.0)) * 180.0 / M_PI;
  }
  return out;
}

AlignedBasis orthogonalize(const Matrix3& eigvecs, const AxisAlignment& alignment) {
  // Process the most axis-aligned eigenvector first; ties fall back to the
  // ascending-eigenvalue position.
  std::array<int, 3> order{{0, 1, 2}};
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return alignment.strength[a] > alignment.strength[b];
  });

  AlignedBasis out;
  out.processing_order = order;
  for (int c = 0; c < 3; ++c) {
    Vector3 v = eigvecs.col(order[static_cast<std::size_t>(c)]);
    for (int k = 0; k < c; ++k) {
      v -= v.dot(out.basis.col(k)) * out.basis.col(k);
    }
    const double len = v.norm();
    if (len < 1e-12) {
      throw NumericalCollapse("Gram-Schmidt column collapsed; input basis is corrupt");
    }
    out.basis.col(c) = v / len;
  }
  return out;
}

namespace {

void append_rows(std::vector<DegeneracyRow>& rows, const std::string& subspace,
                 const Vector3& eigvals, const Vector3& normalized,
                 const std::array<bool, 3>& mask, const AxisAlignment& alignment) {
  constexpr char kAxisNames[3] = {'x', 'y', 'z'};
  for (int i = 0; i < 3; ++i) {
    DegeneracyRow row;
    row.subspace = subspace;
    row.eig_index = i;
    row.eigenvalue = eigvals[i];
    row.normalized_kappa = normalized[i];
    row.degenerate = mask[static_cast<std::size_t>(i)];
    row.dominant_axis = kAxisNames[alignment.dominant_axis[static_cast<std::size_t>(i)]];
    row.strength = alignment.strength[i];
    row.angle_deg = alignment.angles_deg[i];
    row.contributions_pct = alignment.contributions.row(i);
    rows.push_back(row);
  }
}

}  // namespace

DegeneracyReport characterize_detection(const SchurSpectrum& spectrum,
                                        const DegeneracyMask& mask) {
  DegeneracyReport report;
  report.rot_alignment = characterize(spectrum.eigvecs_r);
  report.trans_alignment = characterize(spectrum.eigvecs_t);
  report.rot_basis = orthogonalize(spectrum.eigvecs_r, report.rot_alignment);
  report.trans_basis = orthogonalize(spectrum.eigvecs_t, report.trans_alignment);
  append_rows(report.rows, "rot", spectrum.eigvals_r, spectrum.normalized_r, mask.rot,
              report.rot_alignment);
  append_rows(report.rows, "trans", spectrum.eigvals_t, spectrum.normalized_t, mask.trans,
              report.trans_alignment);
  return report;
}

}  // namespace dcreg
