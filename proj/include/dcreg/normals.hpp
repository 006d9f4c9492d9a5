#ifndef DCREG_NORMALS_HPP
#define DCREG_NORMALS_HPP

#include "dcreg/kdtree.hpp"
#include "dcreg/point_cloud.hpp"

namespace dcreg {

/// Per-point normals from the k-nearest-neighbor covariance (uniform
/// weighting): the eigenvector of the smallest eigenvalue of the local
/// covariance, sign-canonicalized so the component of largest magnitude is
/// positive. Collinear neighborhoods get a zero normal and are excluded from
/// correspondence use downstream.
///
/// Throws TooFewPoints when cloud.size() < k, or k < 3.
PointCloud estimate_normals(const PointCloud& cloud, std::size_t k = 5);

/// Sign canonicalization shared by normal estimation and eigenvector
/// reporting: flips v so its largest-magnitude component is positive.
/// Ties (equal magnitudes) resolve on the lowest axis index.
Vector3 canonicalize_sign(const Vector3& v);

}  // namespace dcreg

#endif
