#include "dcreg/normals.hpp"

#include <Eigen/Eigenvalues>

#include "dcreg/errors.hpp"
#include "dcreg/threading.hpp"

namespace dcreg {

Vector3 canonicalize_sign(const Vector3& v) {
  int axis = 0;
  double best = std::abs(v[0]);
  for (int j = 1; j < 3; ++j) {
    if (std::abs(v[j]) > best) {
      best = std::abs(v[j]);
      axis = j;
    }
  }
  return v[axis] < 0.0 ? Vector3(-v) : v;
}

PointCloud estimate_normals(const PointCloud& cloud, std::size_t k) {
  if (k < 3) throw TooFewPoints("normal estimation needs k >= 3");
  if (cloud.size() < k) {
    throw TooFewPoints("cloud has " + std::to_string(cloud.size()) +
                       " points, normal estimation needs at least " + std::to_string(k));
  }

  const KdTree index(cloud);
  PointCloud out;
  out.points = cloud.points;
  out.normals.assign(cloud.size(), Vector3::Zero());

  parallel_chunks(cloud.size(), 512, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto hits = index.knearest(cloud.points[i], k);
      Vector3 mean = Vector3::Zero();
      for (const auto& h : hits) mean += cloud.points[h.index];
      mean /= static_cast<double>(hits.size());

      Matrix3 cov = Matrix3::Zero();
      for (const auto& h : hits) {
        const Vector3 d = cloud.points[h.index] - mean;
        cov += d * d.transpose();
      }

      Eigen::SelfAdjointEigenSolver<Matrix3> evd(cov);
      const auto& evals = evd.eigenvalues();  // ascending
      // Collinear neighborhood: the two smallest covariance eigenvalues both
      // vanish, so the normal direction is unconstrained.
      if (evals[1] <= 1e-12 * std::max(evals[2], 1e-300)) {
        continue;  // zero normal sentinel stays
      }
      out.normals[i] = canonicalize_sign(evd.eigenvectors().col(0).normalized());
    }
  });

  return out;
}

}  // namespace dcreg
