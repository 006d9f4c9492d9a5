#include "dcreg/linearizer.hpp"

#include "dcreg/errors.hpp"
#include "dcreg/threading.hpp"

namespace dcreg {

std::vector<Correspondence> find_correspondences(const PointCloud& source,
                                                 const KdTree& target_index,
                                                 const PointCloud& target,
                                                 const RigidTransform& pose,
                                                 double max_distance) {
  if (!target.has_normals()) {
    throw NoCorrespondences("target cloud has no normals");
  }
  if (max_distance <= 0.0) {
    throw NoCorrespondences("max correspondence distance must be positive");
  }

  const std::size_t n = source.size();
  std::vector<Correspondence> slots(n);
  std::vector<char> keep(n, 0);

  parallel_chunks(n, 1024, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const Vector3 p = pose.apply(source.points[i]);
      const auto hit = target_index.nearest(p);
      if (hit.distance > max_distance) continue;
      if (!target.normal_valid(hit.index)) continue;
      slots[i] = {p, target.points[hit.index], target.normals[hit.index], hit.distance};
      keep[i] = 1;
    }
  });

  std::vector<Correspondence> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (keep[i]) out.push_back(slots[i]);
  }
  if (out.empty()) throw NoCorrespondences();
  return out;
}

void residual_jacobian(const Correspondence& c, double& r, Eigen::Matrix<double, 1, 6>& jac) {
  const Vector3& n = c.target_normal;
  r = n.dot(c.source_point - c.target_point);
  jac.head<3>() = (-n.transpose() * skew(c.source_point)).transpose();
  jac.tail<3>() = n;
}

namespace {

struct Partial {
  HessianSystem sys;
};

void accumulate(HessianSystem& sys, const Correspondence& c) {
  const Vector3& n = c.target_normal;
  const Vector3 a = -skew(c.source_point).transpose() * n;  // J_R row transposed
  const double r = n.dot(c.source_point - c.target_point);
  sys.h_rr.noalias() += a * a.transpose();
  sys.h_rt.noalias() += a * n.transpose();
  sys.h_tt.noalias() += n * n.transpose();
  sys.g_r.noalias() += a * r;
  sys.g_t.noalias() += n * r;
  sys.residual_sq_sum += r * r;
  ++sys.count;
}

}  // namespace

HessianSystem assemble_system(const std::vector<Correspondence>& correspondences) {
  if (correspondences.empty()) throw NoCorrespondences("cannot assemble an empty system");

  constexpr std::size_t kChunk = 1024;
  const std::size_t num_chunks = (correspondences.size() + kChunk - 1) / kChunk;
  std::vector<Partial> partials(num_chunks);

  parallel_chunks(correspondences.size(), kChunk, [&](std::size_t begin, std::size_t end) {
    Partial& part = partials[begin / kChunk];
    for (std::size_t i = begin; i < end; ++i) accumulate(part.sys, correspondences[i]);
  });

  // Reduce in chunk index order: identical result for any thread count.
  HessianSystem sys;
  for (const auto& part : partials) {
    sys.h_rr += part.sys.h_rr;
    sys.h_rt += part.sys.h_rt;
    sys.h_tt += part.sys.h_tt;
    sys.g_r += part.sys.g_r;
    sys.g_t += part.sys.g_t;
    sys.residual_sq_sum += part.sys.residual_sq_sum;
    sys.count += part.sys.count;
  }
  return sys;
}

StackedJacobian stack_jacobian(const std::vector<Correspondence>& correspondences) {
  StackedJacobian out;
  const auto m = static_cast<Eigen::Index>(correspondences.size());
  out.rot.resize(m, 3);
  out.trans.resize(m, 3);
  out.residuals.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    double r;
    Eigen::Matrix<double, 1, 6> jac;
    residual_jacobian(correspondences[static_cast<std::size_t>(i)], r, jac);
    out.rot.row(i) = jac.head<3>();
    out.trans.row(i) = jac.tail<3>();
    out.residuals[i] = r;
  }
  return out;
}

}  // namespace dcreg
