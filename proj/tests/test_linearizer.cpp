#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dcreg/detector.hpp"
#include "dcreg/linearizer.hpp"
#include "oracles.hpp"

using namespace dcreg;

namespace {

PointCloud random_cloud_with_normals(std::size_t n, std::uint64_t seed, double scale = 5.0) {
  Rng rng(seed);
  PointCloud cloud;
  for (std::size_t i = 0; i < n; ++i) {
    cloud.points.push_back(testing::random_vector(rng, scale));
    cloud.normals.push_back(testing::random_vector(rng).normalized());
  }
  return cloud;
}

std::vector<Correspondence> random_correspondences(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Correspondence> out;
  for (std::size_t i = 0; i < n; ++i) {
    Correspondence c;
    c.source_point = testing::random_vector(rng, 5.0);
    c.target_point = c.source_point + testing::random_vector(rng, 0.1);
    c.target_normal = testing::random_vector(rng).normalized();
    c.distance = (c.source_point - c.target_point).norm();
    out.push_back(c);
  }
  return out;
}

}  // namespace

TEST_CASE("identical clouds at identity give zero-distance pairs in order") {
  const PointCloud cloud = random_cloud_with_normals(200, 51);
  const KdTree tree(cloud);
  const auto corr = find_correspondences(cloud, tree, cloud, RigidTransform::identity(), 1.0);
  REQUIRE(corr.size() == cloud.size());
  for (std::size_t i = 0; i < corr.size(); ++i) {
    CHECK(corr[i].distance == 0.0);
    CHECK((corr[i].source_point - cloud.points[i]).norm() == 0.0);
  }
}

TEST_CASE("a far-translated source finds nothing inside the radius") {
  // Compact cluster (diameter well under 1 m) shifted by 2 m.
  Rng rng(52);
  PointCloud cloud;
  for (int i = 0; i < 100; ++i) {
    cloud.points.push_back(Vector3(rng.uniform(0, 0.3), rng.uniform(0, 0.3), rng.uniform(0, 0.3)));
    cloud.normals.push_back(Vector3(0, 0, 1));
  }
  const KdTree tree(cloud);
  const RigidTransform shifted(Matrix3::Identity(), Vector3(2, 0, 0));
  CHECK_THROWS_AS(find_correspondences(cloud, tree, cloud, shifted, 1.0), NoCorrespondences);
}

TEST_CASE("matching equals the brute-force all-pairs nearest search") {
  const PointCloud source = random_cloud_with_normals(150, 53);
  const PointCloud target = random_cloud_with_normals(170, 54);
  const KdTree tree(target);
  Rng rng(55);
  const RigidTransform pose(testing::random_rotation(rng), testing::random_vector(rng, 0.2));
  const double radius = 4.0;

  const auto corr = find_correspondences(source, tree, target, pose, radius);

  std::vector<Correspondence> brute;
  for (std::size_t i = 0; i < source.size(); ++i) {
    const Vector3 p = pose.apply(source.points[i]);
    double d;
    const std::size_t j = testing::brute_nearest(target.points, p, &d);
    if (d <= radius && target.normal_valid(j)) {
      brute.push_back({p, target.points[j], target.normals[j], d});
    }
  }
  REQUIRE(corr.size() == brute.size());
  for (std::size_t i = 0; i < corr.size(); ++i) {
    CHECK((corr[i].target_point - brute[i].target_point).norm() == 0.0);
    CHECK(corr[i].distance == brute[i].distance);
  }
}

TEST_CASE("points matched to zero-normal targets are dropped") {
  PointCloud target = random_cloud_with_normals(50, 56);
  target.normals[7].setZero();
  const KdTree tree(target);
  const auto corr = find_correspondences(target, tree, target, RigidTransform::identity(), 1.0);
  CHECK(corr.size() == target.size() - 1);
}

TEST_CASE("residual is zero when the pair coincides") {
  Correspondence c;
  c.source_point = Vector3(1, 2, 3);
  c.target_point = c.source_point;
  c.target_normal = Vector3(0, 0, 1);
  c.distance = 0.0;
  double r;
  Eigen::Matrix<double, 1, 6> jac;
  residual_jacobian(c, r, jac);
  CHECK(r == 0.0);
}

TEST_CASE("worked residual/Jacobian example") {
  Correspondence c;
  c.source_point = Vector3(1, 0, 0);
  c.target_point = Vector3(1, 0, -0.5);
  c.target_normal = Vector3(0, 0, 1);
  c.distance = 0.5;
  double r;
  Eigen::Matrix<double, 1, 6> jac;
  residual_jacobian(c, r, jac);
  CHECK(r == doctest::Approx(0.5));
  // n^T[-skew(p) | I] evaluated by hand: row 3 of -skew((1,0,0)) is (0,-1,0).
  // Cross-checked below by the finite-difference property; a positive pitch
  // moves the point toward -z, so dr/dphi_y must be negative.
  Eigen::Matrix<double, 1, 6> expected;
  expected << 0, -1, 0, 0, 0, 1;
  CHECK((jac - expected).norm() < 1e-15);
}

TEST_CASE("Jacobian rows agree with central finite differences") {
  // Perturb through the same left-composition the update rule uses:
  // R -> exp(eps e_k) R, t -> exp(eps e_k) t (+ eps e_k for translation).
  const auto corr = random_correspondences(50, 57);
  const double eps = 1e-6;
  for (const auto& c : corr) {
    double r0;
    Eigen::Matrix<double, 1, 6> jac;
    residual_jacobian(c, r0, jac);
    for (int k = 0; k < 6; ++k) {
      auto value = [&](double step) {
        Vector3 phi = Vector3::Zero();
        Vector3 dt = Vector3::Zero();
        if (k < 3) phi[k] = step;
        else dt[k - 3] = step;
        const Vector3 moved = exp_so3(phi) * c.source_point + dt;
        return c.target_normal.dot(moved - c.target_point);
      };
      const double fd = (value(eps) - value(-eps)) / (2.0 * eps);
      const double scale = std::max(1.0, std::abs(jac[k]));
      CHECK(std::abs(fd - jac[k]) <= 1e-5 * scale);
    }
  }
}

TEST_CASE("single-correspondence system matches the hand evaluation") {
  Correspondence c;
  c.source_point = Vector3::Zero();
  c.target_point = Vector3::Zero();
  c.target_normal = Vector3(0, 0, 1);
  c.distance = 0.0;
  const HessianSystem sys = assemble_system({c});
  CHECK(sys.h_rr.isZero(0.0));
  CHECK(sys.h_rt.isZero(0.0));
  Matrix3 expected = Matrix3::Zero();
  expected(2, 2) = 1.0;
  CHECK((sys.h_tt - expected).norm() == 0.0);
}

TEST_CASE("duplicating the correspondence list doubles H and g") {
  auto corr = random_correspondences(64, 58);
  const HessianSystem once = assemble_system(corr);
  corr.insert(corr.end(), corr.begin(), corr.end());
  const HessianSystem twice = assemble_system(corr);
  CHECK((twice.full() - 2.0 * once.full()).norm() < 1e-12 * once.full().norm());
  CHECK((twice.gradient() - 2.0 * once.gradient()).norm() < 1e-12);
  CHECK(twice.count == 2 * once.count);
}

TEST_CASE("blockwise assembly equals the dense accumulation oracle") {
  const auto corr = random_correspondences(500, 59);
  const HessianSystem sys = assemble_system(corr);
  Matrix6 dense_h;
  Vector6 dense_g;
  testing::dense_normal_equations(corr, dense_h, dense_g);
  CHECK((sys.full() - dense_h).norm() <= 1e-12 * dense_h.norm());
  CHECK((sys.gradient() - dense_g).norm() <= 1e-12 * std::max(1.0, dense_g.norm()));
}

TEST_CASE("assembled H is symmetric and positive semi-definite") {
  const auto corr = random_correspondences(300, 60);
  const Matrix6 h = assemble_system(corr).full();
  CHECK((h - h.transpose()).norm() <= 1e-9 * h.norm());
  Eigen::SelfAdjointEigenSolver<Matrix6> evd(h);
  CHECK(evd.eigenvalues()(0) >= -1e-8 * evd.eigenvalues()(5));
}

TEST_CASE("gradient lies in the range of H") {
  for (std::uint64_t seed : {61, 62, 63, 64}) {
    const auto corr = random_correspondences(40, seed);
    const HessianSystem sys = assemble_system(corr);
    const Matrix6 h = sys.full();
    const Vector6 g = sys.gradient();
    const Eigen::MatrixXd h_pinv = testing::pinv_svd(h, 1e-10);
    CHECK(((Matrix6::Identity() - h * h_pinv) * g).norm() <= 1e-8 * std::max(1.0, g.norm()));
  }
}

TEST_CASE("lever arm: scaling the scene scales H_RR quadratically, H_tt not at all") {
  // Plane scene with off-origin points so the rotational curvature is nonzero.
  Rng rng(65);
  std::vector<Correspondence> base;
  for (int i = 0; i < 200; ++i) {
    Correspondence c;
    c.source_point = Vector3(rng.uniform(-4, 4), rng.uniform(-4, 4), rng.uniform(-0.01, 0.01));
    c.target_point = c.source_point + Vector3(0, 0, rng.uniform(-0.02, 0.02));
    c.target_normal = Vector3(0, 0, 1);
    c.distance = (c.source_point - c.target_point).norm();
    base.push_back(c);
  }
  const double s = 3.7;
  auto scaled = base;
  for (auto& c : scaled) {
    c.source_point *= s;
    c.target_point *= s;
    c.distance *= s;
  }
  const HessianSystem sys1 = assemble_system(base);
  const HessianSystem sys2 = assemble_system(scaled);
  CHECK(sys2.h_rr.norm() == doctest::Approx(s * s * sys1.h_rr.norm()).epsilon(1e-12));
  CHECK((sys2.h_tt - sys1.h_tt).norm() <= 1e-12 * sys1.h_tt.norm());
}

TEST_CASE("pure-plane scene has rank-1 translational curvature") {
  Rng rng(66);
  std::vector<Correspondence> corr;
  for (int i = 0; i < 100; ++i) {
    Correspondence c;
    c.source_point = Vector3(rng.uniform(-4, 4), rng.uniform(-4, 4), 0.0);
    c.target_point = c.source_point;
    c.target_normal = Vector3(0, 0, 1);
    c.distance = 0.0;
    corr.push_back(c);
  }
  const HessianSystem sys = assemble_system(corr);
  Eigen::SelfAdjointEigenSolver<Matrix3> evd(sys.h_tt);
  CHECK(evd.eigenvalues()(0) <= 1e-12);
  CHECK(evd.eigenvalues()(1) <= 1e-12);
  CHECK(evd.eigenvalues()(2) > 0.0);
}

TEST_CASE("stacked Jacobian reproduces the blockwise system") {
  const auto corr = random_correspondences(120, 67);
  const StackedJacobian stack = stack_jacobian(corr);
  const HessianSystem sys = assemble_system(corr);
  CHECK(((stack.rot.transpose() * stack.rot) - sys.h_rr).norm() <= 1e-12 * sys.h_rr.norm());
  CHECK(((stack.rot.transpose() * stack.trans) - sys.h_rt).norm() <=
        1e-12 * std::max(1.0, sys.h_rt.norm()));
  CHECK(((stack.trans.transpose() * stack.trans) - sys.h_tt).norm() <= 1e-12 * sys.h_tt.norm());
}

TEST_CASE("assembling an empty list is rejected") {
  CHECK_THROWS_AS(assemble_system({}), NoCorrespondences);
}
