#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dcreg/mitigator.hpp"
#include "oracles.hpp"

using namespace dcreg;
using dcreg::testing::random_jacobian_system;
using dcreg::testing::random_spd3;
using dcreg::testing::random_vector;

namespace {

SchurSpectrum spectrum_of(const HessianSystem& h) {
  return detect(h, 10.0).first;
}

SchurSpectrum diagonal_spectrum(const Vector3& rot_evals, const Vector3& trans_evals) {
  SchurSpectrum spec;
  spec.s_r = rot_evals.asDiagonal();
  spec.s_t = trans_evals.asDiagonal();
  spectrum(spec.s_r, spec.eigvals_r, spec.eigvecs_r);
  spectrum(spec.s_t, spec.eigvals_t, spec.eigvecs_t);
  return spec;
}

}  // namespace

TEST_CASE("clamp leaves spectra above the floor untouched") {
  CHECK((clamp_eigenvalues(Vector3(1, 2, 10), 10.0) - Vector3(1, 2, 10)).norm() == 0.0);
}

TEST_CASE("clamp floors small eigenvalues at lambda_max over kappa_tg") {
  CHECK((clamp_eigenvalues(Vector3(0.01, 2, 10), 10.0) - Vector3(1, 2, 10)).norm() == 0.0);
  CHECK((clamp_eigenvalues(Vector3(0, 0, 5), 10.0) - Vector3(0.5, 0.5, 5)).norm() == 0.0);
}

TEST_CASE("clamp rejects empty spectra and bad targets") {
  CHECK_THROWS_AS(clamp_eigenvalues(Vector3(0, 0, 0), 10.0), AllZeroSpectrum);
  CHECK_THROWS_AS(clamp_eigenvalues(Vector3(1, 2, 3), 1.0), InvalidSpec);
}

TEST_CASE("clamp preserves order and the top eigenvalue, and bounds the ratio") {
  Rng rng(91);
  for (int trial = 0; trial < 500; ++trial) {
    Vector3 evals;
    evals[0] = rng.uniform(0.0, 1.0) < 0.3 ? 0.0 : std::exp(rng.uniform(-20.0, 3.0));
    evals[1] = evals[0] + std::exp(rng.uniform(-10.0, 3.0));
    evals[2] = evals[1] + std::exp(rng.uniform(-10.0, 3.0));
    const double kappa_tg = 1.0 + std::exp(rng.uniform(-2.0, 4.0));
    const Vector3 clamped = clamp_eigenvalues(evals, kappa_tg);
    CHECK(clamped[2] == evals[2]);  // lambda_3 unchanged within 1e-12 by identity
    CHECK(clamped[0] <= clamped[1]);
    CHECK(clamped[1] <= clamped[2]);
    CHECK(clamped[2] / clamped[0] <= kappa_tg * (1.0 + 1e-9));
  }
}

TEST_CASE("identity spectra build the identity operator") {
  const Preconditioner p(diagonal_spectrum(Vector3::Ones(), Vector3::Ones()), 10.0);
  Rng rng(92);
  for (int trial = 0; trial < 20; ++trial) {
    Vector6 r;
    for (int i = 0; i < 6; ++i) r[i] = rng.normal();
    CHECK((p.apply(r) - r).norm() <= 1e-15 * r.norm());
  }
}

TEST_CASE("clamped rotation block applies the inverse clamped eigenvalues") {
  const Preconditioner p(diagonal_spectrum(Vector3(0.01, 2, 10), Vector3::Ones()), 10.0);
  Vector6 r = Vector6::Zero();
  r[0] = 1.0;  // rotation x = eigendirection with clamped eigenvalue 1
  CHECK(p.apply(r)[0] == doctest::Approx(1.0));
  r.setZero();
  r[1] = 1.0;
  CHECK(p.apply(r)[1] == doctest::Approx(0.5));
  r.setZero();
  r[2] = 1.0;
  CHECK(p.apply(r)[2] == doctest::Approx(0.1));
  CHECK(p.rot_condition() <= 10.0 * (1 + 1e-12));
}

TEST_CASE("preconditioner application is linear") {
  Rng rng(93);
  const auto sys = random_jacobian_system(rng, 60);
  const Preconditioner p(spectrum_of(sys.sys), 10.0);
  for (int trial = 0; trial < 50; ++trial) {
    Vector6 r1, r2;
    for (int i = 0; i < 6; ++i) {
      r1[i] = rng.normal();
      r2[i] = rng.normal();
    }
    const double a = rng.normal();
    const double b = rng.normal();
    const Vector6 lhs = p.apply(a * r1 + b * r2);
    const Vector6 rhs = a * p.apply(r1) + b * p.apply(r2);
    CHECK((lhs - rhs).norm() <= 1e-12 * std::max(1.0, rhs.norm()));
  }
}

TEST_CASE("clamped-direction residuals are divided by the floor") {
  const SchurSpectrum spec = diagonal_spectrum(Vector3(0.001, 5, 10), Vector3(0.002, 6, 12));
  const Preconditioner p(spec, 10.0);
  Vector6 r = Vector6::Zero();
  r.head<3>() = spec.eigvecs_r.col(0);  // clamped rotation eigendirection, floor = 1
  const Vector6 z = p.apply(r);
  CHECK((z.head<3>() - r.head<3>() / 1.0).norm() < 1e-12);
  r.setZero();
  r.tail<3>() = spec.eigvecs_t.col(0);  // floor = 12/10
  CHECK((p.apply(r).tail<3>() - r.tail<3>() * (10.0 / 12.0)).norm() < 1e-12);
}

TEST_CASE("pcg solves the identity system in one iteration") {
  HessianSystem h;
  h.h_rr = Matrix3::Identity();
  h.h_tt = Matrix3::Identity();
  Vector6 g;
  g << 1, -2, 3, -4, 5, -6;
  const SolveOutcome out = pcg_solve(h, g, Preconditioner::identity(), 1e-10, 50);
  CHECK(out.status == PcgStatus::kConverged);
  CHECK(out.inner_iterations == 1);
  CHECK((out.increment.to_vector() + g).norm() <= 1e-12);
}

TEST_CASE("pcg matches the dense direct solve on well-conditioned systems") {
  Rng rng(94);
  for (int trial = 0; trial < 200; ++trial) {
    HessianSystem h;
    h.h_rr = random_spd3(rng, 0.5, 50.0);
    h.h_tt = random_spd3(rng, 0.5, 50.0);
    h.h_rt = 0.1 * random_spd3(rng, 0.1, 1.0);
    Vector6 g;
    for (int i = 0; i < 6; ++i) g[i] = rng.normal();

    Eigen::SelfAdjointEigenSolver<Matrix6> evd(h.full());
    if (evd.eigenvalues()(0) <= 0.0 ||
        evd.eigenvalues()(5) / evd.eigenvalues()(0) > 1e3) {
      continue;
    }
    const Vector6 direct = h.full().ldlt().solve(-g);
    const SolveOutcome out = pcg_solve(h, g, Preconditioner(spectrum_of(h), 10.0), 1e-10, 50);
    CHECK(out.status == PcgStatus::kConverged);
    CHECK((out.increment.to_vector() - direct).norm() <= 1e-8 * std::max(1.0, direct.norm()));
  }
}

TEST_CASE("pcg reports curvature breakdown instead of dividing by zero") {
  HessianSystem h;  // rank-deficient: zero translational z row
  h.h_rr = Matrix3::Identity();
  h.h_tt = Vector3(1, 1, 0).asDiagonal();
  Vector6 g = Vector6::Zero();
  g[5] = 1.0;  // gradient pointing into the null space
  const SolveOutcome out = pcg_solve(h, g, Preconditioner::identity(), 1e-10, 50);
  CHECK(out.status == PcgStatus::kCurvatureBreakdown);
  CHECK(out.increment.to_vector().allFinite());
}

TEST_CASE("pcg handles a zero gradient") {
  HessianSystem h;
  h.h_rr = Matrix3::Identity();
  h.h_tt = Matrix3::Identity();
  const SolveOutcome out = pcg_solve(h, Vector6::Zero(), Preconditioner::identity(), 1e-8, 10);
  CHECK(out.status == PcgStatus::kConverged);
  CHECK(out.inner_iterations == 0);
  CHECK(out.increment.to_vector().isZero());
}

TEST_CASE("clamped preconditioning needs no more iterations than identity") {
  // Spread spectrum collapses into few clusters after clamping.
  Rng rng(95);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix3 qr = testing::random_rotation(rng);
    const Matrix3 qt = testing::random_rotation(rng);
    HessianSystem h;
    h.h_rr = qr * Vector3(1e-6, 1e-3, 1.0).asDiagonal() * qr.transpose();
    h.h_tt = qt * Vector3(2e-6, 4e-4, 2.0).asDiagonal() * qt.transpose();
    Vector6 g;
    for (int i = 0; i < 6; ++i) g[i] = rng.normal();

    const SolveOutcome ident = pcg_solve(h, g, Preconditioner::identity(), 1e-6, 60);
    const SolveOutcome clamped =
        pcg_solve(h, g, Preconditioner(spectrum_of(h), 10.0), 1e-6, 60);
    CHECK(clamped.inner_iterations <= ident.inner_iterations);
  }
}

TEST_CASE("solution remapping with no mask equals the plain solve") {
  Rng rng(96);
  const auto jac = random_jacobian_system(rng, 80);
  const SchurSpectrum spec = spectrum_of(jac.sys);
  const Vector6 g = jac.sys.gradient();
  const PoseIncrement plain = solve_plain(jac.sys, g);
  const PoseIncrement sr = solve_sr(jac.sys, g, DegeneracyMask{}, spec);
  CHECK((sr.to_vector() - plain.to_vector()).norm() <=
        1e-8 * std::max(1.0, plain.to_vector().norm()));
}

TEST_CASE("solution remapping with everything masked returns zero") {
  Rng rng(97);
  const auto jac = random_jacobian_system(rng, 80);
  DegeneracyMask mask;
  mask.rot = {true, true, true};
  mask.trans = {true, true, true};
  const PoseIncrement out = solve_sr(jac.sys, jac.sys.gradient(), mask, spectrum_of(jac.sys));
  CHECK(out.to_vector().isZero(1e-12));
}

TEST_CASE("solution remapping output is orthogonal to masked directions") {
  Rng rng(98);
  for (int trial = 0; trial < 50; ++trial) {
    const auto jac = random_jacobian_system(rng, 80);
    const SchurSpectrum spec = spectrum_of(jac.sys);
    DegeneracyMask mask;
    mask.trans[0] = true;
    const PoseIncrement out = solve_sr(jac.sys, jac.sys.gradient(), mask, spec);
    CHECK(std::abs(out.delta_t.dot(spec.eigvecs_t.col(0))) <= 1e-10);
  }
}

TEST_CASE("solution remapping reports a singular unmasked subproblem") {
  HessianSystem h;  // translational z has no information and is NOT masked
  h.h_rr = Matrix3::Identity();
  h.h_tt = Vector3(1, 1, 0).asDiagonal();
  SchurSpectrum spec = diagonal_spectrum(Vector3::Ones(), Vector3(0, 1, 1));
  CHECK_THROWS_AS(solve_sr(h, Vector6::Zero(), DegeneracyMask{}, spec), SingularSystem);
}

TEST_CASE("truncated solve with no mask equals the pseudoinverse solve") {
  Rng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const auto jac = random_jacobian_system(rng, trial % 2 == 0 ? 80 : 4);
    const Vector6 g = jac.sys.gradient();
    const PoseIncrement out = solve_tsvd(jac.sys, g, DegeneracyMask{}, spectrum_of(jac.sys));
    const Vector6 oracle = testing::pinv_svd(jac.sys.full(), 1e-10) * (-g);
    CHECK((out.to_vector() - oracle).norm() <= 1e-8 * std::max(1.0, oracle.norm()));
  }
}

TEST_CASE("truncated solve zeroes the masked components exactly") {
  Rng rng(100);
  const auto jac = random_jacobian_system(rng, 60);
  const SchurSpectrum spec = spectrum_of(jac.sys);
  DegeneracyMask mask;
  mask.rot[0] = true;
  mask.trans[1] = true;
  const PoseIncrement out = solve_tsvd(jac.sys, jac.sys.gradient(), mask, spec);
  CHECK(std::abs(out.phi.dot(spec.eigvecs_r.col(0))) <= 1e-10);
  CHECK(std::abs(out.delta_t.dot(spec.eigvecs_t.col(1))) <= 1e-10);
}

TEST_CASE("tikhonov solve approaches the plain solve as damping vanishes") {
  Rng rng(101);
  const auto jac = random_jacobian_system(rng, 100);
  const Vector6 g = jac.sys.gradient();
  const Vector6 plain = solve_plain(jac.sys, g).to_vector();
  const Vector6 damped = solve_treg(jac.sys, g, 1e-10).to_vector();
  CHECK((damped - plain).norm() <= 1e-6 * std::max(1.0, plain.norm()));
}

TEST_CASE("tikhonov on a diagonal system follows the closed form") {
  HessianSystem h;
  h.h_rr = Vector3(1, 2, 3).asDiagonal();
  h.h_tt = Vector3(4, 5, 6).asDiagonal();
  Vector6 g;
  g << 1, 1, 1, 1, 1, 1;
  const double lambda = 100.0;
  const Vector6 out = solve_treg(h, g, lambda).to_vector();
  for (int k = 0; k < 6; ++k) {
    CHECK(out[k] == doctest::Approx(-1.0 / (k + 1 + lambda)).epsilon(1e-12));
  }
}

TEST_CASE("baselines coincide with the plain solve when nothing is flagged") {
  Rng rng(102);
  for (int trial = 0; trial < 30; ++trial) {
    const auto jac = random_jacobian_system(rng, 120);
    const SchurSpectrum spec = spectrum_of(jac.sys);
    const Vector6 g = jac.sys.gradient();
    const Vector6 plain = solve_plain(jac.sys, g).to_vector();
    const double scale = std::max(1.0, plain.norm());
    CHECK((solve_sr(jac.sys, g, DegeneracyMask{}, spec).to_vector() - plain).norm() <=
          1e-8 * scale);
    CHECK((solve_tsvd(jac.sys, g, DegeneracyMask{}, spec).to_vector() - plain).norm() <=
          1e-8 * scale);
    CHECK((solve_treg(jac.sys, g, 1e-9).to_vector() - plain).norm() <= 1e-6 * scale);
  }
}

TEST_CASE("pinv_reduced_solve identity and residual cases") {
  CHECK((pinv_reduced_solve(Matrix3::Identity(), Vector3(1, 2, 3)) - Vector3(1, 2, 3)).norm() <=
        1e-14);

  // Rank-2 system with the gradient in range(S).
  Rng rng(103);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix3 q = testing::random_rotation(rng);
    const Matrix3 s = q * Vector3(0, 1, 3).asDiagonal() * q.transpose();
    const Vector3 g = s * random_vector(rng);  // in range by construction
    const Vector3 x = pinv_reduced_solve(s, g);
    CHECK((s * x - g).norm() <= 1e-9 * std::max(1.0, g.norm()));
  }
}

TEST_CASE("epsilon-regularized solves approach the pseudoinverse solve monotonically") {
  Rng rng(104);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix3 q = testing::random_rotation(rng);
    const Vector3 evals(0.0, std::exp(rng.uniform(-2.0, 2.0)), std::exp(rng.uniform(0.0, 3.0)));
    const Matrix3 s = q * evals.asDiagonal() * q.transpose();
    const Vector3 g = s * random_vector(rng);
    const Vector3 exact = pinv_reduced_solve(s, g);

    double prev_gap = std::numeric_limits<double>::infinity();
    for (double eps : {1e-2, 1e-4, 1e-6}) {
      const Vector3 x_eps = (s + eps * Matrix3::Identity()).ldlt().solve(g);
      // Compare observable components only (range of S).
      double gap = 0.0;
      for (int i = 1; i < 3; ++i) {
        gap = std::max(gap, std::abs(q.col(i).dot(x_eps - exact)));
      }
      CHECK(gap <= prev_gap * (1.0 + 1e-9));
      prev_gap = gap;
    }
    CHECK(prev_gap <= 1e-5 * std::max(1.0, exact.norm()));
  }
}

TEST_CASE("MAP clamp identity: S + Gamma equals V Lambda~ V^T") {
  Rng rng(105);
  for (int trial = 0; trial < 200; ++trial) {
    const Matrix3 s = random_spd3(rng, 1e-6, 1e2);
    Vector3 evals;
    Matrix3 evecs;
    spectrum(s, evals, evecs);
    const Vector3 clamped = clamp_eigenvalues(evals, 10.0);
    const Matrix3 gamma = evecs * (clamped - evals).asDiagonal() * evecs.transpose();
    const Matrix3 lhs = s + gamma;
    const Matrix3 rhs = evecs * clamped.asDiagonal() * evecs.transpose();
    CHECK((lhs - rhs).norm() <= 1e-10 * std::max(1.0, rhs.norm()));
  }
}

TEST_CASE("direct-solve error amplification respects the condition-number bound") {
  Rng rng(106);
  for (int trial = 0; trial < 300; ++trial) {
    const Matrix3 qr = testing::random_rotation(rng);
    const Matrix3 qt = testing::random_rotation(rng);
    HessianSystem h;
    h.h_rr = qr * Vector3(std::exp(rng.uniform(-6.0, 0.0)), 1.0, std::exp(rng.uniform(0.0, 4.0)))
                      .asDiagonal() *
             qr.transpose();
    h.h_tt = qt * Vector3(std::exp(rng.uniform(-6.0, 0.0)), 1.0, std::exp(rng.uniform(0.0, 4.0)))
                      .asDiagonal() *
             qt.transpose();
    const Matrix6 full = h.full();
    Eigen::SelfAdjointEigenSolver<Matrix6> evd(full);
    if (evd.eigenvalues()(0) <= 0.0) continue;
    const double kappa = evd.eigenvalues()(5) / evd.eigenvalues()(0);

    Vector6 g, dg;
    for (int i = 0; i < 6; ++i) {
      g[i] = rng.normal();
      dg[i] = rng.normal() * 1e-5;
    }
    const Vector6 x = full.ldlt().solve(g);
    const Vector6 dx = full.ldlt().solve(dg);
    if (x.norm() < 1e-12) continue;
    CHECK(dx.norm() / x.norm() <= kappa * (dg.norm() / g.norm()) * (1.0 + 1e-6));
  }
}
