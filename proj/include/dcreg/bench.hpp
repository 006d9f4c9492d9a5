#ifndef DCREG_BENCH_HPP
#define DCREG_BENCH_HPP

#include <string>
#include <vector>

#include "dcreg/pipeline.hpp"
#include "dcreg/scene.hpp"

namespace dcreg {

/// Perturbation applied to the scene before self-registration.
struct Perturbation {
  Axis rot_axis = Axis::kZ;
  double rot_deg = 2.0;
  Axis trans_axis = Axis::kZ;
  double trans_m = 0.5;

  RigidTransform pose() const { return perturb_pose(rot_axis, rot_deg, trans_axis, trans_m); }
};

struct BenchRun {
  std::string solver;
  Perturbation perturbation;
  bool converged = false;
  std::string reason;
  int iterations = 0;
  double fitness_pct = 0.0;
  double rmse = 0.0;
  double chamfer = 0.0;
  double trans_error = 0.0;    // m vs ground truth
  double rot_error_deg = 0.0;  // deg vs ground truth
  std::string trans_mask;      // e.g. "001", ascending eigenvalue order
  std::string rot_mask;
  double wall_clock_ms = 0.0;
};

struct BenchReport {
  int schema_version = 1;
  SceneSpec scene;
  SolverConfig config;
  std::string config_hash;  // recorded in every run row
  std::vector<BenchRun> runs;
};

/// Registers the perturbed scene against the original once per solver and
/// collects metrics plus wall-clock time. Rows appear in the order solvers
/// were given. Writes `<out>.jsonl` and `<out>.csv` when out is non-empty.
///
/// estimate_normals=true (default) drops the scene's analytic normals and
/// lets the pipeline estimate them with k = 5, matching the reference
/// registration protocol; false registers against the analytic normals.
BenchReport run_benchmark(const SceneSpec& scene, const std::vector<SolverKind>& solvers,
                          const SolverConfig& config, const Perturbation& perturbation,
                          const std::string& out_prefix, bool estimate_normals = true);

/// JSON-lines serialization (one run per line, header line first).
std::string serialize_report(const BenchReport& report);
BenchReport parse_report(const std::string& jsonl);

std::string report_csv(const BenchReport& report);

/// FNV-1a over the canonical config serialization.
std::string config_hash(const SceneSpec& scene, const SolverConfig& config,
                        const Perturbation& perturbation);

}  // namespace dcreg

#endif
