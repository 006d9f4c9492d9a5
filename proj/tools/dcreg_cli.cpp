#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "dcreg/bench.hpp"
#include "dcreg/cloud_io.hpp"
#include "dcreg/normals.hpp"

namespace {

using namespace dcreg;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

void add_config_flags(CLI::App* cmd, SolverConfig& config, std::string& solver) {
  cmd->add_option("--kappa-th", config.kappa_th, "Detection threshold on normalized eigenvalues");
  cmd->add_option("--kappa-tg", config.kappa_tg, "Preconditioner target condition number");
  cmd->add_option("--max-iter", config.max_icp_iterations, "Max ICP iterations");
  cmd->add_option("--trans-conv", config.trans_convergence, "Translation convergence (m)");
  cmd->add_option("--rot-conv", config.rot_convergence, "Rotation convergence (rad)");
  cmd->add_option("--corr-radius", config.corr_radius, "Correspondence search radius (m)");
  cmd->add_option("--pcg-tol", config.pcg_tol, "PCG relative residual tolerance");
  cmd->add_option("--pcg-max-iter", config.pcg_max_iter, "PCG max inner iterations");
  cmd->add_option("--treg-lambda", config.treg_lambda, "Tikhonov damping weight");
  cmd->add_option("--solver", solver, "Solver: dcreg-pcg | sr | tsvd | treg | plain");
}

void add_scene_flags(CLI::App* cmd, SceneSpec& spec, std::string& scene) {
  cmd->add_option("--scene", scene, "Scene kind: cylinder | plane | corridor | room");
  cmd->add_option("--points", spec.point_count, "Point count");
  cmd->add_option("--radius", spec.radius, "Cylinder radius (m)");
  cmd->add_option("--height", spec.height, "Height (m)");
  cmd->add_option("--extent", spec.extent, "Plane/corridor/room extent (m)");
  cmd->add_option("--wall-gap", spec.wall_gap, "Corridor wall separation (m)");
  cmd->add_option("--noise", spec.noise_sigma, "Gaussian coordinate noise sigma (m)");
  cmd->add_option("--seed", spec.seed, "Random seed");
}

void add_perturb_flags(CLI::App* cmd, Perturbation& pert, std::string& rot_axis,
                       std::string& trans_axis) {
  cmd->add_option("--rot-axis", rot_axis, "Perturbation rotation axis: x | y | z");
  cmd->add_option("--rot-deg", pert.rot_deg, "Perturbation rotation (deg)");
  cmd->add_option("--trans-axis", trans_axis, "Perturbation translation axis: x | y | z");
  cmd->add_option("--trans-m", pert.trans_m, "Perturbation translation (m)");
}

// JSON has no inf; condition numbers in reports use a string sentinel.
json finite_or_inf(double v) {
  if (std::isfinite(v)) return v;
  return "inf";
}

json pose_to_json(const RigidTransform& pose) {
  json r = json::array();
  for (int i = 0; i < 3; ++i) {
    r.push_back({pose.rotation()(i, 0), pose.rotation()(i, 1), pose.rotation()(i, 2)});
  }
  return json{{"rotation", r},
              {"translation",
               {pose.translation().x(), pose.translation().y(), pose.translation().z()}}};
}

json result_to_json(const RegistrationResult& result) {
  json iterations = json::array();
  for (const auto& t : result.trace) {
    std::string rot_mask, trans_mask;
    for (bool b : t.mask.rot) rot_mask.push_back(b ? '1' : '0');
    for (bool b : t.mask.trans) trans_mask.push_back(b ? '1' : '0');
    iterations.push_back({{"iteration", t.iteration},
                          {"correspondences", t.correspondence_count},
                          {"residual_rmse", t.residual_rmse},
                          {"update_rot_norm", t.update_rot_norm},
                          {"update_trans_norm", t.update_trans_norm},
                          {"kappa_r", finite_or_inf(t.kappa_r)},
                          {"kappa_t", finite_or_inf(t.kappa_t)},
                          {"clamped_kappa_r", finite_or_inf(t.clamped_kappa_r)},
                          {"clamped_kappa_t", finite_or_inf(t.clamped_kappa_t)},
                          {"diag_kappa_r", finite_or_inf(t.diag_kappa_r)},
                          {"diag_kappa_t", finite_or_inf(t.diag_kappa_t)},
                          {"full_kappa", finite_or_inf(t.full_kappa)},
                          {"rot_mask", rot_mask},
                          {"trans_mask", trans_mask},
                          {"pcg_iterations", t.pcg_iterations}});
  }
  json metrics{{"fitness_pct", result.metrics.fitness_pct},
               {"rmse", result.metrics.rmse},
               {"chamfer", result.metrics.chamfer}};
  if (result.metrics.trans_error) metrics["trans_error"] = *result.metrics.trans_error;
  if (result.metrics.rot_error_deg) metrics["rot_error_deg"] = *result.metrics.rot_error_deg;
  return json{{"final_pose", pose_to_json(result.final_pose)},
              {"converged", result.converged},
              {"reason", reason_name(result.reason)},
              {"iterations", result.trace.size()},
              {"trace", iterations},
              {"metrics", metrics}};
}

void print_characterization(const DegeneracyReport& report, std::ostream& out) {
  out << "subspace  idx  eigenvalue     norm.kappa   degen  axis  gamma    angle.deg  "
         "contrib.x%  contrib.y%  contrib.z%\n";
  char line[160];
  for (const auto& row : report.rows) {
    std::snprintf(line, sizeof(line),
                  "%-8s  %3d  %-12.5g  %-11.5g  %-5s  %-4c  %-7.4f  %-9.2f  %-10.1f  %-10.1f  "
                  "%-10.1f\n",
                  row.subspace.c_str(), row.eig_index, row.eigenvalue, row.normalized_kappa,
                  row.degenerate ? "yes" : "no", row.dominant_axis, row.strength, row.angle_deg,
                  row.contributions_pct[0], row.contributions_pct[1], row.contributions_pct[2]);
    out << line;
  }
}

int cmd_gen(const SceneSpec& spec, const std::string& out_path) {
  const PointCloud cloud = gen_scene(spec);
  save_cloud(cloud, out_path);
  std::cout << "wrote " << cloud.size() << " points to " << out_path << "\n";
  return kExitOk;
}

int cmd_register(const std::string& source_path, const std::string& target_path,
                 const SolverConfig& config, const Perturbation& init_pert,
                 const std::string& out_json, const std::string& out_aligned) {
  const PointCloud source = load_cloud(source_path);
  const PointCloud target = load_cloud(target_path);
  const RegistrationResult result =
      register_clouds(source, target, init_pert.pose(), config);

  const json doc = result_to_json(result);
  if (out_json.empty()) {
    std::cout << doc.dump(2) << "\n";
  } else {
    std::ofstream out(out_json, std::ios::trunc);
    if (!out) throw IoError("cannot write '" + out_json + "'");
    out << doc.dump(2) << "\n";
  }
  if (!out_aligned.empty()) {
    save_cloud(source.transformed(result.final_pose), out_aligned);
  }
  return kExitOk;
}

int cmd_inspect(const std::string& cloud_path, const SolverConfig& config,
                const Perturbation& pert) {
  PointCloud cloud = load_cloud(cloud_path);
  if (!cloud.has_normals()) cloud = estimate_normals(cloud, 5);
  const KdTree index(cloud);
  const auto corr =
      find_correspondences(cloud, index, cloud, pert.pose(), config.corr_radius);
  const HessianSystem sys = assemble_system(corr);
  const auto [spec, mask] = detect(sys, config.kappa_th);
  const DegeneracyReport report = characterize_detection(spec, mask);

  std::cout << "correspondences: " << corr.size() << "\n";
  std::cout << "kappa(S_R) = " << spec.kappa_r << "  kappa(S_t) = " << spec.kappa_t
            << (spec.pinv_tt || spec.pinv_rr ? "  [pseudoinverse branch]" : "") << "\n";
  print_characterization(report, std::cout);
  return kExitOk;
}

int cmd_bench(const SceneSpec& spec, const std::vector<std::string>& solver_names,
              const SolverConfig& config, const Perturbation& pert, const std::string& out,
              bool analytic_normals) {
  std::vector<SolverKind> solvers;
  for (const auto& name : solver_names) {
    if (name == "all") {
      solvers = {SolverKind::kDcregPcg, SolverKind::kTreg, SolverKind::kTsvd, SolverKind::kSr,
                 SolverKind::kPlain};
      break;
    }
    const auto kind = solver_from_name(name);
    if (!kind) throw CLI::ValidationError("--solvers", "unknown solver '" + name + "'");
    solvers.push_back(*kind);
  }

  const BenchReport report = run_benchmark(spec, solvers, config, pert, out, !analytic_normals);
  std::printf("%-10s %5s %6s %9s %9s %11s %9s %6s %6s\n", "solver", "conv", "iters", "fit%",
              "rmse", "trans.err", "rot.err", "maskT", "maskR");
  for (const auto& run : report.runs) {
    std::printf("%-10s %5s %6d %9.2f %9.4f %11.4f %9.4f %6s %6s\n", run.solver.c_str(),
                run.converged ? "yes" : "no", run.iterations, run.fitness_pct, run.rmse,
                run.trans_error, run.rot_error_deg, run.trans_mask.c_str(),
                run.rot_mask.c_str());
  }
  if (!out.empty()) {
    std::cout << "report: " << out << ".jsonl / " << out << ".csv\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Degeneracy-aware point-to-plane ICP toolkit"};
  app.require_subcommand(1);

  SceneSpec scene_spec;
  std::string scene_kind = "cylinder";
  SolverConfig config;
  std::string solver_choice = "dcreg-pcg";
  Perturbation pert;
  std::string rot_axis = "z", trans_axis = "z";
  std::string out_path, out_json, out_aligned;
  std::string source_path, target_path, cloud_path;
  std::vector<std::string> solver_names{"all"};

  auto* gen = app.add_subcommand("gen", "Generate a synthetic scene cloud");
  add_scene_flags(gen, scene_spec, scene_kind);
  gen->add_option("--out", out_path, "Output cloud file (.ply/.pcd/.xyz)")->required();

  auto* reg = app.add_subcommand("register", "Register two cloud files");
  reg->add_option("source", source_path, "Source cloud file")->required();
  reg->add_option("target", target_path, "Target cloud file")->required();
  add_config_flags(reg, config, solver_choice);
  add_perturb_flags(reg, pert, rot_axis, trans_axis);
  reg->add_option("--out", out_json, "Result JSON path (stdout when omitted)");
  reg->add_option("--aligned", out_aligned, "Write the aligned source cloud here");

  auto* bench = app.add_subcommand("bench", "Run the degenerate-scene benchmark");
  add_scene_flags(bench, scene_spec, scene_kind);
  add_config_flags(bench, config, solver_choice);
  add_perturb_flags(bench, pert, rot_axis, trans_axis);
  bench->add_option("--solvers", solver_names, "Solvers to run, or 'all'");
  bench->add_option("--out", out_path, "Report path prefix (.jsonl/.csv appended)");
  bool analytic_normals = false;
  bench->add_flag("--analytic-normals", analytic_normals,
                  "Register against the scene's analytic normals instead of k=5 estimates");

  auto* inspect = app.add_subcommand("inspect", "One-shot detection/characterization report");
  inspect->add_option("cloud", cloud_path, "Cloud file")->required();
  add_config_flags(inspect, config, solver_choice);
  add_perturb_flags(inspect, pert, rot_axis, trans_axis);

  // Perturbation defaults differ per command: register/inspect start at the
  // identity unless the user asks otherwise.
  pert.rot_deg = 0.0;
  pert.trans_m = 0.0;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (const auto kind = scene_from_name(scene_kind)) {
      scene_spec.kind = *kind;
    } else {
      std::cerr << "unknown scene '" << scene_kind << "'\n";
      return kExitUsage;
    }
    if (const auto kind = solver_from_name(solver_choice)) {
      config.solver = *kind;
    } else {
      std::cerr << "unknown solver '" << solver_choice << "'\n";
      return kExitUsage;
    }
    const auto ra = axis_from_name(rot_axis);
    const auto ta = axis_from_name(trans_axis);
    if (!ra || !ta) {
      std::cerr << "axes must be one of x, y, z\n";
      return kExitUsage;
    }
    pert.rot_axis = *ra;
    pert.trans_axis = *ta;

    if (gen->parsed()) return cmd_gen(scene_spec, out_path);
    if (reg->parsed()) {
      return cmd_register(source_path, target_path, config, pert, out_json, out_aligned);
    }
    if (bench->parsed()) {
      if (bench->count("--rot-deg") == 0) pert.rot_deg = 2.0;
      if (bench->count("--trans-m") == 0) pert.trans_m = 0.5;
      return cmd_bench(scene_spec, solver_names, config, pert, out_path, analytic_normals);
    }
    if (inspect->parsed()) return cmd_inspect(cloud_path, config, pert);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
