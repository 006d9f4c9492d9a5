#include "dcreg/bench.hpp"

#include <chrono>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "dcreg/errors.hpp"

namespace dcreg {

using nlohmann::json;

namespace {

std::string mask_string(const std::array<bool, 3>& mask) {
  std::string s;
  for (bool b : mask) s.push_back(b ? '1' : '0');
  return s;
}

json scene_to_json(const SceneSpec& spec) {
  return json{{"kind", scene_name(spec.kind)},   {"radius", spec.radius},
              {"height", spec.height},           {"extent", spec.extent},
              {"wall_gap", spec.wall_gap},       {"point_count", spec.point_count},
              {"noise_sigma", spec.noise_sigma}, {"seed", spec.seed}};
}

SceneSpec scene_from_json(const json& j) {
  SceneSpec spec;
  spec.kind = scene_from_name(j.at("kind").get<std::string>()).value();
  spec.radius = j.at("radius").get<double>();
  spec.height = j.at("height").get<double>();
  spec.extent = j.at("extent").get<double>();
  spec.wall_gap = j.at("wall_gap").get<double>();
  spec.point_count = j.at("point_count").get<std::size_t>();
  spec.noise_sigma = j.at("noise_sigma").get<double>();
  spec.seed = j.at("seed").get<std::uint64_t>();
  return spec;
}

json config_to_json(const SolverConfig& config) {
  return json{{"kappa_th", config.kappa_th},
              {"kappa_tg", config.kappa_tg},
              {"max_icp_iterations", config.max_icp_iterations},
              {"trans_convergence", config.trans_convergence},
              {"rot_convergence", config.rot_convergence},
              {"corr_radius", config.corr_radius},
              {"pcg_tol", config.pcg_tol},
              {"pcg_max_iter", config.pcg_max_iter},
              {"solver", solver_name(config.solver)},
              {"treg_lambda", config.treg_lambda}};
}

SolverConfig config_from_json(const json& j) {
  SolverConfig config;
  config.kappa_th = j.at("kappa_th").get<double>();
  config.kappa_tg = j.at("kappa_tg").get<double>();
  config.max_icp_iterations = j.at("max_icp_iterations").get<int>();
  config.trans_convergence = j.at("trans_convergence").get<double>();
  config.rot_convergence = j.at("rot_convergence").get<double>();
  config.corr_radius = j.at("corr_radius").get<double>();
  config.pcg_tol = j.at("pcg_tol").get<double>();
  config.pcg_max_iter = j.at("pcg_max_iter").get<int>();
  config.solver = solver_from_name(j.at("solver").get<std::string>()).value();
  config.treg_lambda = j.at("treg_lambda").get<double>();
  return config;
}

json perturbation_to_json(const Perturbation& p) {
  return json{{"rot_axis", axis_name(p.rot_axis)},
              {"rot_deg", p.rot_deg},
              {"trans_axis", axis_name(p.trans_axis)},
              {"trans_m", p.trans_m}};
}

Perturbation perturbation_from_json(const json& j) {
  Perturbation p;
  p.rot_axis = axis_from_name(j.at("rot_axis").get<std::string>()).value();
  p.rot_deg = j.at("rot_deg").get<double>();
  p.trans_axis = axis_from_name(j.at("trans_axis").get<std::string>()).value();
  p.trans_m = j.at("trans_m").get<double>();
  return p;
}

json run_to_json(const BenchRun& run, const std::string& hash) {
  return json{{"solver", run.solver},
              {"perturbation", perturbation_to_json(run.perturbation)},
              {"config_hash", hash},
              {"converged", run.converged},
              {"reason", run.reason},
              {"iterations", run.iterations},
              {"fitness_pct", run.fitness_pct},
              {"rmse", run.rmse},
              {"chamfer", run.chamfer},
              {"trans_error", run.trans_error},
              {"rot_error_deg", run.rot_error_deg},
              {"trans_mask", run.trans_mask},
              {"rot_mask", run.rot_mask},
              {"wall_clock_ms", run.wall_clock_ms}};
}

BenchRun run_from_json(const json& j) {
  BenchRun run;
  run.solver = j.at("solver").get<std::string>();
  run.perturbation = perturbation_from_json(j.at("perturbation"));
  run.converged = j.at("converged").get<bool>();
  run.reason = j.at("reason").get<std::string>();
  run.iterations = j.at("iterations").get<int>();
  run.fitness_pct = j.at("fitness_pct").get<double>();
  run.rmse = j.at("rmse").get<double>();
  run.chamfer = j.at("chamfer").get<double>();
  run.trans_error = j.at("trans_error").get<double>();
  run.rot_error_deg = j.at("rot_error_deg").get<double>();
  run.trans_mask = j.at("trans_mask").get<std::string>();
  run.rot_mask = j.at("rot_mask").get<std::string>();
  run.wall_clock_ms = j.at("wall_clock_ms").get<double>();
  return run;
}

}  // namespace

std::string config_hash(const SceneSpec& scene, const SolverConfig& config,
                        const Perturbation& perturbation) {
  json j{{"scene", scene_to_json(scene)},
         {"config", config_to_json(config)},
         {"perturbation", perturbation_to_json(perturbation)}};
  const std::string canonical = j.dump();
  std::uint64_t hash = 1469598103934665603ULL;
  for (unsigned char c : canonical) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  std::ostringstream oss;
  oss << std::hex << hash;
  return oss.str();
}

BenchReport run_benchmark(const SceneSpec& scene, const std::vector<SolverKind>& solvers,
                          const SolverConfig& config, const Perturbation& perturbation,
                          const std::string& out_prefix, bool estimate_normals) {
  BenchReport report;
  report.scene = scene;
  report.config = config;
  report.config_hash = config_hash(scene, config, perturbation);

  if (!solvers.empty()) {
    PointCloud original = gen_scene(scene);
    if (estimate_normals) original.normals.clear();  // pipeline estimates k = 5
    const RigidTransform pert = perturbation.pose();
    const PointCloud perturbed = original.transformed(pert);
    // Self-registration ground truth: mapping the perturbed cloud back onto
    // the original is exactly pert^-1.
    const RigidTransform truth = pert.inverse();

    for (SolverKind solver : solvers) {
      SolverConfig run_config = config;
      run_config.solver = solver;

      const auto t0 = std::chrono::steady_clock::now();
      const RegistrationResult result =
          register_clouds(perturbed, original, RigidTransform::identity(), run_config);
      const auto t1 = std::chrono::steady_clock::now();

      BenchRun run;
      run.solver = solver_name(solver);
      run.perturbation = perturbation;
      run.converged = result.converged;
      run.reason = reason_name(result.reason);
      run.iterations = static_cast<int>(result.trace.size());
      run.fitness_pct = result.metrics.fitness_pct;
      run.rmse = result.metrics.rmse;
      run.chamfer = result.metrics.chamfer;
      const auto [trans_err, rot_err] = pose_error(result.final_pose, truth);
      run.trans_error = trans_err;
      run.rot_error_deg = rot_err;
      if (!result.trace.empty()) {
        run.trans_mask = mask_string(result.trace.back().mask.trans);
        run.rot_mask = mask_string(result.trace.back().mask.rot);
      } else {
        run.trans_mask = "---";
        run.rot_mask = "---";
      }
      run.wall_clock_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
      report.runs.push_back(run);
    }
  }

  if (!out_prefix.empty()) {
    {
      std::ofstream jsonl(out_prefix + ".jsonl", std::ios::trunc);
      if (!jsonl) throw IoError("cannot write '" + out_prefix + ".jsonl'");
      jsonl << serialize_report(report);
    }
    {
      std::ofstream csv(out_prefix + ".csv", std::ios::trunc);
      if (!csv) throw IoError("cannot write '" + out_prefix + ".csv'");
      csv << report_csv(report);
    }
  }
  return report;
}

std::string serialize_report(const BenchReport& report) {
  std::ostringstream out;
  json header{{"schema_version", report.schema_version},
              {"scene", scene_to_json(report.scene)},
              {"config", config_to_json(report.config)},
              {"config_hash", report.config_hash}};
  out << header.dump() << "\n";
  for (const auto& run : report.runs) {
    out << run_to_json(run, report.config_hash).dump() << "\n";
  }
  return out.str();
}

BenchReport parse_report(const std::string& jsonl) {
  std::istringstream in(jsonl);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("report is empty");
  const json header = json::parse(line);
  BenchReport report;
  report.schema_version = header.at("schema_version").get<int>();
  report.scene = scene_from_json(header.at("scene"));
  report.config = config_from_json(header.at("config"));
  report.config_hash = header.at("config_hash").get<std::string>();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    report.runs.push_back(run_from_json(json::parse(line)));
  }
  return report;
}

std::string report_csv(const BenchReport& report) {
  std::ostringstream out;
  out << "solver,converged,reason,iterations,fitness_pct,rmse,chamfer,trans_error,"
         "rot_error_deg,trans_mask,rot_mask,wall_clock_ms,config_hash\n";
  out.precision(17);
  for (const auto& run : report.runs) {
    out << run.solver << ',' << (run.converged ? 1 : 0) << ',' << run.reason << ','
        << run.iterations << ',' << run.fitness_pct << ',' << run.rmse << ',' << run.chamfer
        << ',' << run.trans_error << ',' << run.rot_error_deg << ',' << run.trans_mask << ','
        << run.rot_mask << ',' << run.wall_clock_ms << ',' << report.config_hash << "\n";
  }
  return out.str();
}

}  // namespace dcreg
