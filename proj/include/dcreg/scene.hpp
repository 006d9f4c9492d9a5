#ifndef DCREG_SCENE_HPP
#define DCREG_SCENE_HPP

#include <cstdint>
#include <optional>
#include <string>

#include "dcreg/point_cloud.hpp"

namespace dcreg {

enum class SceneKind { kCylinder, kPlane, kCorridor, kRoom };

std::string scene_name(SceneKind kind);
std::optional<SceneKind> scene_from_name(const std::string& name);

/// Synthetic degenerate-scene parameters. Geometry defaults follow the
/// benchmark configuration: a 5 m radius, 10 m tall cylinder of 7600 points
/// with 5 mm coordinate noise.
struct SceneSpec {
  SceneKind kind = SceneKind::kCylinder;
  double radius = 5.0;      // cylinder
  double height = 10.0;     // cylinder axis length / corridor & room height
  double extent = 10.0;     // plane side / corridor & room length
  double wall_gap = 2.0;    // corridor wall separation
  std::size_t point_count = 7600;
  double noise_sigma = 0.005;  // m
  std::uint64_t seed = 0;

  void validate() const;
};

/// Sampled scene with analytic unit normals. Noise perturbs coordinates
/// only; normals stay exact surface normals of the noise-free geometry.
/// kCylinder: lateral surface only (no end caps), radial normals.
/// kPlane: z = 0 grid, all normals e_z.
/// kCorridor: two parallel x-walls plus a floor (x and yaw weakly
///   constrained).
/// kRoom: three mutually orthogonal wall pairs (well-constrained control).
PointCloud gen_scene(const SceneSpec& spec);

enum class Axis { kX, kY, kZ };

std::string axis_name(Axis axis);
std::optional<Axis> axis_from_name(const std::string& name);

/// Perturbation pose: rotation of rot_deg about rot_axis composed with a
/// translation of trans_m along trans_axis. The seed is unused for fixed
/// axes; it feeds the optional random-axis variant.
RigidTransform perturb_pose(Axis rot_axis, double rot_deg, Axis trans_axis, double trans_m);

/// Random-axis variant: both axes drawn uniformly on the sphere from seed.
RigidTransform perturb_pose_random(double rot_deg, double trans_m, std::uint64_t seed);

}  // namespace dcreg

#endif
