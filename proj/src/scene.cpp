#include "dcreg/scene.hpp"

#include <cmath>

#include "dcreg/errors.hpp"
#include "dcreg/rng.hpp"

namespace dcreg {

std::string scene_name(SceneKind kind) {
  switch (kind) {
    case SceneKind::kCylinder: return "cylinder";
    case SceneKind::kPlane: return "plane";
    case SceneKind::kCorridor: return "corridor";
    case SceneKind::kRoom: return "room";
  }
  return "unknown";
}

std::optional<SceneKind> scene_from_name(const std::string& name) {
  if (name == "cylinder") return SceneKind::kCylinder;
  if (name == "plane") return SceneKind::kPlane;
  if (name == "corridor") return SceneKind::kCorridor;
  if (name == "room") return SceneKind::kRoom;
  return std::nullopt;
}

void SceneSpec::validate() const {
  if (!(radius > 0.0) || !(height > 0.0) || !(extent > 0.0) || !(wall_gap > 0.0)) {
    throw InvalidSpec("scene dimensions must be positive");
  }
  if (point_count < 100) throw InvalidSpec("scene needs at least 100 points");
  if (noise_sigma < 0.0) throw InvalidSpec("noise sigma cannot be negative");
}

namespace {

void add_point(PointCloud& cloud, const Vector3& p, const Vector3& n) {
  cloud.points.push_back(p);
  cloud.normals.push_back(n);
}

// Cylinder lateral surface, axis = z, centered at the origin. Ring lattice
// (LiDAR-like): ring and column spacing chosen nearly equal so k-NN
// neighborhoods are well-spread everywhere.
void sample_cylinder(const SceneSpec& spec, PointCloud& cloud) {
  const double circumference = 2.0 * M_PI * spec.radius;
  const double n_real = static_cast<double>(spec.point_count);
  std::size_t rings = static_cast<std::size_t>(
      std::lround(std::sqrt(n_real * spec.height / circumference)));
  rings = std::max<std::size_t>(rings, 2);
  const std::size_t cols = (spec.point_count + rings - 1) / rings;
  const double dz = spec.height / static_cast<double>(rings);
  for (std::size_t i = 0; i < spec.point_count; ++i) {
    const std::size_t ring = i / cols;
    const std::size_t col = i % cols;
    const double theta = 2.0 * M_PI * static_cast<double>(col) / static_cast<double>(cols);
    const double z = -0.5 * spec.height + dz * (static_cast<double>(ring) + 0.5);
    const Vector3 normal(std::cos(theta), std::sin(theta), 0.0);
    add_point(cloud, Vector3(spec.radius * normal.x(), spec.radius * normal.y(), z), normal);
  }
}

// Regular grid on z = 0, side length = extent.
void sample_plane(const SceneSpec& spec, PointCloud& cloud) {
  const auto side = static_cast<std::size_t>(std::ceil(std::sqrt(double(spec.point_count))));
  const double step = spec.extent / static_cast<double>(side - 1);
  for (std::size_t i = 0; i < spec.point_count; ++i) {
    const std::size_t row = i / side;
    const std::size_t col = i % side;
    add_point(cloud,
              Vector3(-0.5 * spec.extent + step * double(col),
                      -0.5 * spec.extent + step * double(row), 0.0),
              Vector3(0.0, 0.0, 1.0));
  }
}

// Two walls at y = +-wall_gap/2 plus a floor at z = 0; corridor runs along x.
void sample_corridor(const SceneSpec& spec, Rng& rng, PointCloud& cloud) {
  for (std::size_t i = 0; i < spec.point_count; ++i) {
    const double x = rng.uniform(-0.5 * spec.extent, 0.5 * spec.extent);
    const std::size_t face = i % 3;
    if (face == 0) {
      add_point(cloud, Vector3(x, rng.uniform(-0.5 * spec.wall_gap, 0.5 * spec.wall_gap), 0.0),
                Vector3(0.0, 0.0, 1.0));
    } else {
      const double y = face == 1 ? -0.5 * spec.wall_gap : 0.5 * spec.wall_gap;
      add_point(cloud, Vector3(x, y, rng.uniform(0.0, spec.height)),
                Vector3(0.0, face == 1 ? 1.0 : -1.0, 0.0));
    }
  }
}

// Closed box: three orthogonal wall pairs, extent x extent footprint.
void sample_room(const SceneSpec& spec, Rng& rng, PointCloud& cloud) {
  const double hx = 0.5 * spec.extent;
  const double hy = 0.5 * spec.extent;
  const double hz = 0.5 * spec.height;
  for (std::size_t i = 0; i < spec.point_count; ++i) {
    const std::size_t face = i % 6;
    const double u = rng.uniform(-1.0, 1.0);
    const double v = rng.uniform(-1.0, 1.0);
    switch (face) {
      case 0: add_point(cloud, Vector3(-hx, u * hy, v * hz), Vector3(1, 0, 0)); break;
      case 1: add_point(cloud, Vector3(hx, u * hy, v * hz), Vector3(-1, 0, 0)); break;
      case 2: add_point(cloud, Vector3(u * hx, -hy, v * hz), Vector3(0, 1, 0)); break;
      case 3: add_point(cloud, Vector3(u * hx, hy, v * hz), Vector3(0, -1, 0)); break;
      case 4: add_point(cloud, Vector3(u * hx, v * hy, -hz), Vector3(0, 0, 1)); break;
      default: add_point(cloud, Vector3(u * hx, v * hy, hz), Vector3(0, 0, -1)); break;
    }
  }
}

}  // namespace

PointCloud gen_scene(const SceneSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  PointCloud cloud;
  cloud.points.reserve(spec.point_count);
  cloud.normals.reserve(spec.point_count);

  switch (spec.kind) {
    case SceneKind::kCylinder: sample_cylinder(spec, cloud); break;
    case SceneKind::kPlane: sample_plane(spec, cloud); break;
    case SceneKind::kCorridor: sample_corridor(spec, rng, cloud); break;
    case SceneKind::kRoom: sample_room(spec, rng, cloud); break;
  }

  if (spec.noise_sigma > 0.0) {
    for (auto& p : cloud.points) {
      p += Vector3(rng.normal(0.0, spec.noise_sigma), rng.normal(0.0, spec.noise_sigma),
                   rng.normal(0.0, spec.noise_sigma));
    }
  }
  return cloud;
}

std::string axis_name(Axis axis) {
  switch (axis) {
    case Axis::kX: return "x";
    case Axis::kY: return "y";
    case Axis::kZ: return "z";
  }
  return "?";
}

std::optional<Axis> axis_from_name(const std::string& name) {
  if (name == "x") return Axis::kX;
  if (name == "y") return Axis::kY;
  if (name == "z") return Axis::kZ;
  return std::nullopt;
}

namespace {

Vector3 unit_axis(Axis axis) {
  switch (axis) {
    case Axis::kX: return Vector3::UnitX();
    case Axis::kY: return Vector3::UnitY();
    case Axis::kZ: return Vector3::UnitZ();
  }
  return Vector3::UnitZ();
}

}  // namespace

RigidTransform perturb_pose(Axis rot_axis, double rot_deg, Axis trans_axis, double trans_m) {
  if (!std::isfinite(rot_deg) || !std::isfinite(trans_m)) {
    throw InvalidSpec("perturbation magnitudes must be finite");
  }
  const Vector3 phi = unit_axis(rot_axis) * (rot_deg * M_PI / 180.0);
  return RigidTransform(exp_so3(phi), unit_axis(trans_axis) * trans_m);
}

RigidTransform perturb_pose_random(double rot_deg, double trans_m, std::uint64_t seed) {
  Rng rng(seed);
  auto sphere_dir = [&rng]() {
    // Rejection-free: normalize a Gaussian triple.
    Vector3 v(rng.normal(), rng.normal(), rng.normal());
    while (v.norm() < 1e-9) v = Vector3(rng.normal(), rng.normal(), rng.normal());
    return Vector3(v.normalized());
  };
  const Vector3 rot_dir = sphere_dir();
  const Vector3 trans_dir = sphere_dir();
  return RigidTransform(exp_so3(rot_dir * (rot_deg * M_PI / 180.0)), trans_dir * trans_m);
}

}  // namespace dcreg
