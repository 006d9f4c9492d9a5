#ifndef DCREG_KDTREE_HPP
#define DCREG_KDTREE_HPP

#include <cstddef>
#include <limits>
#include <vector>

#include "dcreg/point_cloud.hpp"

namespace dcreg {

/// Exact 3D kd-tree over an immutable snapshot of a cloud's points.
/// Queries return true nearest neighbors (no approximation); the test suite
/// cross-checks every query mode against a brute-force linear scan.
class KdTree {
 public:
  explicit KdTree(const PointCloud& cloud);

  struct Hit {
    std::size_t index = 0;
    double distance = std::numeric_limits<double>::infinity();
  };

  /// Single nearest neighbor. Ties broken toward the lowest point index.
  Hit nearest(const Vector3& query) const;

  /// k nearest neighbors, ascending by (distance, index).
  std::vector<Hit> knearest(const Vector3& query, std::size_t k) const;

  /// All points with d <= radius, ascending index order. radius <= 0 yields
  /// an empty result.
  std::vector<std::size_t> radius_search(const Vector3& query, double radius) const;

  std::size_t size() const { return points_.size(); }

 private:
  struct Node {
    int axis = -1;          // -1 marks a leaf
    double split = 0.0;
    std::size_t begin = 0;  // leaf point range in order_
    std::size_t end = 0;
    int left = -1;
    int right = -1;
  };

  int build(std::size_t begin, std::size_t end);
  void nearest_impl(int node, const Vector3& query, Hit& best) const;
  void knearest_impl(int node, const Vector3& query, std::size_t k,
                     std::vector<Hit>& heap) const;
  void radius_impl(int node, const Vector3& query, double radius,
                   std::vector<std::size_t>& out) const;

  std::vector<Vector3> points_;      // snapshot, original index order
  std::vector<std::size_t> order_;   // permutation referenced by leaves
  std::vector<Node> nodes_;
  int root_ = -1;

  static constexpr std::size_t kLeafSize = 16;
};

}  // namespace dcreg

#endif
