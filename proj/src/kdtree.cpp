#include "dcreg/kdtree.hpp"

#include <algorithm>
#include <numeric>

#include "dcreg/errors.hpp"

namespace dcreg {

KdTree::KdTree(const PointCloud& cloud) : points_(cloud.points) {
  if (points_.empty()) throw EmptyCloud("cannot index an empty cloud");
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  nodes_.reserve(2 * points_.size() / kLeafSize + 2);
  root_ = build(0, points_.size());
}

int KdTree::build(std::size_t begin, std::size_t end) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  if (end - begin <= kLeafSize) {
    nodes_[id].begin = begin;
    nodes_[id].end = end;
    return id;
  }

  // Split along the axis of largest extent at the median point.
  Vector3 lo = points_[order_[begin]];
  Vector3 hi = lo;
  for (std::size_t i = begin + 1; i < end; ++i) {
    lo = lo.cwiseMin(points_[order_[i]]);
    hi = hi.cwiseMax(points_[order_[i]]);
  }
  int axis = 0;
  (hi - lo).maxCoeff(&axis);

  const std::size_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::size_t a, std::size_t b) {
                     const double pa = points_[a][axis];
                     const double pb = points_[b][axis];
                     return pa < pb || (pa == pb && a < b);
                   });

  nodes_[id].axis = axis;
  nodes_[id].split = points_[order_[mid]][axis];
  const int left = build(begin, mid);
  const int right = build(mid, end);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

KdTree::Hit KdTree::nearest(const Vector3& query) const {
  Hit best;
  best.index = points_.size();  // sentinel so any real point wins the tie-break
  nearest_impl(root_, query, best);
  return best;
}

void KdTree::nearest_impl(int node, const Vector3& query, Hit& best) const {
  const Node& n = nodes_[node];
  if (n.axis < 0) {
    for (std::size_t i = n.begin; i < n.end; ++i) {
      const std::size_t idx = order_[i];
      const double d = (points_[idx] - query).norm();
      if (d < best.distance || (d == best.distance && idx < best.index)) {
        best.distance = d;
        best.index = idx;
      }
    }
    return;
  }
  const double delta = query[n.axis] - n.split;
  const int near = delta < 0.0 ? n.left : n.right;
  const int far = delta < 0.0 ? n.right : n.left;
  nearest_impl(near, query, best);
  if (std::abs(delta) <= best.distance) nearest_impl(far, query, best);
}

std::vector<KdTree::Hit> KdTree::knearest(const Vector3& query, std::size_t k) const {
  std::vector<Hit> heap;
  if (k == 0) return heap;
  heap.reserve(k + 1);
  knearest_impl(root_, query, k, heap);
  std::sort(heap.begin(), heap.end(), [](const Hit& a, const Hit& b) {
    return a.distance < b.distance || (a.distance == b.distance && a.index < b.index);
  });
  return heap;
}

void KdTree::knearest_impl(int node, const Vector3& query, std::size_t k,
                           std::vector<Hit>& heap) const {
  auto worse = [](const Hit& a, const Hit& b) {
    return a.distance < b.distance || (a.distance == b.distance && a.index < b.index);
  };
  const Node& n = nodes_[node];
  if (n.axis < 0) {
    for (std::size_t i = n.begin; i < n.end; ++i) {
      const std::size_t idx = order_[i];
      Hit h{idx, (points_[idx] - query).norm()};
      if (heap.size() < k) {
        heap.push_back(h);
        std::push_heap(heap.begin(), heap.end(), worse);
      } else if (worse(h, heap.front())) {
        std::pop_heap(heap.begin(), heap.end(), worse);
        heap.back() = h;
        std::push_heap(heap.begin(), heap.end(), worse);
      }
    }
    return;
  }
  const double delta = query[n.axis] - n.split;
  const int near = delta < 0.0 ? n.left : n.right;
  const int far = delta < 0.0 ? n.right : n.left;
  knearest_impl(near, query, k, heap);
  if (heap.size() < k || std::abs(delta) <= heap.front().distance) {
    knearest_impl(far, query, k, heap);
  }
}

std::vector<std::size_t> KdTree::radius_search(const Vector3& query, double radius) const {
  std::vector<std::size_t> out;
  if (radius <= 0.0) return out;
  radius_impl(root_, query, radius, out);
  std::sort(out.begin(), out.end());
  return out;
}

void KdTree::radius_impl(int node, const Vector3& query, double radius,
                         std::vector<std::size_t>& out) const {
  const Node& n = nodes_[node];
  if (n.axis < 0) {
    for (std::size_t i = n.begin; i < n.end; ++i) {
      const std::size_t idx = order_[i];
      if ((points_[idx] - query).norm() <= radius) out.push_back(idx);
    }
    return;
  }
  const double delta = query[n.axis] - n.split;
  if (delta < 0.0 || delta <= radius) radius_impl(n.left, query, radius, out);
  if (delta >= 0.0 || -delta <= radius) radius_impl(n.right, query, radius, out);
}

}  // namespace dcreg
