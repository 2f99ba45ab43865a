#include "ltr/pointcloud/kdtree.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <queue>

namespace ltr::pointcloud {

KdTree::KdTree(const std::vector<Vec3>& points) : points_(&points), index_(points.size()) {
  std::iota(index_.begin(), index_.end(), std::size_t{0});
  build(0, index_.size(), 0);
}

void KdTree::build(std::size_t lo, std::size_t hi, int depth) {
  if (hi - lo <= 1) return;
  const int axis = depth % 3;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::nth_element(index_.begin() + lo, index_.begin() + mid, index_.begin() + hi,
                   [&](std::size_t a, std::size_t b) {
                     const double va = (*points_)[a][axis], vb = (*points_)[b][axis];
                     return va < vb || (va == vb && a < b);
                   });
  build(lo, mid, depth + 1);
  build(mid + 1, hi, depth + 1);
}

template <class Visitor>
void KdTree::search(std::size_t lo, std::size_t hi, int depth, const Vec3& q, Visitor& visit,
                    double& bound2) const {
  if (lo >= hi) return;
  const std::size_t mid = lo + (hi - lo) / 2;
  const std::size_t idx = index_[mid];
  const Vec3& p = (*points_)[idx];
  visit(idx, (p - q).squaredNorm());
  if (hi - lo == 1) return;
  const int axis = depth % 3;
  const double diff = q[axis] - p[axis];
  const bool left_first = diff <= 0.0;
  if (left_first) {
    search(lo, mid, depth + 1, q, visit, bound2);
    if (diff * diff <= bound2) search(mid + 1, hi, depth + 1, q, visit, bound2);
  } else {
    search(mid + 1, hi, depth + 1, q, visit, bound2);
    if (diff * diff <= bound2) search(lo, mid, depth + 1, q, visit, bound2);
  }
}

std::vector<std::pair<std::size_t, double>> KdTree::knn(const Vec3& q, std::size_t k) const {
  std::vector<std::pair<std::size_t, double>> out;
  if (k == 0 || index_.empty()) return out;
  auto worse = [](const std::pair<std::size_t, double>& a, const std::pair<std::size_t, double>& b) {
    return a.second < b.second || (a.second == b.second && a.first < b.first);
  };
  std::priority_queue<std::pair<std::size_t, double>, std::vector<std::pair<std::size_t, double>>,
                      decltype(worse)>
      heap(worse);
  double bound2 = std::numeric_limits<double>::infinity();
  auto visit = [&](std::size_t idx, double d2) {
    const std::pair<std::size_t, double> cand{idx, d2};
    if (heap.size() < k) {
      heap.push(cand);
    } else if (worse(cand, heap.top())) {
      heap.pop();
      heap.push(cand);
    }
    if (heap.size() == k) bound2 = heap.top().second;
  };
  search(0, index_.size(), 0, q, visit, bound2);
  out.resize(heap.size());
  for (std::size_t i = out.size(); i-- > 0;) {
    out[i] = heap.top();
    heap.pop();
  }
  return out;
}

std::pair<std::size_t, double> KdTree::nearest(const Vec3& q) const {
  auto r = knn(q, 1);
  if (r.empty()) return {npos, std::numeric_limits<double>::infinity()};
  return r.front();
}

std::vector<std::size_t> KdTree::radius(const Vec3& q, double radius) const {
  std::vector<std::size_t> out;
  const double r2 = radius * radius;
  double bound2 = r2;
  auto visit = [&](std::size_t idx, double d2) {
    if (d2 <= r2) out.push_back(idx);
  };
  search(0, index_.size(), 0, q, visit, bound2);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace ltr::pointcloud
