#include "ltr/metrics/completion.hpp"

#include <unordered_set>

#include "ltr/error.hpp"
#include "ltr/pointcloud/kdtree.hpp"

namespace ltr::metrics {

double f1_score(double precision, double recall) {
  return precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

pointcloud::PointCloud voxel_dedup(const pointcloud::PointCloud& cloud, double voxel_size) {
  pointcloud::PointCloud out;
  std::unordered_set<pointcloud::VoxelKey, pointcloud::VoxelKeyHash> seen;
  for (std::size_t i = 0; i < cloud.size(); ++i)
    if (seen.insert(pointcloud::VoxelKey::of(cloud.positions[i], voxel_size)).second) out.push_from(cloud, i);
  return out;
}

CompletionScores completion_metrics(const pointcloud::PointCloud& gt_in, const pointcloud::PointCloud& pred_in,
                                    const CompletionOptions& options) {
  if (!(options.threshold > 0.0)) throw InvalidArgument("completion threshold must be positive");
  gt_in.validate();
  pred_in.validate();
  const pointcloud::PointCloud gt = options.voxel_dedup ? voxel_dedup(gt_in, options.threshold / 2) : gt_in;
  const pointcloud::PointCloud pred = options.voxel_dedup ? voxel_dedup(pred_in, options.threshold / 2) : pred_in;
  const double t2 = options.threshold * options.threshold;

  CompletionScores s;
  s.gt_points = gt.size();
  s.pred_points = pred.size();
  if (gt.empty()) throw InvalidArgument("ground-truth cloud is empty");

  const pointcloud::KdTree pred_tree(pred.positions);
  const bool semantic = gt.has_labels() && pred.has_labels();
  WeightedConfusion confusion;
  double complete = 0.0, total = 0.0;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    const double w = gt.has_confidences() ? gt.confidences[i] : 1.0;
    total += w;
    const auto [j, d2] = pred_tree.nearest(gt.positions[i]);
    const bool hit = j != pointcloud::KdTree::npos && d2 <= t2;
    if (hit) complete += w;
    if (semantic) confusion.add(gt.labels[i], hit ? pred.labels[j] : kIgnore - 1, w);
  }
  s.completeness = total > 0.0 ? complete / total : 0.0;
  if (semantic) s.semantic = evaluate_semantic(confusion);

  const pointcloud::KdTree gt_tree(gt.positions);
  std::size_t close = 0;
  for (std::size_t j = 0; j < pred.size(); ++j) {
    const geometry::Vec3& p = pred.positions[j];
    if (options.observed && !options.observed->contains(options.observed->key_of(p))) continue;
    if (options.region && !options.region->contains(p)) continue;
    ++s.scored_pred_points;
    if (gt_tree.nearest(p).second <= t2) ++close;
  }
  if (s.scored_pred_points > 0) {
    s.accuracy = static_cast<double>(close) / static_cast<double>(s.scored_pred_points);
    s.f1 = f1_score(*s.accuracy, s.completeness);
  }
  return s;
}

}  // namespace ltr::metrics
