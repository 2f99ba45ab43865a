#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ltr/pipeline/config.hpp"
#include "ltr/pointcloud/accumulate.hpp"

namespace ltr::pipeline {

/// One manifest entry. Paths are resolved; empty when absent.
struct Frame {
  std::string name;
  double timestamp = 0.0;
  int index = 0;
  geometry::Pose camera;                   // camera to world
  std::optional<geometry::Pose> scan_pose;  // scanner to world; camera pose when absent
  std::string image;
  std::string probabilities;
  std::string scan;
  std::string ground_truth;
};

/// Reads the manifest (an array, or an object with "frames") and sorts by
/// timestamp. Missing poses are taken from `pose_file` by frame index.
/// Throws FormatError / ConfigError / DuplicateTimestamp.
std::vector<Frame> read_manifest(const std::string& path, const std::string& pose_file = "");

/// Scans of the frames that have one, in world coordinates via the scan pose.
std::vector<pointcloud::StampedCloud> load_scans(const std::vector<Frame>& frames);

/// One annotated moving object: its points in the object frame.
struct DynamicObject {
  std::size_t primitive = 0;      // index into SceneBatch::primitives
  pointcloud::PointCloud canonical;
  std::size_t offset = 0;         // first row in the fused cloud
};

struct SceneBatch {
  std::vector<Frame> frames;
  std::vector<geometry::BoundingPrimitive> primitives;
  pointcloud::PointCloud static_cloud;  // world frame, with normals
  std::vector<DynamicObject> objects;

  /// Static points followed by every object's canonical points placed at its
  /// first annotated pose.
  pointcloud::PointCloud fused_cloud() const;
  /// Primitives used to label unseen fused points: static ones as is and
  /// dynamic ones at their first annotated pose.
  std::vector<geometry::BoundingPrimitive> fusion_primitives() const;

  /// World points for `frame`: the static cloud plus every dynamic object
  /// labeled at its timestamp. `fused_index` maps each row to the fused cloud.
  pointcloud::PointCloud frame_cloud(const Frame& frame, std::vector<std::size_t>& fused_index) const;
};

/// Loads the manifest, primitives and scans; accumulates the static cloud
/// (unless `paths.cloud` is set) and one canonical cloud per dynamic primitive.
SceneBatch load_batch(const PipelineConfig& config);

}  // namespace ltr::pipeline
