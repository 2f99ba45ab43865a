#include "ltr/pipeline/scene.hpp"

#include <algorithm>
#include <filesystem>
#include <map>

#include "ltr/error.hpp"
#include "ltr/io/ply.hpp"
#include "ltr/io/pose_file.hpp"
#include "ltr/pointcloud/normals.hpp"

namespace ltr::pipeline {

namespace fs = std::filesystem;
using io::Json;
using pointcloud::PointCloud;

namespace {

std::string entry_path(const Json& e, const char* key, const fs::path& base) {
  if (!e.contains(key) || e[key].is_null()) return {};
  if (!e[key].is_string()) throw FormatError(std::string("manifest field '") + key + "' must be a string");
  const std::string p = e[key].get<std::string>();
  if (p.empty() || fs::path(p).is_absolute()) return p;
  return (base / p).lexically_normal().string();
}

void with_normals(PointCloud& cloud, int k, const std::vector<geometry::Vec3>& origins) {
  if (cloud.has_normals()) return;
  if (cloud.size() < static_cast<std::size_t>(k)) {
    cloud.normals.assign(cloud.size(), geometry::Vec3::UnitZ());
    return;
  }
  cloud = pointcloud::estimate_normals(cloud, k, origins).cloud;
}

}  // namespace

std::vector<Frame> read_manifest(const std::string& path, const std::string& pose_file) {
  Json j = io::read_json(path);
  if (j.is_object() && j.contains("frames")) j = j["frames"];
  if (!j.is_array()) throw FormatError("manifest must be an array of frames");
  const fs::path base = fs::path(path).parent_path();

  std::map<int, geometry::Pose> file_poses;
  if (!pose_file.empty())
    for (const geometry::Pose& p : io::read_poses(pose_file)) file_poses[p.frame_index().value_or(0)] = p;

  std::vector<Frame> frames;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const Json& e = j[i];
    if (!e.is_object()) throw FormatError("manifest entries must be objects");
    Frame f;
    try {
      f.index = e.contains("frame") ? e["frame"].get<int>() : static_cast<int>(i);
      f.timestamp = e.contains("timestamp") ? e["timestamp"].get<double>() : static_cast<double>(f.index);
      f.name = e.contains("name") ? e["name"].get<std::string>() : std::to_string(f.index);
    } catch (const nlohmann::json::exception&) {
      throw FormatError("manifest entry " + std::to_string(i) + " has a field of the wrong type");
    }
    if (e.contains("pose")) {
      f.camera = io::pose_from_json(e["pose"]);
    } else if (auto it = file_poses.find(f.index); it != file_poses.end()) {
      f.camera = it->second;
    } else {
      throw FormatError("frame '" + f.name + "' has no pose");
    }
    if (e.contains("scan_pose")) f.scan_pose = io::pose_from_json(e["scan_pose"]);
    f.image = entry_path(e, "image", base);
    f.probabilities = entry_path(e, "probabilities", base);
    f.scan = entry_path(e, "scan", base);
    f.ground_truth = entry_path(e, "ground_truth", base);
    frames.push_back(std::move(f));
  }
  std::stable_sort(frames.begin(), frames.end(),
                   [](const Frame& a, const Frame& b) { return a.timestamp < b.timestamp; });
  for (std::size_t i = 1; i < frames.size(); ++i) {
    if (frames[i].timestamp == frames[i - 1].timestamp)
      throw DuplicateTimestamp("frames '" + frames[i - 1].name + "' and '" + frames[i].name + "'");
    if (frames[i].name == frames[i - 1].name) throw FormatError("duplicate frame name '" + frames[i].name + "'");
  }
  return frames;
}

std::vector<pointcloud::StampedCloud> load_scans(const std::vector<Frame>& frames) {
  std::vector<pointcloud::StampedCloud> out;
  for (const Frame& f : frames) {
    if (f.scan.empty()) continue;
    pointcloud::StampedCloud s;
    s.pose = f.scan_pose.value_or(f.camera);
    s.cloud = io::read_ply(f.scan).cloud;
    s.cloud.frame_index.assign(s.cloud.size(), f.index);
    s.timestamp = f.timestamp;
    s.frame = f.index;
    out.push_back(std::move(s));
  }
  return out;
}

SceneBatch load_batch(const PipelineConfig& config) {
  require_path(config.paths.frames, "frame manifest");
  require_path(config.paths.primitives, "primitives");
  if (!config.paths.poses.empty()) require_path(config.paths.poses, "pose file");
  SceneBatch batch;
  batch.frames = read_manifest(config.paths.frames, config.paths.poses);
  batch.primitives = io::read_primitives(config.paths.primitives);
  const std::vector<pointcloud::StampedCloud> scans = load_scans(batch.frames);

  std::vector<geometry::BoundingPrimitive> dynamic;
  for (const auto& b : batch.primitives)
    if (b.dynamic) dynamic.push_back(b);

  int max_frame = 0;
  for (const auto& s : scans) max_frame = std::max(max_frame, s.frame);
  std::vector<geometry::Vec3> origins(static_cast<std::size_t>(max_frame) + 1, geometry::Vec3::Zero());
  for (const auto& s : scans) origins[static_cast<std::size_t>(s.frame)] = s.pose.translation();

  if (!config.paths.cloud.empty()) {
    require_path(config.paths.cloud, "static cloud");
    batch.static_cloud = io::read_ply(config.paths.cloud).cloud;
    with_normals(batch.static_cloud, config.normal_neighbors, {});
  } else {
    batch.static_cloud = pointcloud::accumulate_static(scans, dynamic, config.dedup_radius);
    with_normals(batch.static_cloud, config.normal_neighbors, origins);
  }
  batch.static_cloud.labels.clear();
  batch.static_cloud.confidences.clear();

  std::size_t offset = batch.static_cloud.size();
  for (std::size_t i = 0; i < batch.primitives.size(); ++i) {
    const auto& b = batch.primitives[i];
    if (!b.dynamic) continue;
    std::vector<pointcloud::StampedCloud> labeled;
    for (const auto& s : scans)
      if (b.pose_at(s.timestamp)) labeled.push_back(s);
    DynamicObject obj;
    obj.primitive = i;
    if (!labeled.empty()) {
      obj.canonical = pointcloud::accumulate_dynamic(labeled, b).canonical;
      obj.canonical.frame_index.clear();
      obj.canonical.colors.clear();
      with_normals(obj.canonical, config.normal_neighbors, {});
    }
    obj.offset = offset;
    offset += obj.canonical.size();
    batch.objects.push_back(std::move(obj));
  }
  return batch;
}

PointCloud SceneBatch::fused_cloud() const {
  PointCloud out = static_cloud;
  out.frame_index.clear();
  out.colors.clear();
  for (const DynamicObject& o : objects) {
    const auto& b = primitives[o.primitive];
    out.append(o.canonical.transformed(b.dynamic_poses.front().pose));
  }
  return out;
}

std::vector<geometry::BoundingPrimitive> SceneBatch::fusion_primitives() const {
  std::vector<geometry::BoundingPrimitive> out;
  for (auto b : primitives) {
    if (b.dynamic) b.pose = b.dynamic_poses.front().pose;
    out.push_back(std::move(b));
  }
  return out;
}

PointCloud SceneBatch::frame_cloud(const Frame& frame, std::vector<std::size_t>& fused_index) const {
  PointCloud out = static_cloud;
  out.frame_index.clear();
  out.colors.clear();
  fused_index.resize(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) fused_index[i] = i;
  for (const DynamicObject& o : objects) {
    const auto pose = primitives[o.primitive].pose_at(frame.timestamp);
    if (!pose || o.canonical.empty()) continue;
    out.append(o.canonical.transformed(*pose));
    for (std::size_t i = 0; i < o.canonical.size(); ++i) fused_index.push_back(o.offset + i);
  }
  return out;
}

}  // namespace ltr::pipeline
