#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ltr/pipeline/config.hpp"

namespace ltr::pipeline {

/// A small street scene: ground plane, three buildings, two parked cars, one
/// car driving along a spline, sky. Ground truth comes from ray casting the
/// true shapes; the annotation primitives are inflated copies of them.
struct SyntheticOptions {
  int frames = 6;
  int width = 160;
  int height = 64;
  double label_noise = 0.1;   // fraction of pixels whose probability peak is a wrong class
  double peak = 0.7;          // probability mass on the peak class
  std::uint64_t seed = 7;
  int lidar_azimuth_steps = 360;
  int lidar_elevation_steps = 24;
};

struct SyntheticScene {
  PipelineConfig config;              // paths filled, mode instance
  std::string config_path;
  std::vector<std::string> frame_names;
  std::vector<std::vector<int>> ground_truth;  // per frame, semantic·1000 + instance
  int dynamic_code = 0;                       // code of the moving car
};

/// Writes frames.json, primitives.json, weights.json, config.json and the
/// per-frame image, probability map, scan and ground-truth label map into `dir`.
SyntheticScene write_synthetic_scene(const std::string& dir, const SyntheticOptions& options = {});

}  // namespace ltr::pipeline
