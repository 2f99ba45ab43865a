#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <vector>

#include "ltr/crf/label_space.hpp"
#include "ltr/crf/weights.hpp"
#include "ltr/geometry/camera.hpp"
#include "ltr/pointcloud/point_cloud.hpp"
#include "ltr/pointcloud/visibility.hpp"

namespace ltr::crf {

using geometry::Vec2;
using geometry::Vec3;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr double kProbabilityFloor = 1e-6;

/// Pixel variables of one frame, row-major. Pixel i sits at
/// (i % width + 0.5, i / width + 0.5).
struct PixelField {
  int width = 0;
  int height = 0;
  int labels = 0;
  std::vector<std::array<double, 3>> colors;  // 0-255
  std::vector<std::uint8_t> admissible;      // P×S, 1 where ξ = 0
  std::vector<double> probabilities;          // P×S external p^P

  int size() const { return width * height; }
  Vec2 position(int i) const { return Vec2(i % width + 0.5, i / width + 0.5); }
  /// Throws InvalidArgument on size mismatches or a pixel with no admissible label.
  void validate() const;
};

/// Visible 3D points plus virtual sky points (appended after the real ones).
struct PointField {
  int labels = 0;
  std::vector<Vec3> positions;        // unused for virtual points
  std::vector<double> normal_z;       // unused for virtual points
  std::vector<Vec2> projections;      // π_l
  std::vector<std::uint8_t> is_virtual;
  std::vector<std::uint8_t> admissible;  // M×S
  std::vector<std::int64_t> source;      // cloud index, or -1 for virtual points

  int size() const { return static_cast<int>(projections.size()); }
  int real_count() const;
  void validate() const;
};

/// Static primitives plus dynamic ones labeled at `timestamp`, the latter
/// copied with their pose resolved.
std::vector<geometry::BoundingPrimitive> resolve_primitives(const std::vector<geometry::BoundingPrimitive>& all,
                                                            double timestamp);

/// ξ^P as an admissibility mask (P×S). Pixel rays admit the label of every
/// primitive they pass through; ground polygons count only where the ray
/// meets their surface. Rays meeting nothing admit only sky.
/// `camera` maps camera to world. Throws NoPrimitives.
std::vector<std::uint8_t> build_pixel_constraints(const std::vector<geometry::BoundingPrimitive>& primitives,
                                                  const geometry::Pose& camera,
                                                  const geometry::CameraIntrinsics& intr, const LabelSpace& labels);

/// ξ^L for the visible points of `cloud` (world frame) and one virtual sky
/// point per sky-only pixel. Real points admit sky and the labels of the
/// primitives containing them. Missing normals give n_z = 0.
PointField build_point_constraints(const std::vector<geometry::BoundingPrimitive>& primitives,
                                   const pointcloud::PointCloud& cloud, const pointcloud::VisibilityMask& visibility,
                                   const std::vector<std::uint8_t>& pixel_admissible,
                                   const geometry::CameraIntrinsics& intr, const LabelSpace& labels);

/// Whitened unary feature channels, each rows×S.
struct UnaryFeatures {
  Matrix pixel_constraint;   // ξ^P
  Matrix pixel_nll;          // -log max(p, floor)
  Matrix point_constraint;   // ξ^L
};

UnaryFeatures unary_features(const PixelField& pixels, const PointField& points, const Whitening& whitening);

/// Unary energies; pixel rows first, then point rows.
struct Unaries {
  Matrix pixel;
  Matrix point;
};

/// φ^P = w1·ξ^P + w2·(-log p), φ^L = -w^L·ξ^L on whitened features.
/// Throws NonFiniteUnary.
Unaries build_unaries(const UnaryFeatures& features, const FrameWeights& weights);
Unaries build_unaries(const PixelField& pixels, const PointField& points, const FrameWeights& weights);

}  // namespace ltr::crf
