#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "ltr/error.hpp"
#include "ltr/io/image.hpp"
#include "ltr/io/ply.hpp"
#include "ltr/io/pose_file.hpp"

using namespace ltr;
using namespace ltr::io;
namespace fs = std::filesystem;

namespace {

fs::path temp_path(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "ltr_io_tests";
  fs::create_directories(dir);
  return dir / name;
}

pointcloud::PointCloud sample_cloud() {
  pointcloud::PointCloud c;
  for (int i = 0; i < 5; ++i) {
    c.positions.emplace_back(0.5 * i, -1.25 * i, 3.0 + i);
    c.colors.push_back({static_cast<std::uint8_t>(10 * i), 200, static_cast<std::uint8_t>(255 - i)});
    c.normals.push_back(geometry::Vec3(i, 1, 2).normalized());
    c.frame_index.push_back(i % 2);
    c.labels.push_back(26000 + i);
    c.confidences.push_back(0.25 * (i % 5));
  }
  return c;
}

void expect_same(const pointcloud::PointCloud& a, const pointcloud::PointCloud& b) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_LT((a.positions[i] - b.positions[i]).norm(), 1e-6);
    EXPECT_EQ(a.colors[i], b.colors[i]);
    EXPECT_LT((a.normals[i] - b.normals[i]).norm(), 1e-6);
    EXPECT_EQ(a.frame_index[i], b.frame_index[i]);
    EXPECT_EQ(a.labels[i], b.labels[i]);
    EXPECT_NEAR(a.confidences[i], b.confidences[i], 1e-7);
  }
}

}  // namespace

TEST(Ply, BinaryRoundTripWithExtra) {
  const auto c = sample_cloud();
  PlyProperty dyn{"dynamic", PlyType::UInt8, {0, 1, 1, 0, 1}};
  const auto path = temp_path("bin.ply").string();
  write_ply(path, c, {dyn});
  const auto back = read_ply(path);
  expect_same(c, back.cloud);
  const auto* d = back.find("dynamic");
  ASSERT_NE(d, nullptr);
  EXPECT_EQ(d->type, PlyType::UInt8);
  EXPECT_EQ(d->values, dyn.values);
}

TEST(Ply, AsciiRoundTrip) {
  const auto c = sample_cloud();
  const auto path = temp_path("ascii.ply").string();
  write_ply(path, c, {}, PlyFormat::Ascii);
  expect_same(c, read_ply(path).cloud);
}

TEST(Ply, PositionsOnly) {
  pointcloud::PointCloud c;
  c.positions.emplace_back(1, 2, 3);
  const auto path = temp_path("xyz.ply").string();
  write_ply(path, c);
  const auto back = read_ply(path).cloud;
  ASSERT_EQ(back.size(), 1u);
  EXPECT_FALSE(back.has_colors());
  EXPECT_FALSE(back.has_labels());
}

TEST(Ply, MissingXyzRejected) {
  const auto path = temp_path("bad.ply").string();
  std::ofstream(path) << "ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\nend_header\n1\n";
  EXPECT_THROW(read_ply(path), FormatError);
  EXPECT_THROW(read_ply(temp_path("does_not_exist.ply").string()), IoError);
}

TEST(Ply, ForeignHeaderWithFaces) {
  const auto path = temp_path("mesh.ply").string();
  std::ofstream(path) << "ply\nformat ascii 1.0\ncomment made elsewhere\nelement vertex 2\n"
                         "property double x\nproperty double y\nproperty double z\nproperty uchar dynamic\n"
                         "element face 0\nproperty list uchar int vertex_indices\nend_header\n"
                         "0 0 0 1\n1 1 1 0\n";
  const auto d = read_ply(path);
  ASSERT_EQ(d.cloud.size(), 2u);
  EXPECT_EQ(d.find("dynamic")->values[0], 1.0);
}

TEST(PoseFile, RoundTrip) {
  std::vector<geometry::Pose> poses = {
      geometry::Pose(geometry::axis_angle(geometry::Vec3(1, 2, 3).normalized(), 0.7), geometry::Vec3(1, -2, 3), 4),
      geometry::Pose(geometry::Mat3::Identity(), geometry::Vec3(0.1, 0.2, 0.3), 9)};
  const auto path = temp_path("poses.txt").string();
  write_poses(path, poses);
  const auto back = read_poses(path);
  ASSERT_EQ(back.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(back[i].frame_index(), poses[i].frame_index());
    EXPECT_EQ(back[i].rotation(), poses[i].rotation());
    EXPECT_EQ(back[i].translation(), poses[i].translation());
  }
}

TEST(PoseFile, ShortLineRejected) {
  const auto path = temp_path("bad_poses.txt").string();
  std::ofstream(path) << "0 1 0 0 0 0 1 0\n";
  EXPECT_THROW(read_poses(path), FormatError);
}

TEST(Png, Gray16RoundTrip) {
  Image16 img{7, 3, {}};
  for (int i = 0; i < 21; ++i) img.data.push_back(static_cast<std::uint16_t>(i * 3121));
  const auto path = temp_path("g16.png").string();
  write_png16(path, img);
  const auto back = read_png16(path);
  EXPECT_EQ(back.width, 7);
  EXPECT_EQ(back.height, 3);
  EXPECT_EQ(back.data, img.data);
}

TEST(Png, RgbRoundTrip) {
  ImageRgb8 img{4, 2, {}};
  for (int i = 0; i < 24; ++i) img.data.push_back(static_cast<std::uint8_t>(i * 10));
  const auto path = temp_path("rgb.png").string();
  write_png_rgb(path, img);
  EXPECT_EQ(read_png_rgb(path).data, img.data);
  EXPECT_THROW(read_png16(path), FormatError);
}

TEST(ProbabilityMap, RoundTripAndHeader) {
  ProbabilityMap m{2, 3, 4, {}};
  for (int i = 0; i < 24; ++i) m.values.push_back(0.01f * i);
  const auto path = temp_path("p.prb").string();
  write_probability_map(path, m);
  EXPECT_EQ(fs::file_size(path), 16u + 24u * 4u);
  const auto back = read_probability_map(path);
  EXPECT_EQ(back.height, 2);
  EXPECT_EQ(back.width, 3);
  EXPECT_EQ(back.labels, 4);
  EXPECT_EQ(back.values, m.values);
  EXPECT_FLOAT_EQ(back.at(2, 1, 3), m.values[(1 * 3 + 2) * 4 + 3]);
}

TEST(ProbabilityMap, BadMagic) {
  const auto path = temp_path("bad.prb").string();
  std::ofstream(path, std::ios::binary) << "PRB2xxxxxxxxxxxx";
  EXPECT_THROW(read_probability_map(path), FormatError);
}
