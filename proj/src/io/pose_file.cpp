#include "ltr/io/pose_file.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "ltr/error.hpp"

namespace ltr::io {

std::vector<geometry::Pose> read_poses(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<geometry::Pose> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    std::istringstream ls(line);
    int frame = 0;
    double v[12];
    ls >> frame;
    for (double& x : v) ls >> x;
    if (!ls) throw FormatError(path + ":" + std::to_string(line_no) + ": expected 13 numbers");
    geometry::Mat3 R;
    geometry::Vec3 t;
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) R(r, c) = v[4 * r + c];
      t(r) = v[4 * r + 3];
    }
    out.emplace_back(R, t, frame);
  }
  return out;
}

void write_poses(const std::string& path, const std::vector<geometry::Pose>& poses) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  char buf[64];
  for (std::size_t i = 0; i < poses.size(); ++i) {
    const auto& p = poses[i];
    out << p.frame_index().value_or(static_cast<int>(i));
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 4; ++c) {
        const double x = c < 3 ? p.rotation()(r, c) : p.translation()(r);
        std::snprintf(buf, sizeof buf, " %.17g", x);
        out << buf;
      }
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace ltr::io
