#pragma once

#include <string>
#include <vector>

#include "ltr/geometry/pose.hpp"

namespace ltr::io {

/// Lines of `frame r00 r01 r02 t0 r10 r11 r12 t1 r20 r21 r22 t2`.
/// Returned poses carry their frame index. Throws IoError / FormatError / InvalidPose.
std::vector<geometry::Pose> read_poses(const std::string& path);
void write_poses(const std::string& path, const std::vector<geometry::Pose>& poses);

}  // namespace ltr::io
