#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "ltr/crf/weights.hpp"
#include "ltr/geometry/primitive.hpp"

namespace ltr::io {

using Json = nlohmann::ordered_json;

/// Throws IoError when the file cannot be opened, FormatError on bad JSON.
Json read_json(const std::string& path);
/// Two-space indented, trailing newline.
void write_json(const std::string& path, const Json& j);

/// {t: [3], q: [4, wxyz]}
Json pose_to_json(const geometry::Pose& pose);
geometry::Pose pose_from_json(const Json& j);

/// Primitive list as an array of {id, class, instance_id, shape, pose,
/// half_extents | semi_axes | polygon: {vertices, thickness[, heights]},
/// dynamic, dynamic_poses: [{timestamp, t, q}]}. Every primitive is validated.
/// Throws FormatError / InvalidPrimitive.
std::vector<geometry::BoundingPrimitive> primitives_from_json(const Json& j);
Json primitives_to_json(const std::vector<geometry::BoundingPrimitive>& primitives);
std::vector<geometry::BoundingPrimitive> read_primitives(const std::string& path);
void write_primitives(const std::string& path, const std::vector<geometry::BoundingPrimitive>& primitives);

Json timed_poses_to_json(const std::vector<geometry::TimedPose>& poses);
std::vector<geometry::TimedPose> timed_poses_from_json(const Json& j);

Json classes_to_json(const crf::ClassSet& classes);
crf::ClassSet classes_from_json(const Json& j, int sky_id);

Json widths_to_json(const crf::KernelWidths& w);
/// Missing keys keep the defaults.
crf::KernelWidths widths_from_json(const Json& j);

/// Model weights with a schema version. Compatibilities are either
/// {intra, inter} or {matrix: [[...]]}.
Json weights_to_json(const crf::ModelWeights& w);
crf::ModelWeights weights_from_json(const Json& j);
crf::ModelWeights read_weights(const std::string& path);
void write_weights(const std::string& path, const crf::ModelWeights& w);

}  // namespace ltr::io
