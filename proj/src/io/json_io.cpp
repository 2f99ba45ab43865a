#include "ltr/io/json_io.hpp"

#include <fstream>

#include "ltr/error.hpp"

namespace ltr::io {

using geometry::BoundingPrimitive;
using geometry::Pose;
using geometry::ShapeKind;
using geometry::Vec2;
using geometry::Vec3;

namespace {

constexpr int kWeightsSchema = 1;

const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) throw FormatError("expected a JSON object");
  auto it = j.find(key);
  if (it == j.end()) throw FormatError(std::string("missing field '") + key + "'");
  return *it;
}

template <class T>
T as(const Json& j, const char* what) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw FormatError(std::string("field '") + what + "' has the wrong type");
  }
}

template <int N>
Eigen::Matrix<double, N, 1> vec(const Json& j, const char* what) {
  if (!j.is_array() || j.size() != N) throw FormatError(std::string("field '") + what + "' needs " +
                                                        std::to_string(N) + " numbers");
  Eigen::Matrix<double, N, 1> v;
  for (int i = 0; i < N; ++i) v[i] = as<double>(j[i], what);
  return v;
}

Json vec_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Eigen::VectorXd vec_dyn(const Json& j, const char* what) {
  if (!j.is_array()) throw FormatError(std::string("field '") + what + "' must be an array");
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = as<double>(j[i], what);
  return v;
}

BoundingPrimitive primitive_from_json(const Json& j) {
  BoundingPrimitive b;
  b.id = as<int>(field(j, "id"), "id");
  b.semantic_class = as<int>(field(j, "class"), "class");
  b.instance_id = j.contains("instance_id") ? as<int>(j["instance_id"], "instance_id") : 0;
  const std::string shape = as<std::string>(field(j, "shape"), "shape");
  try {
    b.shape = geometry::shape_from_string(shape == "polygon" ? "ground_polygon" : shape);
  } catch (const Error&) {
    throw FormatError("unknown shape '" + shape + "'");
  }
  b.pose = j.contains("pose") ? pose_from_json(j["pose"]) : Pose();
  switch (b.shape) {
    case ShapeKind::Cuboid: b.extents = vec<3>(field(j, "half_extents"), "half_extents"); break;
    case ShapeKind::Ellipsoid: b.extents = vec<3>(field(j, "semi_axes"), "semi_axes"); break;
    case ShapeKind::GroundPolygon: {
      const Json& p = field(j, "polygon");
      const Json& verts = field(p, "vertices");
      if (!verts.is_array()) throw FormatError("polygon vertices must be an array");
      for (const Json& v : verts) b.polygon.vertices.push_back(vec<2>(v, "vertices"));
      if (p.contains("heights")) {
        b.polygon.heights = as<std::vector<double>>(p["heights"], "heights");
      } else {
        b.polygon.heights.assign(b.polygon.vertices.size(), 0.0);
      }
      b.polygon.thickness = as<double>(field(p, "thickness"), "thickness");
      break;
    }
  }
  b.dynamic = j.contains("dynamic") && as<bool>(j["dynamic"], "dynamic");
  if (j.contains("dynamic_poses")) b.dynamic_poses = timed_poses_from_json(j["dynamic_poses"]);
  b.validate();
  return b;
}

Json compat_to_json(const crf::Compatibility& c) {
  if (!c.full) return Json{{"intra", c.intra}, {"inter", c.inter}};
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < c.full->rows(); ++r) rows.push_back(vec_json(c.full->row(r).transpose()));
  return Json{{"matrix", rows}};
}

crf::Compatibility compat_from_json(const Json& j) {
  crf::Compatibility c;
  if (j.contains("matrix")) {
    const Json& rows = j["matrix"];
    if (!rows.is_array() || rows.empty()) throw FormatError("compatibility matrix must be a non-empty array");
    const auto n = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
      const Eigen::VectorXd row = vec_dyn(rows[static_cast<std::size_t>(r)], "matrix");
      if (row.size() != n) throw FormatError("compatibility matrix must be square");
      m.row(r) = row.transpose();
    }
    c.full = m;
  } else {
    c.intra = as<double>(field(j, "intra"), "intra");
    c.inter = as<double>(field(j, "inter"), "inter");
  }
  return c;
}

}  // namespace

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(path + ": " + e.what());
  }
}

void write_json(const std::string& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

Json pose_to_json(const Pose& pose) {
  const Vec3& t = pose.translation();
  const Eigen::Vector4d q = pose.quaternion();
  return Json{{"t", {t.x(), t.y(), t.z()}}, {"q", {q[0], q[1], q[2], q[3]}}};
}

Pose pose_from_json(const Json& j) {
  const Vec3 t = j.contains("t") ? Vec3(vec<3>(j["t"], "t")) : Vec3::Zero();
  if (!j.contains("q")) return Pose::from_translation(t);
  const Eigen::Vector4d q = vec<4>(j["q"], "q");
  if (!(q.norm() > 1e-12)) throw FormatError("quaternion has zero norm");
  return Pose::from_quaternion(q, t);
}

Json timed_poses_to_json(const std::vector<geometry::TimedPose>& poses) {
  Json a = Json::array();
  for (const auto& tp : poses) {
    Json p = pose_to_json(tp.pose);
    Json o{{"timestamp", tp.timestamp}};
    o["t"] = p["t"];
    o["q"] = p["q"];
    a.push_back(std::move(o));
  }
  return a;
}

std::vector<geometry::TimedPose> timed_poses_from_json(const Json& j) {
  if (!j.is_array()) throw FormatError("pose list must be an array");
  std::vector<geometry::TimedPose> out;
  for (const Json& e : j) out.push_back({as<double>(field(e, "timestamp"), "timestamp"), pose_from_json(e)});
  return out;
}

std::vector<BoundingPrimitive> primitives_from_json(const Json& j) {
  if (!j.is_array()) throw FormatError("primitive file must hold an array");
  std::vector<BoundingPrimitive> out;
  out.reserve(j.size());
  for (const Json& e : j) out.push_back(primitive_from_json(e));
  return out;
}

Json primitives_to_json(const std::vector<BoundingPrimitive>& primitives) {
  Json a = Json::array();
  for (const BoundingPrimitive& b : primitives) {
    Json o{{"id", b.id},
           {"class", b.semantic_class},
           {"instance_id", b.instance_id},
           {"shape", geometry::to_string(b.shape)},
           {"pose", pose_to_json(b.pose)}};
    switch (b.shape) {
      case ShapeKind::Cuboid: o["half_extents"] = vec_json(b.extents); break;
      case ShapeKind::Ellipsoid: o["semi_axes"] = vec_json(b.extents); break;
      case ShapeKind::GroundPolygon: {
        Json verts = Json::array();
        for (const Vec2& v : b.polygon.vertices) verts.push_back({v.x(), v.y()});
        o["polygon"] = Json{{"vertices", verts}, {"heights", b.polygon.heights}, {"thickness", b.polygon.thickness}};
        break;
      }
    }
    o["dynamic"] = b.dynamic;
    o["dynamic_poses"] = timed_poses_to_json(b.dynamic_poses);
    a.push_back(std::move(o));
  }
  return a;
}

std::vector<BoundingPrimitive> read_primitives(const std::string& path) {
  return primitives_from_json(read_json(path));
}

void write_primitives(const std::string& path, const std::vector<BoundingPrimitive>& primitives) {
  write_json(path, primitives_to_json(primitives));
}

Json classes_to_json(const crf::ClassSet& classes) {
  Json a = Json::array();
  for (const auto& c : classes.classes)
    a.push_back(Json{{"id", c.id}, {"name", c.name}, {"has_instances", c.has_instances}});
  return a;
}

crf::ClassSet classes_from_json(const Json& j, int sky_id) {
  if (!j.is_array()) throw FormatError("classes must be an array");
  crf::ClassSet set;
  set.sky_id = sky_id;
  for (const Json& e : j) {
    crf::ClassInfo c;
    c.id = as<int>(field(e, "id"), "id");
    c.name = e.contains("name") ? as<std::string>(e["name"], "name") : std::to_string(c.id);
    c.has_instances = e.contains("has_instances") && as<bool>(e["has_instances"], "has_instances");
    set.classes.push_back(std::move(c));
  }
  try {
    set.validate();
  } catch (const InvalidArgument& e) {
    throw FormatError(e.what());
  }
  return set;
}

Json widths_to_json(const crf::KernelWidths& w) {
  return Json{{"smooth_position", w.smooth_position},   {"appearance_position", w.appearance_position},
              {"appearance_color", w.appearance_color}, {"point_position", w.point_position},
              {"point_normal", w.point_normal},         {"cross_position", w.cross_position}};
}

crf::KernelWidths widths_from_json(const Json& j) {
  crf::KernelWidths w;
  auto read = [&](const char* key, double& v) {
    if (j.contains(key)) v = as<double>(j[key], key);
  };
  read("smooth_position", w.smooth_position);
  read("appearance_position", w.appearance_position);
  read("appearance_color", w.appearance_color);
  read("point_position", w.point_position);
  read("point_normal", w.point_normal);
  read("cross_position", w.cross_position);
  return w;
}

Json weights_to_json(const crf::ModelWeights& w) {
  Json compat = Json::object();
  for (int k = 0; k < crf::kKernelCount; ++k)
    compat[crf::to_string(static_cast<crf::Kernel>(k))] = compat_to_json(w.compat[static_cast<std::size_t>(k)]);
  return Json{{"schema_version", kWeightsSchema},
              {"sky_id", w.classes.sky_id},
              {"classes", classes_to_json(w.classes)},
              {"pixel_constraint", vec_json(w.pixel_constraint)},
              {"pixel_probability", vec_json(w.pixel_probability)},
              {"point_constraint", vec_json(w.point_constraint)},
              {"compat", compat},
              {"widths", widths_to_json(w.widths)},
              {"whitening", Json{{"mean", w.whitening.mean}, {"stddev", w.whitening.stddev}}},
              {"lambda", w.lambda}};
}

crf::ModelWeights weights_from_json(const Json& j) {
  const int version = as<int>(field(j, "schema_version"), "schema_version");
  if (version != kWeightsSchema) throw FormatError("unsupported weights schema " + std::to_string(version));
  crf::ModelWeights w;
  w.classes = classes_from_json(field(j, "classes"), as<int>(field(j, "sky_id"), "sky_id"));
  w.pixel_constraint = vec_dyn(field(j, "pixel_constraint"), "pixel_constraint");
  w.pixel_probability = vec_dyn(field(j, "pixel_probability"), "pixel_probability");
  w.point_constraint = vec_dyn(field(j, "point_constraint"), "point_constraint");
  const Json& compat = field(j, "compat");
  for (int k = 0; k < crf::kKernelCount; ++k) {
    const std::string name = crf::to_string(static_cast<crf::Kernel>(k));
    w.compat[static_cast<std::size_t>(k)] = compat_from_json(field(compat, name.c_str()));
  }
  if (j.contains("widths")) w.widths = widths_from_json(j["widths"]);
  if (j.contains("whitening")) {
    const Json& wh = j["whitening"];
    w.whitening.mean = as<std::array<double, 3>>(field(wh, "mean"), "mean");
    w.whitening.stddev = as<std::array<double, 3>>(field(wh, "stddev"), "stddev");
  }
  w.lambda = j.contains("lambda") ? as<double>(j["lambda"], "lambda") : 0.0;
  try {
    w.validate();
  } catch (const InvalidArgument& e) {
    throw FormatError(e.what());
  }
  return w;
}

crf::ModelWeights read_weights(const std::string& path) { return weights_from_json(read_json(path)); }

void write_weights(const std::string& path, const crf::ModelWeights& w) { write_json(path, weights_to_json(w)); }

}  // namespace ltr::io
