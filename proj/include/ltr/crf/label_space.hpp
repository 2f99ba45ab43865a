#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ltr/geometry/primitive.hpp"

namespace ltr::crf {

struct ClassInfo {
  int id = 0;
  std::string name;
  bool has_instances = false;
};

/// The semantic classes known to a model. Weights are indexed by position
/// in `classes`.
struct ClassSet {
  std::vector<ClassInfo> classes;
  int sky_id = 23;

  int size() const { return static_cast<int>(classes.size()); }
  /// Position of semantic id `id`, or -1.
  int index_of(int id) const;
  /// Throws InvalidArgument on duplicate ids or a missing sky class.
  void validate() const;

  /// road, sidewalk, building, vegetation, car, sky (Cityscapes ids).
  static ClassSet street_default();
};

enum class LabelMode { Semantic, Instance };

std::string to_string(LabelMode mode);
LabelMode label_mode_from_string(const std::string& name);

struct Label {
  int semantic_class = 0;
  int instance_id = 0;  // 0 for stuff
  int class_index = 0;  // position in the ClassSet
  std::string name;
};

/// Labels of one frame. Semantic mode has one label per class. Instance mode
/// has one label per stuff class plus one per (class, instance) of the
/// instance-class primitives present in the frame.
class LabelSpace {
 public:
  static LabelSpace semantic(const ClassSet& classes);
  static LabelSpace instance(const ClassSet& classes, const std::vector<geometry::BoundingPrimitive>& primitives);

  LabelMode mode() const { return mode_; }
  int size() const { return static_cast<int>(labels_.size()); }
  const Label& operator[](int s) const { return labels_[s]; }
  const std::vector<Label>& labels() const { return labels_; }
  int sky() const { return sky_; }
  int class_count() const { return class_count_; }

  /// Label carrying primitive `b`'s annotation, or -1 when its class is unknown.
  int label_of(const geometry::BoundingPrimitive& b) const;
  std::optional<int> find(int semantic_class, int instance_id) const;

  /// semantic·1000 + instance, the label-map wire encoding.
  int encode(int s) const { return labels_[s].semantic_class * 1000 + labels_[s].instance_id; }

 private:
  LabelMode mode_ = LabelMode::Semantic;
  std::vector<Label> labels_;
  int sky_ = 0;
  int class_count_ = 0;
};

}  // namespace ltr::crf
