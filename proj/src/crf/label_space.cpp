#include "ltr/crf/label_space.hpp"

#include <algorithm>
#include <set>

#include "ltr/error.hpp"

namespace ltr::crf {

int ClassSet::index_of(int id) const {
  for (int i = 0; i < size(); ++i)
    if (classes[i].id == id) return i;
  return -1;
}

void ClassSet::validate() const {
  std::set<int> seen;
  for (const auto& c : classes)
    if (!seen.insert(c.id).second) throw InvalidArgument("duplicate class id " + std::to_string(c.id));
  if (index_of(sky_id) < 0) throw InvalidArgument("class set lacks the sky class");
  if (size() < 2) throw InvalidArgument("class set needs at least two classes");
}

ClassSet ClassSet::street_default() {
  ClassSet c;
  c.classes = {{7, "road", false},        {8, "sidewalk", false}, {11, "building", true},
               {21, "vegetation", false}, {26, "car", true},      {23, "sky", false}};
  c.sky_id = 23;
  return c;
}

std::string to_string(LabelMode mode) { return mode == LabelMode::Semantic ? "semantic" : "instance"; }

LabelMode label_mode_from_string(const std::string& name) {
  if (name == "semantic") return LabelMode::Semantic;
  if (name == "instance") return LabelMode::Instance;
  throw InvalidArgument("unknown label mode '" + name + "'");
}

LabelSpace LabelSpace::semantic(const ClassSet& classes) {
  classes.validate();
  LabelSpace ls;
  ls.mode_ = LabelMode::Semantic;
  ls.class_count_ = classes.size();
  for (int i = 0; i < classes.size(); ++i) ls.labels_.push_back({classes.classes[i].id, 0, i, classes.classes[i].name});
  ls.sky_ = classes.index_of(classes.sky_id);
  return ls;
}

LabelSpace LabelSpace::instance(const ClassSet& classes, const std::vector<geometry::BoundingPrimitive>& primitives) {
  classes.validate();
  LabelSpace ls;
  ls.mode_ = LabelMode::Instance;
  ls.class_count_ = classes.size();
  for (int i = 0; i < classes.size(); ++i) {
    const ClassInfo& c = classes.classes[i];
    if (!c.has_instances || c.id == classes.sky_id) {
      ls.labels_.push_back({c.id, 0, i, c.name});
      continue;
    }
    std::set<int> ids;
    for (const auto& b : primitives)
      if (b.semantic_class == c.id) ids.insert(b.instance_id);
    for (int id : ids) ls.labels_.push_back({c.id, id, i, c.name + ":" + std::to_string(id)});
  }
  ls.sky_ = *ls.find(classes.sky_id, 0);
  if (ls.size() < 2) throw InvalidArgument("label space needs at least two labels");
  return ls;
}

std::optional<int> LabelSpace::find(int semantic_class, int instance_id) const {
  for (int s = 0; s < size(); ++s)
    if (labels_[s].semantic_class == semantic_class && labels_[s].instance_id == instance_id) return s;
  return std::nullopt;
}

int LabelSpace::label_of(const geometry::BoundingPrimitive& b) const {
  if (mode_ == LabelMode::Semantic) return find(b.semantic_class, 0).value_or(-1);
  if (auto s = find(b.semantic_class, b.instance_id)) return *s;
  // Stuff classes carry a single label regardless of the annotated id.
  return find(b.semantic_class, 0).value_or(-1);
}

}  // namespace ltr::crf
