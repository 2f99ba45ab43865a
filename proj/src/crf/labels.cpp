#include "ltr/crf/labels.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "ltr/error.hpp"

namespace ltr::crf {

int argmax_label(const Eigen::Ref<const Eigen::RowVectorXd>& q) {
  int best = 0;
  for (int s = 1; s < q.size(); ++s)
    if (q[s] > q[best]) best = s;
  return best;
}

double entropy_confidence(const Eigen::Ref<const Eigen::RowVectorXd>& q) {
  if (q.size() < 2) return 1.0;
  double h = 0.0;
  for (int s = 0; s < q.size(); ++s)
    if (q[s] > 0.0) h -= q[s] * std::log(q[s]);
  return std::clamp(1.0 - h / std::log(static_cast<double>(q.size())), 0.0, 1.0);
}

LabelResult extract_labels_confidence(const MarginalField& field) {
  LabelResult r;
  r.width = field.width;
  r.height = field.height;
  const int p = field.pixel_count();
  for (int i = 0; i < field.q.rows(); ++i) {
    const Eigen::RowVectorXd row = field.q.row(i);
    const int label = argmax_label(row);
    const double conf = entropy_confidence(row);
    if (i < p) {
      r.pixel_labels.push_back(label);
      r.pixel_confidence.push_back(conf);
    } else {
      r.point_labels.push_back(label);
      r.point_confidence.push_back(conf);
    }
  }
  return r;
}

int encode_primitive(const geometry::BoundingPrimitive& b, LabelMode mode, const ClassSet& classes) {
  const int idx = classes.index_of(b.semantic_class);
  const bool instanced = mode == LabelMode::Instance && idx >= 0 && classes.classes[idx].has_instances;
  return b.semantic_class * 1000 + (instanced ? b.instance_id : 0);
}

FusedLabels fuse_point_labels(const pointcloud::PointCloud& cloud, const std::vector<PointVote>& votes,
                              const std::vector<geometry::BoundingPrimitive>& primitives, LabelMode mode,
                              const ClassSet& classes) {
  const std::size_t n = cloud.size();
  std::vector<std::map<int, std::pair<int, double>>> tally(n);  // label -> (count, confidence sum)
  for (const auto& v : votes) {
    if (v.point >= n) throw InvalidArgument("vote references point " + std::to_string(v.point));
    auto& t = tally[v.point][v.label];
    ++t.first;
    t.second += v.confidence;
  }
  FusedLabels out;
  out.labels.assign(n, kUnknownLabel);
  out.confidences.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!tally[i].empty()) {
      // std::map iterates in ascending label order, so strict > keeps the lowest tie.
      int best = 0, best_count = 0;
      double best_sum = 0.0;
      for (const auto& [label, cs] : tally[i])
        if (cs.first > best_count) {
          best = label;
          best_count = cs.first;
          best_sum = cs.second;
        }
      out.labels[i] = best;
      out.confidences[i] = best_sum / best_count;
      continue;
    }
    std::set<int> cls, enc;
    for (const auto& b : primitives) {
      if (b.dynamic) continue;
      if (!geometry::point_in_primitive(b, cloud.positions[i])) continue;
      cls.insert(b.semantic_class);
      enc.insert(encode_primitive(b, mode, classes));
    }
    if (cls.size() != 1) continue;
    out.labels[i] = enc.size() == 1 ? *enc.begin() : *cls.begin() * 1000;
    out.confidences[i] = 1.0;
  }
  return out;
}

std::vector<std::optional<int>> match_hypotheses(const std::vector<InstanceHypothesis>& hypotheses,
                                                 const PointField& points, const LabelSpace& labels, int width,
                                                 int height) {
  const int s_count = labels.size();
  std::vector<std::optional<int>> match(s_count);
  for (std::size_t h = 0; h < hypotheses.size(); ++h) {
    const auto& hyp = hypotheses[h];
    if (hyp.probability.size() != static_cast<std::size_t>(width) * height)
      throw InvalidArgument("instance hypothesis does not match the image size");
    int best = -1;
    double best_share = 0.5;
    for (int s = 0; s < s_count; ++s) {
      if (labels[s].semantic_class != hyp.semantic_class || labels[s].instance_id == 0 || match[s]) continue;
      int total = 0, inside = 0;
      for (int l = 0; l < points.size(); ++l) {
        if (points.is_virtual[l] || !points.admissible[static_cast<std::size_t>(l) * s_count + s]) continue;
        const Vec2& pi = points.projections[l];
        const int x = std::clamp(static_cast<int>(std::floor(pi.x())), 0, width - 1);
        const int y = std::clamp(static_cast<int>(std::floor(pi.y())), 0, height - 1);
        ++total;
        if (hyp.probability[static_cast<std::size_t>(y) * width + x] >= 0.5) ++inside;
      }
      if (total == 0) continue;
      const double share = static_cast<double>(inside) / total;
      if (share >= best_share && (best < 0 || share > best_share)) {
        best = s;
        best_share = share;
      }
    }
    if (best >= 0) match[best] = static_cast<int>(h);
  }
  return match;
}

std::vector<double> instance_probabilities(const std::vector<double>& class_probabilities, const LabelSpace& labels,
                                           const std::vector<InstanceHypothesis>& hypotheses,
                                           const std::vector<std::optional<int>>& matches, int pixel_count) {
  const int c = labels.class_count();
  const int s_count = labels.size();
  if (class_probabilities.size() != static_cast<std::size_t>(pixel_count) * c)
    throw InvalidArgument("class probabilities do not match pixels×classes");
  if (static_cast<int>(matches.size()) != s_count) throw InvalidArgument("one match slot per label expected");
  std::vector<double> out(static_cast<std::size_t>(pixel_count) * s_count, 0.0);
  std::vector<double> claimed(c);
  for (int i = 0; i < pixel_count; ++i) {
    std::fill(claimed.begin(), claimed.end(), 0.0);
    for (int s = 0; s < s_count; ++s)
      if (matches[s]) claimed[labels[s].class_index] += hypotheses[*matches[s]].probability[i];
    double z = 0.0;
    for (int s = 0; s < s_count; ++s) {
      const int k = labels[s].class_index;
      const double base = class_probabilities[static_cast<std::size_t>(i) * c + k];
      double scale = 1.0;
      if (matches[s]) scale = hypotheses[*matches[s]].probability[i];
      else if (labels[s].instance_id != 0) scale = std::max(0.0, 1.0 - claimed[k]);
      const double v = base * scale;
      out[static_cast<std::size_t>(i) * s_count + s] = v;
      z += v;
    }
    for (int s = 0; s < s_count; ++s) {
      double& v = out[static_cast<std::size_t>(i) * s_count + s];
      v = z > 0.0 ? v / z : 1.0 / s_count;
    }
  }
  return out;
}

}  // namespace ltr::crf
