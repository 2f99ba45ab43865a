#include "ltr/metrics/semantic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "ltr/error.hpp"

namespace ltr::metrics {

void WeightedConfusion::add(int gt, int pred, double weight) {
  if (weight == 0.0) return;
  cells_[{gt, pred}] += weight;
  gt_mass_[gt] += weight;
  pred_mass_[pred] += weight;
  total_ += weight;
  if (gt == pred) correct_ += weight;
}

WeightedConfusion WeightedConfusion::from_maps(std::span<const int> gt, std::span<const int> pred,
                                               std::span<const double> conf, int ignore) {
  if (gt.size() != pred.size() || (!conf.empty() && conf.size() != gt.size()))
    throw ShapeMismatch("label and confidence maps differ in size");
  WeightedConfusion c;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (gt[i] == ignore) continue;
    const double w = conf.empty() ? 1.0 : conf[i];
    if (!(w >= 0.0 && w <= 1.0)) throw InvalidArgument("confidence outside [0, 1]");
    c.add(gt[i], pred[i], w);
  }
  return c;
}

double WeightedConfusion::mass(int gt, int pred) const {
  const auto it = cells_.find({gt, pred});
  return it == cells_.end() ? 0.0 : it->second;
}

double WeightedConfusion::gt_mass(int c) const {
  const auto it = gt_mass_.find(c);
  return it == gt_mass_.end() ? 0.0 : it->second;
}

std::optional<double> WeightedConfusion::iou(int c) const {
  const double tp = mass(c, c);
  const auto pm = pred_mass_.find(c);
  const double uni = gt_mass(c) + (pm == pred_mass_.end() ? 0.0 : pm->second) - tp;
  if (!(uni > 0.0)) return std::nullopt;
  return tp / uni;
}

std::vector<int> WeightedConfusion::gt_classes() const {
  std::vector<int> out;
  for (const auto& [c, m] : gt_mass_)
    if (m > 0.0) out.push_back(c);
  return out;
}

std::optional<double> weighted_iou(std::span<const int> gt, std::span<const int> pred, std::span<const double> conf,
                                   int c) {
  return WeightedConfusion::from_maps(gt, pred, conf).iou(c);
}

SemanticScores evaluate_semantic(const WeightedConfusion& confusion, std::span<const int> classes) {
  SemanticScores s;
  const std::set<int> wanted(classes.begin(), classes.end());
  for (int c : confusion.gt_classes()) {
    if (!wanted.empty() && !wanted.count(c)) continue;
    if (const auto v = confusion.iou(c)) s.per_class[c] = *v;
  }
  double sum = 0.0;
  for (const auto& [c, v] : s.per_class) sum += v;
  s.miou = s.per_class.empty() ? 0.0 : sum / static_cast<double>(s.per_class.size());
  s.weight = confusion.total();
  s.accuracy = s.weight > 0.0 ? confusion.correct() / s.weight : 0.0;
  return s;
}

SemanticScores evaluate_semantic(std::span<const int> gt, std::span<const int> pred, std::span<const double> conf,
                                 std::span<const int> classes, int ignore) {
  return evaluate_semantic(WeightedConfusion::from_maps(gt, pred, conf, ignore), classes);
}

double miou(std::span<const int> gt, std::span<const int> pred, std::span<const double> conf,
            std::span<const int> classes) {
  return evaluate_semantic(gt, pred, conf, classes).miou;
}

double pixel_accuracy(std::span<const int> gt, std::span<const int> pred, std::span<const double> conf) {
  return evaluate_semantic(gt, pred, conf).accuracy;
}

SemanticScores confidence_filtered_eval(std::span<const int> gt, std::span<const int> pred,
                                        std::span<const double> confidence, double density,
                                        std::span<const int> classes, int ignore) {
  if (gt.size() != pred.size() || confidence.size() != gt.size())
    throw ShapeMismatch("label and confidence maps differ in size");
  if (!(density > 0.0 && density <= 1.0)) throw InvalidArgument("density must be in (0, 1]");
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < gt.size(); ++i)
    if (gt[i] != ignore) order.push_back(i);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return confidence[a] > confidence[b]; });
  const auto keep = static_cast<std::size_t>(std::ceil(density * static_cast<double>(order.size()) - 1e-9));
  WeightedConfusion c;
  for (std::size_t k = 0; k < std::min(keep, order.size()); ++k) c.add(gt[order[k]], pred[order[k]], 1.0);
  return evaluate_semantic(c, classes);
}

}  // namespace ltr::metrics
