#include "ltr/metrics/instance.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include "ltr/error.hpp"

namespace ltr::metrics {

namespace {

struct Overlaps {
  std::map<int, double> gt_mass, pred_mass;
  std::map<std::pair<int, int>, double> inter;
};

Overlaps overlaps(std::span<const int> gt, std::span<const int> pred, std::span<const double> conf) {
  if (gt.size() != pred.size() || (!conf.empty() && conf.size() != gt.size()))
    throw ShapeMismatch("instance and confidence maps differ in size");
  Overlaps o;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (gt[i] == kIgnore) continue;
    const double w = conf.empty() ? 1.0 : conf[i];
    if (is_instance(gt[i])) o.gt_mass[gt[i]] += w;
    if (is_instance(pred[i])) o.pred_mass[pred[i]] += w;
    if (is_instance(gt[i]) && is_instance(pred[i]) && semantic_of(gt[i]) == semantic_of(pred[i]))
      o.inter[{gt[i], pred[i]}] += w;
  }
  return o;
}

std::map<std::pair<int, int>, double> pair_ious(const Overlaps& o) {
  std::map<std::pair<int, int>, double> out;
  for (const auto& [key, in] : o.inter) {
    const double uni = o.gt_mass.at(key.first) + o.pred_mass.at(key.second) - in;
    if (uni > 0.0 && in > 0.0) out[key] = in / uni;
  }
  return out;
}

// Minimum-cost assignment of every row of an n×m cost matrix (n <= m).
std::vector<int> hungarian(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  const int m = n ? static_cast<int>(cost[0].size()) : 0;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1), v(m + 1);
  std::vector<int> p(m + 1), way(m + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<char> used(m + 1, false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= m; ++j)
    if (p[j]) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

}  // namespace

InstanceMatchResult match_instances(std::span<const int> gt, std::span<const int> pred, std::span<const double> conf,
                                    Matching matching) {
  const Overlaps o = overlaps(gt, pred, conf);
  InstanceMatchResult r;
  r.pair_iou = pair_ious(o);
  if (matching == Matching::Greedy) {
    std::vector<std::pair<std::pair<int, int>, double>> pairs(r.pair_iou.begin(), r.pair_iou.end());
    std::stable_sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    std::set<int> used_pred;
    for (const auto& [key, iou] : pairs) {
      if (r.assignment.count(key.first) || used_pred.count(key.second)) continue;
      r.assignment[key.first] = key.second;
      used_pred.insert(key.second);
    }
    return r;
  }

  std::vector<int> gts, preds;
  for (const auto& [g, m] : o.gt_mass) gts.push_back(g);
  for (const auto& [p, m] : o.pred_mass) preds.push_back(p);
  if (gts.empty() || preds.empty()) return r;
  const std::size_t size = std::max(gts.size(), preds.size());
  std::vector<std::vector<double>> cost(size, std::vector<double>(size, 0.0));
  for (std::size_t a = 0; a < gts.size(); ++a)
    for (std::size_t b = 0; b < preds.size(); ++b) {
      const auto it = r.pair_iou.find({gts[a], preds[b]});
      if (it != r.pair_iou.end()) cost[a][b] = -it->second;
    }
  const std::vector<int> col = hungarian(cost);
  for (std::size_t a = 0; a < gts.size(); ++a) {
    const int b = col[a];
    if (b < 0 || b >= static_cast<int>(preds.size())) continue;
    if (r.pair_iou.count({gts[a], preds[b]})) r.assignment[gts[a]] = preds[b];
  }
  return r;
}

InstanceScores instance_miou(std::span<const int> gt, std::span<const int> pred, std::span<const double> conf,
                             Matching matching) {
  InstanceScores s;
  s.match = match_instances(gt, pred, conf, matching);
  std::map<int, int> relabel;
  for (const auto& [g, p] : s.match.assignment) relabel[p] = g;
  WeightedConfusion c;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (gt[i] == kIgnore) continue;
    int p = pred[i];
    if (is_instance(p)) {
      const auto it = relabel.find(p);
      p = it != relabel.end() ? it->second : -2 - p;  // unmatched: a code no gt carries
    }
    c.add(gt[i], p, conf.empty() ? 1.0 : conf[i]);
  }
  for (int g : c.gt_classes())
    if (is_instance(g)) s.per_instance[g] = c.iou(g).value_or(0.0);
  double sum = 0.0;
  for (const auto& [g, v] : s.per_instance) sum += v;
  s.miou = s.per_instance.empty() ? 0.0 : sum / static_cast<double>(s.per_instance.size());
  return s;
}

double integrate_pr(const std::vector<double>& precision, const std::vector<double>& recall,
                    ApIntegration integration) {
  if (precision.size() != recall.size()) throw LengthMismatch("precision and recall differ in length");
  const std::size_t n = precision.size();
  std::vector<double> envelope(precision);
  for (std::size_t k = n; k-- > 1;) envelope[k - 1] = std::max(envelope[k - 1], envelope[k]);
  if (integration == ApIntegration::AllPoints) {
    double area = 0.0, last = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      area += (recall[k] - last) * envelope[k];
      last = recall[k];
    }
    return area;
  }
  double sum = 0.0;
  std::size_t k = 0;
  for (int r = 0; r <= 100; ++r) {
    const double level = r / 100.0;
    while (k < n && recall[k] < level - 1e-12) ++k;
    if (k < n) sum += envelope[k];
  }
  return sum / 101.0;
}

ApScores average_precision(std::span<const int> gt, std::span<const int> pred, std::span<const double> conf,
                           const std::map<int, double>& scores, ApIntegration integration) {
  const Overlaps o = overlaps(gt, pred, conf);
  const auto ious = pair_ious(o);
  std::map<int, std::vector<int>> gts, preds;
  for (const auto& [g, m] : o.gt_mass) gts[semantic_of(g)].push_back(g);
  for (const auto& [p, m] : o.pred_mass) preds[semantic_of(p)].push_back(p);
  auto score_of = [&](int p) {
    const auto it = scores.find(p);
    return it == scores.end() ? 1.0 : it->second;
  };
  for (auto& [cls, list] : preds)
    std::stable_sort(list.begin(), list.end(), [&](int a, int b) { return score_of(a) > score_of(b); });

  auto ap_at = [&](double threshold) {
    double sum = 0.0;
    for (const auto& [cls, g_list] : gts) {
      std::vector<double> precision, recall;
      std::set<int> matched;
      int tp = 0, seen = 0;
      const auto it = preds.find(cls);
      if (it != preds.end())
        for (int p : it->second) {
          int best = -1;
          double best_iou = -1.0;
          for (int g : g_list) {
            if (matched.count(g)) continue;
            const auto f = ious.find({g, p});
            const double v = f == ious.end() ? 0.0 : f->second;
            if (v > best_iou) {
              best_iou = v;
              best = g;
            }
          }
          ++seen;
          if (best >= 0 && best_iou >= threshold - 1e-12) {
            matched.insert(best);
            ++tp;
          }
          precision.push_back(static_cast<double>(tp) / seen);
          recall.push_back(static_cast<double>(tp) / static_cast<double>(g_list.size()));
        }
      sum += integrate_pr(precision, recall, integration);
    }
    return gts.empty() ? 0.0 : sum / static_cast<double>(gts.size());
  };

  ApScores s;
  for (int k = 0; k < 10; ++k) {
    const double t = (50 + 5 * k) / 100.0;
    s.per_threshold[t] = ap_at(t);
    s.ap += s.per_threshold[t] / 10.0;
  }
  s.ap50 = s.per_threshold.at(0.5);
  s.ap25 = ap_at(0.25);
  s.per_threshold[0.25] = s.ap25;
  return s;
}

}  // namespace ltr::metrics
