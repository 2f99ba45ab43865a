#include "metric_oracles.hpp"

#include <algorithm>
#include <set>

namespace ltr::sim {

std::optional<double> confusion_iou(const std::vector<int>& gt, const std::vector<int>& pred, int c) {
  std::map<int, int> index;
  for (int v : gt) index.emplace(v, 0);
  for (int v : pred) index.emplace(v, 0);
  int k = 0;
  for (auto& [label, i] : index) i = k++;
  std::vector<std::vector<long>> m(k, std::vector<long>(k, 0));
  for (std::size_t i = 0; i < gt.size(); ++i) ++m[index[gt[i]]][index[pred[i]]];
  if (!index.count(c)) return std::nullopt;
  const int ci = index[c];
  long row = 0, col = 0;
  for (int j = 0; j < k; ++j) {
    row += m[ci][j];
    col += m[j][ci];
  }
  const long uni = row + col - m[ci][ci];
  if (uni == 0) return std::nullopt;
  return static_cast<double>(m[ci][ci]) / static_cast<double>(uni);
}

double brute_force_matching_total(const std::map<std::pair<int, int>, double>& pair_iou) {
  std::set<int> gs, ps;
  for (const auto& [key, v] : pair_iou) {
    gs.insert(key.first);
    ps.insert(key.second);
  }
  const std::vector<int> g(gs.begin(), gs.end()), p(ps.begin(), ps.end());
  double best = 0.0;
  std::vector<char> used(p.size(), 0);
  auto rec = [&](auto&& self, std::size_t a, double acc) -> void {
    if (a == g.size()) {
      best = std::max(best, acc);
      return;
    }
    self(self, a + 1, acc);  // leave g[a] unmatched
    for (std::size_t b = 0; b < p.size(); ++b) {
      if (used[b]) continue;
      const auto it = pair_iou.find({g[a], p[b]});
      if (it == pair_iou.end()) continue;
      used[b] = 1;
      self(self, a + 1, acc + it->second);
      used[b] = 0;
    }
  };
  rec(rec, 0, 0.0);
  return best;
}

std::vector<int> random_instance_map(std::mt19937_64& rng, int width, int height, int count) {
  std::vector<int> map(static_cast<std::size_t>(width) * height, 7000);
  for (int k = 1; k <= count; ++k) {
    std::uniform_int_distribution<int> x(0, width - 4), y(0, height - 4);
    const int x0 = x(rng), y0 = y(rng);
    const int w = std::uniform_int_distribution<int>(3, std::max(3, width / 2))(rng);
    const int h = std::uniform_int_distribution<int>(3, std::max(3, height / 2))(rng);
    for (int r = y0; r < std::min(height, y0 + h); ++r)
      for (int c = x0; c < std::min(width, x0 + w); ++c) map[r * width + c] = 26000 + k;
  }
  return map;
}

std::vector<int> perturb_instances(std::mt19937_64& rng, const std::vector<int>& map, int width, int height) {
  std::vector<int> out = map;
  std::uniform_int_distribution<int> shift(-2, 2);
  const int dx = shift(rng), dy = shift(rng);
  for (int r = 0; r < height; ++r)
    for (int c = 0; c < width; ++c) {
      const int sr = std::clamp(r - dy, 0, height - 1), sc = std::clamp(c - dx, 0, width - 1);
      out[r * width + c] = map[sr * width + sc];
    }
  std::uniform_int_distribution<int> renumber(1, 9);
  std::map<int, int> ids;
  for (int& v : out) {
    if (v % 1000 == 0) continue;
    auto it = ids.find(v);
    if (it == ids.end()) it = ids.emplace(v, 26000 + renumber(rng) * 10 + static_cast<int>(ids.size())).first;
    v = it->second;
  }
  // Split one instance along a column.
  const int split_col = std::uniform_int_distribution<int>(0, width - 1)(rng);
  for (int r = 0; r < height; ++r)
    for (int c = split_col; c < width; ++c)
      if (out[r * width + c] % 1000 != 0 && out[r * width + c] % 2 == 0) out[r * width + c] += 1;
  return out;
}

}  // namespace ltr::sim
