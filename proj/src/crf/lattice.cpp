#include "ltr/crf/lattice.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>
#include <unordered_map>

#include "ltr/error.hpp"

namespace ltr::crf {

namespace {

constexpr int kMaxDim = 8;
using Key = std::array<std::int32_t, kMaxDim + 1>;

struct KeyHash {
  std::size_t operator()(const Key& k) const {
    std::size_t h = 1469598103934665603ull;
    for (std::int32_t v : k) h = (h ^ static_cast<std::uint32_t>(v)) * 1099511628211ull;
    return h;
  }
};

// Elevation onto the hyperplane Σx = 0 of R^{d+1}. With unit scale the map
// is an isometry; `alpha` sets the lattice resolution.
class Embedding {
 public:
  Embedding(int d, double alpha) : d_(d), scale_(d), columns_(static_cast<std::size_t>(d) * (d + 1)) {
    for (int i = 0; i < d; ++i) scale_[i] = alpha / std::sqrt(static_cast<double>((i + 1) * (i + 2)));
    std::vector<double> unit(d, 0.0);
    for (int c = 0; c < d; ++c) {
      unit.assign(d, 0.0);
      unit[c] = 1.0;
      elevate(unit.data(), &columns_[static_cast<std::size_t>(c) * (d + 1)]);
    }
  }

  void elevate(const double* f, double* e) const {
    double sm = 0.0;
    for (int j = d_; j > 0; --j) {
      const double cf = f[j - 1] * scale_[j - 1];
      e[j] = sm - j * cf;
      sm += cf;
    }
    e[0] = sm;
  }

  // Enclosing simplex: d+1 vertex keys and barycentric weights.
  void simplex(const double* e, Key* keys, double* bary) const {
    const int d1 = d_ + 1;
    std::array<std::int32_t, kMaxDim + 1> rem0{};
    std::array<int, kMaxDim + 1> rank{};
    int sum = 0;
    for (int i = 0; i < d1; ++i) {
      const double down = e[i] / d1;
      const auto rd = static_cast<std::int32_t>(std::lround(down));
      rem0[i] = rd * d1;
      sum += rd;
    }
    for (int i = 0; i < d_; ++i) {
      const double di = e[i] - rem0[i];
      for (int j = i + 1; j < d1; ++j) {
        if (di < e[j] - rem0[j]) ++rank[i];
        else ++rank[j];
      }
    }
    for (int i = 0; i < d1; ++i) {
      rank[i] += sum;
      if (rank[i] < 0) {
        rank[i] += d1;
        rem0[i] += d1;
      } else if (rank[i] > d_) {
        rank[i] -= d1;
        rem0[i] -= d1;
      }
    }
    std::array<double, kMaxDim + 2> b{};
    for (int i = 0; i < d1; ++i) {
      const double v = (e[i] - rem0[i]) / d1;
      b[d_ - rank[i]] += v;
      b[d_ - rank[i] + 1] -= v;
    }
    b[0] += 1.0 + b[d1];
    for (int r = 0; r < d1; ++r) {
      Key k{};
      for (int i = 0; i < d1; ++i) k[i] = rem0[i] + (rank[i] <= d_ - r ? r : r - d1);
      keys[r] = k;
      bary[r] = b[r];
    }
  }

  // Feature coordinates of a lattice point (inverse of elevate on the plane).
  void feature_of(const Key& k, double* f) const {
    for (int c = 0; c < d_; ++c) {
      const double* e = &columns_[static_cast<std::size_t>(c) * (d_ + 1)];
      double dot = 0.0, nrm = 0.0;
      for (int i = 0; i <= d_; ++i) {
        dot += e[i] * k[i];
        nrm += e[i] * e[i];
      }
      f[c] = dot / nrm;
    }
  }

 private:
  int d_;
  std::vector<double> scale_;
  std::vector<double> columns_;  // elevated unit vectors, orthogonal with norm alpha
};

std::int64_t squared_distance(const Key& a, const Key& b, int d1) {
  std::int64_t s = 0;
  for (int i = 0; i < d1; ++i) {
    const std::int64_t t = a[i] - b[i];
    s += t * t;
  }
  return s;
}

double alpha_for(int d, double spacing) { return std::sqrt(static_cast<double>(d * (d + 1))) / spacing; }

double compute_splat_variance(int d) {
  const Embedding emb(d, alpha_for(d, 1.0));
  // Halton samples over a box much larger than one cell.
  static constexpr int primes[kMaxDim] = {2, 3, 5, 7, 11, 13, 17, 19};
  const int samples = 20000;
  double acc = 0.0;
  std::vector<double> f(d), e(d + 1), fv(d);
  std::vector<Key> keys(d + 1);
  std::vector<double> w(d + 1);
  for (int s = 1; s <= samples; ++s) {
    for (int c = 0; c < d; ++c) {
      double r = 0.0, base = 1.0 / primes[c];
      for (int i = s; i > 0; i /= primes[c], base /= primes[c]) r += (i % primes[c]) * base;
      f[c] = 8.0 * r;
    }
    emb.elevate(f.data(), e.data());
    emb.simplex(e.data(), keys.data(), w.data());
    for (int r = 0; r <= d; ++r) {
      emb.feature_of(keys[r], fv.data());
      double dist2 = 0.0;
      for (int c = 0; c < d; ++c) dist2 += (fv[c] - f[c]) * (fv[c] - f[c]);
      acc += w[r] * dist2;
    }
  }
  return acc / samples / d;
}

}  // namespace

double splat_variance(int dim) {
  if (dim < 1 || dim > kMaxDim) throw InvalidArgument("lattice dimension out of range");
  static std::array<double, kMaxDim + 1> cache{};
  static std::once_flag once[kMaxDim + 1];
  std::call_once(once[dim], [dim] { cache[dim] = compute_splat_variance(dim); });
  return cache[dim];
}

PermutohedralLattice::PermutohedralLattice(const std::vector<double>& features, int dim, const LatticeParams& params)
    : d_(dim) {
  if (dim < 1 || dim > kMaxDim) throw InvalidArgument("lattice dimension must be in [1, 8]");
  if (features.size() % static_cast<std::size_t>(dim) != 0) throw InvalidArgument("feature array not N×d");
  if (!(params.spacing > 0.0) || !(params.cutoff > 0.0)) throw InvalidArgument("lattice spacing and cutoff must be positive");
  n_ = static_cast<int>(features.size() / dim);
  const int d1 = d_ + 1;

  // Splat and slice each widen the kernel by the splat variance.
  const double var = 1.0 - 2.0 * splat_variance(d_) * params.spacing * params.spacing;
  if (var < 0.25) throw InvalidArgument("lattice spacing too coarse for variance compensation");

  const double alpha = alpha_for(d_, params.spacing);
  const Embedding emb(d_, alpha);
  std::unordered_map<Key, std::uint32_t, KeyHash> index;
  std::vector<Key> vertices;
  splat_vertex_.resize(static_cast<std::size_t>(n_) * d1);
  splat_weight_.resize(static_cast<std::size_t>(n_) * d1);
  std::vector<double> e(d1);
  std::vector<Key> keys(d1);
  for (int i = 0; i < n_; ++i) {
    emb.elevate(&features[static_cast<std::size_t>(i) * d_], e.data());
    emb.simplex(e.data(), keys.data(), &splat_weight_[static_cast<std::size_t>(i) * d1]);
    for (int r = 0; r < d1; ++r) {
      auto [it, inserted] = index.try_emplace(keys[r], static_cast<std::uint32_t>(vertices.size()));
      if (inserted) vertices.push_back(keys[r]);
      splat_vertex_[static_cast<std::size_t>(i) * d1 + r] = it->second;
    }
  }
  vertex_count_ = vertices.size();

  // Squared distances between vertices are integers in elevated units.
  const auto max2 = static_cast<std::int64_t>(std::floor(params.cutoff * params.cutoff * alpha * alpha));
  const double inv = 1.0 / (2.0 * alpha * alpha * var);
  auto gauss = [inv](std::int64_t q) { return static_cast<float>(std::exp(-static_cast<double>(q) * inv)); };

  // Bucket vertices on up to three feature axes with cells of the cutoff size.
  const int g = std::min(d_, 3);
  struct CellHash {
    std::size_t operator()(const std::array<std::int64_t, 3>& c) const {
      return static_cast<std::size_t>(c[0] * 73856093 ^ c[1] * 19349663 ^ c[2] * 83492791);
    }
  };
  std::unordered_map<std::array<std::int64_t, 3>, std::vector<std::uint32_t>, CellHash> cells;
  std::vector<std::array<std::int64_t, 3>> cell_of(vertex_count_);
  std::vector<double> fv(d_);
  for (std::uint32_t v = 0; v < vertex_count_; ++v) {
    emb.feature_of(vertices[v], fv.data());
    std::array<std::int64_t, 3> c{};
    for (int a = 0; a < g; ++a) c[a] = static_cast<std::int64_t>(std::floor(fv[a] / params.cutoff));
    cell_of[v] = c;
    cells[c].push_back(v);
  }

  blur_row_.assign(vertex_count_ + 1, 0);
  int span = 1;
  for (int a = 0; a < g; ++a) span *= 3;
  for (std::uint32_t v = 0; v < vertex_count_; ++v) {
    for (int code = 0; code < span; ++code) {
      std::array<std::int64_t, 3> c = cell_of[v];
      for (int a = 0, t = code; a < g; ++a, t /= 3) c[a] += t % 3 - 1;
      const auto it = cells.find(c);
      if (it == cells.end()) continue;
      for (std::uint32_t u : it->second) {
        if (u < v) continue;
        const std::int64_t s = squared_distance(vertices[v], vertices[u], d1);
        if (s > max2) continue;
        blur_col_.push_back(u);
        blur_weight_.push_back(gauss(s));
      }
    }
    blur_row_[v + 1] = blur_col_.size();
  }

  self_.resize(n_);
  for (int i = 0; i < n_; ++i) {
    double s = 0.0;
    for (int a = 0; a < d1; ++a)
      for (int b = 0; b < d1; ++b) {
        const auto va = splat_vertex_[static_cast<std::size_t>(i) * d1 + a];
        const auto vb = splat_vertex_[static_cast<std::size_t>(i) * d1 + b];
        const std::int64_t q = squared_distance(vertices[va], vertices[vb], d1);
        if (q <= max2)
          s += splat_weight_[static_cast<std::size_t>(i) * d1 + a] * splat_weight_[static_cast<std::size_t>(i) * d1 + b] *
               gauss(q);
      }
    self_[i] = s;
  }
}

void PermutohedralLattice::filter(const double* in, double* out, int channels) const {
  const int d1 = d_ + 1;
  std::vector<double> splat(vertex_count_ * channels, 0.0);
  for (int i = 0; i < n_; ++i) {
    const double* src = in + static_cast<std::size_t>(i) * channels;
    for (int r = 0; r < d1; ++r) {
      const std::size_t k = static_cast<std::size_t>(i) * d1 + r;
      double* dst = &splat[static_cast<std::size_t>(splat_vertex_[k]) * channels];
      const double w = splat_weight_[k];
      for (int c = 0; c < channels; ++c) dst[c] += w * src[c];
    }
  }
  std::vector<double> blurred(vertex_count_ * channels, 0.0);
  for (std::size_t v = 0; v < vertex_count_; ++v) {
    double* dst = &blurred[v * channels];
    const double* own = &splat[v * channels];
    for (std::size_t e = blur_row_[v]; e < blur_row_[v + 1]; ++e) {
      const std::size_t u = blur_col_[e];
      const double* src = &splat[u * channels];
      const double w = blur_weight_[e];
      for (int c = 0; c < channels; ++c) dst[c] += w * src[c];
      if (u == v) continue;
      double* other = &blurred[u * channels];
      for (int c = 0; c < channels; ++c) other[c] += w * own[c];
    }
  }
  for (int i = 0; i < n_; ++i) {
    double* dst = out + static_cast<std::size_t>(i) * channels;
    const double* src = in + static_cast<std::size_t>(i) * channels;
    for (int c = 0; c < channels; ++c) dst[c] = -self_[i] * src[c];
    for (int r = 0; r < d1; ++r) {
      const std::size_t k = static_cast<std::size_t>(i) * d1 + r;
      const double* b = &blurred[static_cast<std::size_t>(splat_vertex_[k]) * channels];
      const double w = splat_weight_[k];
      for (int c = 0; c < channels; ++c) dst[c] += w * b[c];
    }
  }
}

double PermutohedralLattice::kernel(int i, int j) const {
  const int d1 = d_ + 1;
  double s = 0.0;
  for (int a = 0; a < d1; ++a) {
    const auto va = splat_vertex_[static_cast<std::size_t>(i) * d1 + a];
    for (int b = 0; b < d1; ++b) {
      const auto vb = splat_vertex_[static_cast<std::size_t>(j) * d1 + b];
      const auto lo = std::min(va, vb), hi = std::max(va, vb);
      for (std::size_t e = blur_row_[lo]; e < blur_row_[lo + 1]; ++e)
        if (blur_col_[e] == hi)
          s += splat_weight_[static_cast<std::size_t>(i) * d1 + a] * splat_weight_[static_cast<std::size_t>(j) * d1 + b] *
               blur_weight_[e];
    }
  }
  return s;
}

}  // namespace ltr::crf
