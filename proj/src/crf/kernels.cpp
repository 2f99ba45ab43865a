#include "ltr/crf/kernels.hpp"

#include <cmath>

#include "ltr/error.hpp"

namespace ltr::crf {

double KernelFeatures::value(int a, int b) const {
  double r = 0.0;
  const double* fa = &features[static_cast<std::size_t>(a) * dim];
  const double* fb = &features[static_cast<std::size_t>(b) * dim];
  for (int c = 0; c < dim; ++c) r += (fa[c] - fb[c]) * (fa[c] - fb[c]);
  return std::exp(-0.5 * r);
}

bool KernelFeatures::couples(int a, int b) const {
  if (a == b) return false;
  return !bipartite() || ((a < split) != (b < split));
}

std::array<KernelFeatures, kKernelCount> kernel_features(const PixelField& pixels, const PointField& points,
                                                         const KernelWidths& w) {
  w.validate();
  const int p = pixels.size();
  std::array<KernelFeatures, kKernelCount> k;

  auto& smooth = k[static_cast<int>(Kernel::Smoothness)];
  smooth.dim = 2;
  auto& app = k[static_cast<int>(Kernel::Appearance)];
  app.dim = 5;
  for (int i = 0; i < p; ++i) {
    const Vec2 pos = pixels.position(i);
    smooth.variables.push_back(i);
    smooth.features.insert(smooth.features.end(), {pos.x() / w.smooth_position, pos.y() / w.smooth_position});
    app.variables.push_back(i);
    const auto& c = pixels.colors[i];
    app.features.insert(app.features.end(),
                        {pos.x() / w.appearance_position, pos.y() / w.appearance_position, c[0] / w.appearance_color,
                         c[1] / w.appearance_color, c[2] / w.appearance_color});
  }

  auto& pts = k[static_cast<int>(Kernel::Points)];
  pts.dim = 4;
  for (int l = 0; l < points.size(); ++l) {
    if (points.is_virtual[l]) continue;
    const Vec3& q = points.positions[l];
    pts.variables.push_back(p + l);
    pts.features.insert(pts.features.end(), {q.x() / w.point_position, q.y() / w.point_position,
                                             q.z() / w.point_position, points.normal_z[l] / w.point_normal});
  }

  auto& cross = k[static_cast<int>(Kernel::Cross)];
  cross.dim = 2;
  cross.split = p;
  for (int i = 0; i < p; ++i) {
    const Vec2 pos = pixels.position(i);
    cross.variables.push_back(i);
    cross.features.insert(cross.features.end(), {pos.x() / w.cross_position, pos.y() / w.cross_position});
  }
  for (int l = 0; l < points.size(); ++l) {
    const Vec2& pi = points.projections[l];
    cross.variables.push_back(p + l);
    cross.features.insert(cross.features.end(), {pi.x() / w.cross_position, pi.y() / w.cross_position});
  }
  return k;
}

std::string to_string(FilterMode mode) { return mode == FilterMode::Exact ? "exact" : "lattice"; }

FilterMode filter_mode_from_string(const std::string& name) {
  if (name == "exact") return FilterMode::Exact;
  if (name == "lattice") return FilterMode::Lattice;
  throw InvalidArgument("unknown filter mode '" + name + "'");
}

namespace {

Matrix gather(const Matrix& in, const std::vector<int>& vars, int begin, int end) {
  Matrix m(end - begin, in.cols());
  for (int a = begin; a < end; ++a) m.row(a - begin) = in.row(vars[a]);
  return m;
}

void scatter(const Matrix& src, const std::vector<int>& vars, int begin, Matrix& out) {
  for (int a = 0; a < src.rows(); ++a) out.row(vars[begin + a]) = src.row(a);
}

class EmptyFilter final : public KernelFilter {
 public:
  void apply(const Matrix& in, Matrix& out) const override { out.setZero(in.rows(), in.cols()); }
};

// Dense kernel block up to this many entries, direct summation beyond.
constexpr std::size_t kDenseLimit = std::size_t{1} << 22;

class ExactFilter final : public KernelFilter {
 public:
  explicit ExactFilter(const KernelFeatures& k) : k_(k) {
    const int n = k.size();
    const int rows = k.bipartite() ? k.split : n;
    const int cols = k.bipartite() ? n - k.split : n;
    if (static_cast<std::size_t>(rows) * cols > kDenseLimit) return;
    dense_.resize(rows, cols);
    const int off = k.bipartite() ? k.split : 0;
    for (int a = 0; a < rows; ++a)
      for (int b = 0; b < cols; ++b) dense_(a, b) = k.couples(a, b + off) ? k.value(a, b + off) : 0.0;
  }

  void apply(const Matrix& in, Matrix& out) const override {
    out.setZero(in.rows(), in.cols());
    const int n = k_.size();
    if (dense_.size() > 0) {
      if (k_.bipartite()) {
        scatter(dense_ * gather(in, k_.variables, k_.split, n), k_.variables, 0, out);
        scatter(dense_.transpose() * gather(in, k_.variables, 0, k_.split), k_.variables, k_.split, out);
      } else {
        scatter(dense_ * gather(in, k_.variables, 0, n), k_.variables, 0, out);
      }
      return;
    }
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) {
        if (!k_.couples(a, b)) continue;
        const double v = k_.value(a, b);
        out.row(k_.variables[a]) += v * in.row(k_.variables[b]);
        out.row(k_.variables[b]) += v * in.row(k_.variables[a]);
      }
  }

 private:
  const KernelFeatures k_;
  Eigen::MatrixXd dense_;
};

class LatticeFilter final : public KernelFilter {
 public:
  LatticeFilter(const KernelFeatures& k, const LatticeParams& p)
      : vars_(k.variables), split_(k.split), lattice_(k.features, k.dim, p) {}

  void apply(const Matrix& in, Matrix& out) const override {
    out.setZero(in.rows(), in.cols());
    const int n = static_cast<int>(vars_.size());
    const int s = static_cast<int>(in.cols());
    if (split_ < 0) {
      const Matrix sub = gather(in, vars_, 0, n);
      Matrix res(n, s);
      lattice_.filter(sub.data(), res.data(), s);
      scatter(res, vars_, 0, out);
      return;
    }
    // Two channel blocks: one carries the first side, one the second.
    Matrix sub = Matrix::Zero(n, 2 * s);
    for (int a = 0; a < n; ++a) sub.row(a).segment(a < split_ ? 0 : s, s) = in.row(vars_[a]);
    Matrix res(n, 2 * s);
    lattice_.filter(sub.data(), res.data(), 2 * s);
    for (int a = 0; a < n; ++a) out.row(vars_[a]) = res.row(a).segment(a < split_ ? s : 0, s);
  }

 private:
  std::vector<int> vars_;
  int split_;
  PermutohedralLattice lattice_;
};

}  // namespace

std::unique_ptr<KernelFilter> make_filter(const KernelFeatures& kernel, FilterMode mode, const LatticeParams& lattice) {
  if (kernel.size() < 2 || (kernel.bipartite() && (kernel.split == 0 || kernel.split == kernel.size())))
    return std::make_unique<EmptyFilter>();
  if (mode == FilterMode::Exact) return std::make_unique<ExactFilter>(kernel);
  return std::make_unique<LatticeFilter>(kernel, lattice);
}

}  // namespace ltr::crf
