#include "ltr/crf/weights.hpp"

#include "ltr/error.hpp"

namespace ltr::crf {

void KernelWidths::validate() const {
  for (double v : {smooth_position, appearance_position, appearance_color, point_position, point_normal,
                   cross_position})
    if (!(v > 0.0)) throw InvalidArgument("kernel widths must be positive");
}

std::string to_string(Kernel k) {
  switch (k) {
    case Kernel::Smoothness: return "smoothness";
    case Kernel::Appearance: return "appearance";
    case Kernel::Points: return "points";
    case Kernel::Cross: return "cross";
  }
  return "?";
}

bool Whitening::is_identity() const {
  for (int c = 0; c < 3; ++c)
    if (mean[c] != 0.0 || stddev[c] != 1.0) return false;
  return true;
}

ModelWeights ModelWeights::defaults(const ClassSet& classes) {
  classes.validate();
  ModelWeights w;
  w.classes = classes;
  const int c = classes.size();
  w.pixel_constraint = Eigen::VectorXd::Ones(c);
  w.pixel_probability = Eigen::VectorXd::Ones(c);
  w.point_constraint = Eigen::VectorXd::Ones(c);
  return w;
}

void ModelWeights::validate() const {
  classes.validate();
  const int c = classes.size();
  if (pixel_constraint.size() != c || pixel_probability.size() != c || point_constraint.size() != c)
    throw InvalidArgument("unary weight vectors must have one entry per class");
  for (const auto& k : compat) {
    if (!k.full) continue;
    if (k.full->rows() != c || k.full->cols() != c) throw InvalidArgument("compatibility matrix must be classes×classes");
    if ((*k.full - k.full->transpose()).cwiseAbs().maxCoeff() > 0.0)
      throw InvalidArgument("compatibility matrix must be symmetric");
  }
  if (!(lambda >= 0.0)) throw InvalidArgument("lambda must be nonnegative");
  for (double s : whitening.stddev)
    if (!(s > 0.0)) throw InvalidArgument("whitening deviations must be positive");
  widths.validate();
}

int ModelWeights::parameter_count() const {
  const int c = classes.size();
  int n = 3 * c;
  for (const auto& k : compat) n += k.full ? c * (c + 1) / 2 : 2;
  return n;
}

Eigen::VectorXd ModelWeights::parameters() const {
  const int c = classes.size();
  Eigen::VectorXd t(parameter_count());
  t.segment(0, c) = pixel_constraint;
  t.segment(c, c) = pixel_probability;
  t.segment(2 * c, c) = point_constraint;
  int o = 3 * c;
  for (const auto& k : compat) {
    if (k.full) {
      for (int a = 0; a < c; ++a)
        for (int b = a; b < c; ++b) t[o++] = (*k.full)(a, b);
    } else {
      t[o++] = k.intra;
      t[o++] = k.inter;
    }
  }
  return t;
}

void ModelWeights::set_parameters(const Eigen::VectorXd& t) {
  if (t.size() != parameter_count()) throw InvalidArgument("parameter vector has the wrong length");
  const int c = classes.size();
  pixel_constraint = t.segment(0, c);
  pixel_probability = t.segment(c, c);
  point_constraint = t.segment(2 * c, c);
  int o = 3 * c;
  for (auto& k : compat) {
    if (k.full) {
      for (int a = 0; a < c; ++a)
        for (int b = a; b < c; ++b) (*k.full)(a, b) = (*k.full)(b, a) = t[o++];
    } else {
      k.intra = t[o++];
      k.inter = t[o++];
    }
  }
}

std::vector<ParameterGroup> parameter_groups(const ModelWeights& w) {
  const int c = w.classes.size();
  std::vector<ParameterGroup> g = {
      {"pixel_constraint", 0, c}, {"pixel_probability", c, c}, {"point_constraint", 2 * c, c}};
  int o = 3 * c;
  for (int k = 0; k < kKernelCount; ++k) {
    const int n = w.compat[k].full ? c * (c + 1) / 2 : 2;
    g.push_back({"compat_" + to_string(static_cast<Kernel>(k)), o, n});
    o += n;
  }
  return g;
}

FrameWeights expand(const ModelWeights& w, const LabelSpace& labels) {
  w.validate();
  if (labels.class_count() != w.classes.size()) throw InvalidArgument("label space built from a different class set");
  const int s = labels.size();
  FrameWeights f;
  f.labels = s;
  f.pixel_constraint.resize(s);
  f.pixel_probability.resize(s);
  f.point_constraint.resize(s);
  for (int i = 0; i < s; ++i) {
    const int c = labels[i].class_index;
    f.pixel_constraint[i] = w.pixel_constraint[c];
    f.pixel_probability[i] = w.pixel_probability[c];
    f.point_constraint[i] = w.point_constraint[c];
  }
  for (int k = 0; k < kKernelCount; ++k) {
    const Compatibility& src = w.compat[k];
    auto& dst = f.compat[k];
    dst.matrix.resize(s, s);
    if (src.full) {
      if (labels.mode() == LabelMode::Instance)
        throw InvalidArgument("full compatibility matrices are only supported in semantic mode");
      dst.tied = false;
      for (int a = 0; a < s; ++a)
        for (int b = 0; b < s; ++b) dst.matrix(a, b) = (*src.full)(labels[a].class_index, labels[b].class_index);
    } else {
      dst.tied = true;
      dst.intra = src.intra;
      dst.inter = src.inter;
      dst.matrix.setConstant(src.inter);
      dst.matrix.diagonal().setConstant(src.intra);
    }
  }
  f.widths = w.widths;
  f.whitening = w.whitening;
  return f;
}

FrameGradient::FrameGradient(int labels)
    : pixel_constraint(Eigen::VectorXd::Zero(labels)),
      pixel_probability(Eigen::VectorXd::Zero(labels)),
      point_constraint(Eigen::VectorXd::Zero(labels)) {
  for (auto& m : compat) m = Eigen::MatrixXd::Zero(labels, labels);
}

void accumulate_gradient(const ModelWeights& w, const LabelSpace& labels, const FrameGradient& g,
                         Eigen::VectorXd& out) {
  const int c = w.classes.size();
  if (out.size() != w.parameter_count()) throw InvalidArgument("gradient vector has the wrong length");
  const int s = labels.size();
  for (int i = 0; i < s; ++i) {
    const int k = labels[i].class_index;
    out[k] += g.pixel_constraint[i];
    out[c + k] += g.pixel_probability[i];
    out[2 * c + k] += g.point_constraint[i];
  }
  int o = 3 * c;
  for (int k = 0; k < kKernelCount; ++k) {
    const Eigen::MatrixXd& gm = g.compat[k];
    if (w.compat[k].full) {
      // Entry (a, b), a <= b, feeds every label pair whose classes are {a, b}.
      Eigen::MatrixXd by_class = Eigen::MatrixXd::Zero(c, c);
      for (int x = 0; x < s; ++x)
        for (int y = 0; y < s; ++y) by_class(labels[x].class_index, labels[y].class_index) += gm(x, y);
      for (int a = 0; a < c; ++a)
        for (int b = a; b < c; ++b) out[o++] += a == b ? by_class(a, a) : by_class(a, b) + by_class(b, a);
    } else {
      const double diag = gm.diagonal().sum();
      out[o++] += diag;
      out[o++] += gm.sum() - diag;
    }
  }
}

}  // namespace ltr::crf
