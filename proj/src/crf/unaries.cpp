#include <algorithm>
#include <cmath>

#include "ltr/crf/fields.hpp"
#include "ltr/error.hpp"

namespace ltr::crf {

UnaryFeatures unary_features(const PixelField& pixels, const PointField& points, const Whitening& whitening) {
  const int s_count = pixels.labels;
  const int p = pixels.size();
  const int m = points.size();
  UnaryFeatures u;
  u.pixel_constraint.resize(p, s_count);
  u.pixel_nll.resize(p, s_count);
  u.point_constraint.resize(m, s_count);
  for (int i = 0; i < p; ++i)
    for (int s = 0; s < s_count; ++s) {
      const std::size_t k = static_cast<std::size_t>(i) * s_count + s;
      u.pixel_constraint(i, s) = whitening.apply(0, pixels.admissible[k] ? 0.0 : 1.0);
      u.pixel_nll(i, s) = whitening.apply(1, -std::log(std::max(pixels.probabilities[k], kProbabilityFloor)));
    }
  for (int l = 0; l < m; ++l)
    for (int s = 0; s < s_count; ++s)
      u.point_constraint(l, s) =
          whitening.apply(2, points.admissible[static_cast<std::size_t>(l) * s_count + s] ? 0.0 : 1.0);
  return u;
}

Unaries build_unaries(const UnaryFeatures& f, const FrameWeights& w) {
  Unaries u;
  u.pixel = f.pixel_constraint * w.pixel_constraint.asDiagonal();
  u.pixel += f.pixel_nll * w.pixel_probability.asDiagonal();
  u.point = -(f.point_constraint * w.point_constraint.asDiagonal());
  if (!u.pixel.allFinite() || !u.point.allFinite()) throw NonFiniteUnary("unary energy is not finite");
  return u;
}

Unaries build_unaries(const PixelField& pixels, const PointField& points, const FrameWeights& weights) {
  return build_unaries(unary_features(pixels, points, weights.whitening), weights);
}

}  // namespace ltr::crf
