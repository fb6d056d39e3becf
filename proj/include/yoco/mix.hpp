#pragma once

#include <algorithm>
#include <cmath>

#include "yoco/augment.hpp"
#include "yoco/image.hpp"
#include "yoco/rng.hpp"

namespace yoco {

/// Result of a mixing op: the mixed sample, the drawn mixing weight, and the
/// effective weight actually given to the original label (for CutMix this is
/// recomputed from the pasted pixel count, so clipped patches stay honest).
struct MixOutcome {
  Sample sample;
  double lambda = 1.0;
  double weight = 1.0;
};

inline void check_mixable(const Sample& s, const Sample& partner) {
  if (!s.image.same_shape(partner.image))
    throw Error(Errc::InvalidMix, "mix partners must share image shape");
  if (s.label.weights.size() != partner.label.weights.size())
    throw Error(Errc::InvalidMix, "mix partners must share label size");
}

inline Image mixup_image(const Image& a, const Image& b, double lambda) {
  Image out = a;
  for (std::size_t i = 0; i < out.pixels.size(); ++i)
    out.pixels[i] = clamp01(static_cast<float>(lambda * a.pixels[i] +
                                               (1.0 - lambda) * b.pixels[i]));
  return out;
}

inline MixOutcome mixup(const Sample& s, const Sample& partner,
                        double lambda) {
  check_mixable(s, partner);
  if (lambda < 0.0 || lambda > 1.0)
    throw Error(Errc::InvalidMix, "mixup lambda outside [0,1]");
  MixOutcome out;
  out.lambda = lambda;
  out.weight = lambda;
  out.sample.image = mixup_image(s.image, partner.image, lambda);
  out.sample.label = mix_labels(s.label, partner.label, lambda);
  return out;
}

/// Half-open patch rectangle, already clipped to the image.
struct PatchRect {
  int y0 = 0, x0 = 0, y1 = 0, x1 = 0;
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(std::max(0, y1 - y0)) *
           static_cast<std::size_t>(std::max(0, x1 - x0));
  }
};

/// The CutMix patch: side lengths round(extent * sqrt(1-lambda)) centered on
/// (cy, cx), clipped at the borders.
inline PatchRect cutmix_rect(int height, int width, double lambda, int cy,
                             int cx) {
  const double frac = std::sqrt(std::clamp(1.0 - lambda, 0.0, 1.0));
  const int rh = static_cast<int>(std::lround(height * frac));
  const int rw = static_cast<int>(std::lround(width * frac));
  PatchRect r;
  r.y0 = std::clamp(cy - rh / 2, 0, height);
  r.x0 = std::clamp(cx - rw / 2, 0, width);
  r.y1 = std::clamp(cy - rh / 2 + rh, 0, height);
  r.x1 = std::clamp(cx - rw / 2 + rw, 0, width);
  return r;
}

inline void paste_patch(Image& dst, const Image& src, const PatchRect& r) {
  for (int c = 0; c < dst.channels; ++c)
    for (int y = r.y0; y < r.y1; ++y)
      for (int x = r.x0; x < r.x1; ++x) dst.at(c, y, x) = src.at(c, y, x);
}

/// Draw protocol: two bounded ints pick the patch center (y then x). The
/// label weight uses the clipped patch area, not the drawn lambda.
inline MixOutcome cutmix(const Sample& s, const Sample& partner, double lambda,
                         RngStream& stream) {
  check_mixable(s, partner);
  if (lambda < 0.0 || lambda > 1.0)
    throw Error(Errc::InvalidMix, "cutmix lambda outside [0,1]");
  const int cy = static_cast<int>(stream.below(s.image.height));
  const int cx = static_cast<int>(stream.below(s.image.width));
  const PatchRect r = cutmix_rect(s.image.height, s.image.width, lambda, cy, cx);
  MixOutcome out;
  out.lambda = lambda;
  out.sample.image = s.image;
  paste_patch(out.sample.image, partner.image, r);
  const double total =
      static_cast<double>(s.image.height) * s.image.width;
  out.weight = 1.0 - static_cast<double>(r.pixel_count()) / total;
  out.sample.label = mix_labels(s.label, partner.label, out.weight);
  return out;
}

/// Dispatch a mix op, drawing lambda ~ Beta(alpha, alpha) first.
inline MixOutcome apply_mix(const Sample& s, const Sample& partner,
                            const AugmentOp& op, RngStream& stream) {
  if (!is_mix_op(op.kind))
    throw Error(Errc::InvalidMix, "apply_mix on a non-mix op");
  const double lambda = stream.beta(op.mix_alpha);
  if (op.kind == OpKind::Mixup) return mixup(s, partner, lambda);
  return cutmix(s, partner, lambda, stream);
}

}  // namespace yoco
