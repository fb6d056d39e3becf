#pragma once

#include <array>
#include <cmath>
#include <memory>
#include <utility>
#include <vector>

#include "yoco/policy.hpp"
#include "yoco/rng.hpp"
#include "yoco/transforms.hpp"

namespace yoco {

struct JitterParams {
  double brightness = 0.4;
  double contrast = 0.4;
  double saturation = 0.4;
  double hue = 0.1;
};

/// Photometric jitter: the four adjustments run in a random order, each with
/// a factor drawn from its strength interval. Draw protocol: three bounded
/// ints for the order shuffle (always), then one uniform per sub-op whose
/// strength is nonzero. Zero-strength sub-ops are skipped outright, so they
/// leave the image bit-identical.
inline Image color_jitter(const Image& img, const JitterParams& p,
                          RngStream& stream) {
  if (p.brightness < 0.0 || p.brightness > 1.0 || p.contrast < 0.0 ||
      p.contrast > 1.0 || p.saturation < 0.0 || p.saturation > 1.0)
    throw Error(Errc::InvalidParameter, "jitter strength outside [0,1]");
  if (p.hue < 0.0 || p.hue > 0.5)
    throw Error(Errc::InvalidParameter, "hue strength outside [0,0.5]");
  if (img.channels != 3 && (p.saturation > 0.0 || p.hue > 0.0))
    throw Error(Errc::UnsupportedChannels,
                "saturation/hue jitter requires 3 channels");
  std::array<int, 4> order = {0, 1, 2, 3};
  for (int i = 3; i > 0; --i) {
    const auto j = stream.below(static_cast<std::uint64_t>(i) + 1);
    std::swap(order[i], order[j]);
  }
  Image out = img;
  for (int which : order) {
    switch (which) {
      case 0:
        if (p.brightness > 0.0)
          out = adjust_brightness(
              out, stream.uniform(1.0 - p.brightness, 1.0 + p.brightness));
        break;
      case 1:
        if (p.contrast > 0.0)
          out = adjust_contrast(
              out, stream.uniform(1.0 - p.contrast, 1.0 + p.contrast));
        break;
      case 2:
        if (p.saturation > 0.0)
          out = adjust_saturation(
              out, stream.uniform(1.0 - p.saturation, 1.0 + p.saturation));
        break;
      default:
        if (p.hue > 0.0) out = adjust_hue(out, stream.uniform(-p.hue, p.hue));
        break;
    }
  }
  return out;
}

struct BlurParams {
  double sigma_lo = 0.1;
  double sigma_hi = 2.0;
};

/// Gaussian blur with a random sigma and kernel extents tied to image size
/// (roughly 10% of each dimension, forced odd). Draw protocol: one uniform.
inline Image gaussian_blur(const Image& img, const BlurParams& p,
                           RngStream& stream) {
  if (!(p.sigma_lo > 0.0) || p.sigma_hi < p.sigma_lo)
    throw Error(Errc::InvalidParameter, "bad blur sigma range");
  const double sigma = stream.uniform(p.sigma_lo, p.sigma_hi);
  return gaussian_blur_fixed(img, sigma, blur_kernel_extent(img.height),
                             blur_kernel_extent(img.width));
}

struct ErasingParams {
  double scale_lo = 0.02;
  double scale_hi = 0.4;
  double ratio_lo = 0.3;
  double ratio_hi = 3.3;
  float value = 0.0f;
  int attempts = 10;
};

/// Erase one random rectangle. Each attempt draws an area fraction and a
/// log-uniform aspect ratio; the rounded rectangle is accepted only if it
/// fits and its realized area fraction still lies inside the scale range.
/// On acceptance two bounded ints place it. All attempts failing leaves the
/// image unchanged.
inline Image random_erasing(const Image& img, const ErasingParams& p,
                            RngStream& stream) {
  if (!(p.scale_lo > 0.0) || p.scale_hi < p.scale_lo || p.scale_hi > 1.0)
    throw Error(Errc::InvalidParameter, "bad erasing scale range");
  if (!(p.ratio_lo > 0.0) || p.ratio_hi < p.ratio_lo)
    throw Error(Errc::InvalidParameter, "bad erasing ratio range");
  const double area = static_cast<double>(img.height) * img.width;
  for (int attempt = 0; attempt < p.attempts; ++attempt) {
    const double target = area * stream.uniform(p.scale_lo, p.scale_hi);
    const double aspect = std::exp(
        stream.uniform(std::log(p.ratio_lo), std::log(p.ratio_hi)));
    const int h = static_cast<int>(std::lround(std::sqrt(target * aspect)));
    const int w = static_cast<int>(std::lround(std::sqrt(target / aspect)));
    if (h < 1 || h > img.height || w < 1 || w > img.width) continue;
    const double realized = static_cast<double>(h) * w / area;
    if (realized < p.scale_lo || realized > p.scale_hi) continue;
    const int top = static_cast<int>(stream.below(img.height - h + 1));
    const int left = static_cast<int>(stream.below(img.width - w + 1));
    Image out = img;
    for (int c = 0; c < img.channels; ++c)
      for (int y = top; y < top + h; ++y)
        for (int x = left; x < left + w; ++x) out.at(c, y, x) = p.value;
    return out;
  }
  return img;
}

/// Zero a square patch whose side is `fraction` of the shorter image side,
/// centered at a uniformly random pixel and clipped at the borders. Draw
/// protocol: two bounded ints.
inline Image cutout(const Image& img, double fraction, RngStream& stream) {
  if (!(fraction > 0.0) || fraction > 1.0)
    throw Error(Errc::InvalidParameter, "cutout fraction outside (0,1]");
  const int side = static_cast<int>(
      std::lround(fraction * std::min(img.height, img.width)));
  const int cy = static_cast<int>(stream.below(img.height));
  const int cx = static_cast<int>(stream.below(img.width));
  if (side < 1) return img;
  const int y0 = std::max(0, cy - side / 2);
  const int x0 = std::max(0, cx - side / 2);
  const int y1 = std::min(img.height, cy - side / 2 + side);
  const int x1 = std::min(img.width, cx - side / 2 + side);
  Image out = img;
  for (int c = 0; c < img.channels; ++c)
    for (int y = y0; y < y1; ++y)
      for (int x = x0; x < x1; ++x) out.at(c, y, x) = 0.0f;
  return out;
}

enum class OpKind {
  HorizontalFlip,
  VerticalFlip,
  ColorJitter,
  GaussianBlur,
  RandomErasing,
  Cutout,
  AutoAug,
  RandAug,
  Mixup,
  CutMix,
};

inline bool is_mix_op(OpKind k) {
  return k == OpKind::Mixup || k == OpKind::CutMix;
}

/// One step of a pipeline: an op plus its gate probability and parameters.
/// Exactly one gate uniform is consumed per op per image (or per piece),
/// whether or not the gate fires; the op's own draws happen only on firing.
struct AugmentOp {
  OpKind kind = OpKind::HorizontalFlip;
  double probability = 0.5;

  JitterParams jitter;
  BlurParams blur;
  ErasingParams erasing;
  double cutout_fraction = 0.25;
  std::shared_ptr<const AutoAugPolicy> policy;  // AutoAug only
  RandAugParams rand_params;
  double mix_alpha = 1.0;  // Beta parameter for Mixup/CutMix

  static AugmentOp horizontal_flip(double p = 0.5) {
    return {.kind = OpKind::HorizontalFlip, .probability = p};
  }
  static AugmentOp vertical_flip(double p = 0.5) {
    return {.kind = OpKind::VerticalFlip, .probability = p};
  }
  static AugmentOp color_jitter(JitterParams jp = {}, double p = 0.5) {
    return {.kind = OpKind::ColorJitter, .probability = p, .jitter = jp};
  }
  static AugmentOp gaussian_blur(BlurParams bp = {}, double p = 0.5) {
    return {.kind = OpKind::GaussianBlur, .probability = p, .blur = bp};
  }
  static AugmentOp random_erasing(ErasingParams ep = {}, double p = 0.5) {
    return {.kind = OpKind::RandomErasing, .probability = p, .erasing = ep};
  }
  static AugmentOp cutout(double fraction = 0.25, double p = 0.5) {
    return {.kind = OpKind::Cutout, .probability = p,
            .cutout_fraction = fraction};
  }
  static AugmentOp autoaug(std::shared_ptr<const AutoAugPolicy> pol,
                           double p = 1.0) {
    AugmentOp op{.kind = OpKind::AutoAug, .probability = p};
    op.policy = std::move(pol);
    return op;
  }
  static AugmentOp randaug(RandAugParams rp = {}, double p = 1.0) {
    return {.kind = OpKind::RandAug, .probability = p, .rand_params = rp};
  }
  static AugmentOp mixup(double alpha = 1.0, double p = 1.0) {
    return {.kind = OpKind::Mixup, .probability = p, .mix_alpha = alpha};
  }
  static AugmentOp cutmix(double alpha = 1.0, double p = 1.0) {
    return {.kind = OpKind::CutMix, .probability = p, .mix_alpha = alpha};
  }
};

inline bool gate(const AugmentOp& op, RngStream& stream) {
  if (op.probability < 0.0 || op.probability > 1.0)
    throw Error(Errc::InvalidParameter, "gate probability outside [0,1]");
  return stream.bernoulli(op.probability);
}

/// Apply a single non-mix op, assuming its gate already fired.
inline Image apply_op(const Image& img, const AugmentOp& op,
                      RngStream& stream) {
  switch (op.kind) {
    case OpKind::HorizontalFlip: return flip_horizontal(img);
    case OpKind::VerticalFlip: return flip_vertical(img);
    case OpKind::ColorJitter: return color_jitter(img, op.jitter, stream);
    case OpKind::GaussianBlur: return gaussian_blur(img, op.blur, stream);
    case OpKind::RandomErasing: return random_erasing(img, op.erasing, stream);
    case OpKind::Cutout: return cutout(img, op.cutout_fraction, stream);
    case OpKind::AutoAug:
      if (!op.policy)
        throw Error(Errc::InvalidParameter, "AutoAug op has no policy");
      return apply_autoaug(img, *op.policy, stream);
    case OpKind::RandAug: return apply_randaug(img, op.rand_params, stream);
    case OpKind::Mixup:
    case OpKind::CutMix:
      throw Error(Errc::InvalidMix,
                  "mix ops need a partner sample and are handled upstream");
  }
  throw Error(Errc::InvalidParameter, "unknown op kind");
}

/// Run the non-mix ops of a pipeline over one image with one stream: gate
/// draw per op, op draws on firing. Reports whether anything fired.
inline Image apply_ops(Image img, const std::vector<AugmentOp>& ops,
                       RngStream& stream, bool* any_applied = nullptr) {
  bool fired = false;
  for (const AugmentOp& op : ops) {
    if (is_mix_op(op.kind))
      throw Error(Errc::InvalidMix, "mix op inside apply_ops");
    if (!gate(op, stream)) continue;
    img = apply_op(img, op, stream);
    fired = true;
  }
  if (any_applied) *any_applied = fired;
  return img;
}

}  // namespace yoco
