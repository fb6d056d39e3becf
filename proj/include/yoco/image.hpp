#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "yoco/error.hpp"

namespace yoco {

/// Dense image tensor in channel-major (C,H,W) layout with pixel values in
/// [0,1]. All transforms in this library consume and produce this type.
struct Image {
  int channels = 0;
  int height = 0;
  int width = 0;
  std::vector<float> pixels;

  Image() = default;
  Image(int c, int h, int w, float fill = 0.0f)
      : channels(c), height(h), width(w),
        pixels(static_cast<std::size_t>(c) * h * w, fill) {}

  float& at(int c, int y, int x) {
    return pixels[(static_cast<std::size_t>(c) * height + y) * width + x];
  }
  float at(int c, int y, int x) const {
    return pixels[(static_cast<std::size_t>(c) * height + y) * width + x];
  }

  std::size_t plane_size() const {
    return static_cast<std::size_t>(height) * width;
  }
  bool same_shape(const Image& o) const {
    return channels == o.channels && height == o.height && width == o.width;
  }

  bool operator==(const Image& o) const = default;
};

/// Probability vector over classes. Mix-based augmentations produce soft
/// labels; everything else carries one-hot vectors.
struct LabelDistribution {
  std::vector<float> weights;

  LabelDistribution() = default;
  explicit LabelDistribution(std::vector<float> w) : weights(std::move(w)) {}

  static LabelDistribution one_hot(std::size_t index, std::size_t count) {
    LabelDistribution l;
    l.weights.assign(count, 0.0f);
    l.weights.at(index) = 1.0f;
    return l;
  }

  bool on_simplex(float eps = 1e-6f) const {
    double sum = 0.0;
    for (float w : weights) {
      if (w < -eps) return false;
      sum += w;
    }
    return !weights.empty() && std::fabs(sum - 1.0) <= eps;
  }

  bool operator==(const LabelDistribution& o) const = default;
};

/// Convex combination lam*a + (1-lam)*b of two label vectors.
inline LabelDistribution mix_labels(const LabelDistribution& a,
                                    const LabelDistribution& b, double lam) {
  if (a.weights.size() != b.weights.size())
    throw Error(Errc::InvalidMix, "label class counts differ");
  LabelDistribution out;
  out.weights.resize(a.weights.size());
  for (std::size_t i = 0; i < a.weights.size(); ++i) {
    out.weights[i] = static_cast<float>(lam * a.weights[i] +
                                        (1.0 - lam) * b.weights[i]);
  }
  return out;
}

struct Sample {
  Image image;
  LabelDistribution label;
};

enum class Dim { Height, Width };

/// A single cut: the dimension and the pixel index it falls on. The index
/// must be strictly interior, so both resulting pieces are non-empty.
struct CutSpec {
  Dim dimension = Dim::Height;
  int position = 0;
};

inline Image crop(const Image& img, int y0, int x0, int h, int w) {
  if (y0 < 0 || x0 < 0 || h <= 0 || w <= 0 || y0 + h > img.height ||
      x0 + w > img.width)
    throw Error(Errc::InvalidCut, "crop rectangle out of range");
  Image out(img.channels, h, w);
  for (int c = 0; c < img.channels; ++c)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) out.at(c, y, x) = img.at(c, y0 + y, x0 + x);
  return out;
}

inline void paste(Image& dst, const Image& piece, int y0, int x0) {
  if (piece.channels != dst.channels || y0 < 0 || x0 < 0 ||
      y0 + piece.height > dst.height || x0 + piece.width > dst.width)
    throw Error(Errc::InvalidConcat, "paste rectangle out of range");
  for (int c = 0; c < piece.channels; ++c)
    for (int y = 0; y < piece.height; ++y)
      for (int x = 0; x < piece.width; ++x)
        dst.at(c, y0 + y, x0 + x) = piece.at(c, y, x);
}

/// Splits an image into two pieces along spec.dimension. The pieces are exact
/// sub-blocks: concat() of them restores the input bit for bit.
inline std::pair<Image, Image> cut(const Image& img, const CutSpec& spec) {
  const int extent = spec.dimension == Dim::Height ? img.height : img.width;
  if (spec.position <= 0 || spec.position >= extent)
    throw Error(Errc::InvalidCut, "cut position " +
                                      std::to_string(spec.position) +
                                      " not interior to extent " +
                                      std::to_string(extent));
  if (spec.dimension == Dim::Height) {
    return {crop(img, 0, 0, spec.position, img.width),
            crop(img, spec.position, 0, extent - spec.position, img.width)};
  }
  return {crop(img, 0, 0, img.height, spec.position),
          crop(img, 0, spec.position, img.height, extent - spec.position)};
}

inline Image concat(const Image& first, const Image& second, Dim dimension) {
  if (first.channels != second.channels)
    throw Error(Errc::InvalidConcat, "channel counts differ");
  if (dimension == Dim::Height) {
    if (first.width != second.width)
      throw Error(Errc::InvalidConcat, "widths differ for height concat");
    Image out(first.channels, first.height + second.height, first.width);
    paste(out, first, 0, 0);
    paste(out, second, first.height, 0);
    return out;
  }
  if (first.height != second.height)
    throw Error(Errc::InvalidConcat, "heights differ for width concat");
  Image out(first.channels, first.height, first.width + second.width);
  paste(out, first, 0, 0);
  paste(out, second, 0, first.width);
  return out;
}

inline float clamp01(float v) {
  return v < 0.0f ? 0.0f : (v > 1.0f ? 1.0f : v);
}

}  // namespace yoco
