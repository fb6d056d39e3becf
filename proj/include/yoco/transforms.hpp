#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "yoco/image.hpp"

namespace yoco {

// Rec.601 luma weights, the convention of the reference tooling.
inline float luma(float r, float g, float b) {
  return 0.299f * r + 0.587f * g + 0.114f * b;
}

inline Image flip_horizontal(const Image& img) {
  Image out(img.channels, img.height, img.width);
  for (int c = 0; c < img.channels; ++c)
    for (int y = 0; y < img.height; ++y)
      for (int x = 0; x < img.width; ++x)
        out.at(c, y, x) = img.at(c, y, img.width - 1 - x);
  return out;
}

inline Image flip_vertical(const Image& img) {
  Image out(img.channels, img.height, img.width);
  for (int c = 0; c < img.channels; ++c)
    for (int y = 0; y < img.height; ++y)
      for (int x = 0; x < img.width; ++x)
        out.at(c, y, x) = img.at(c, img.height - 1 - y, x);
  return out;
}

/// Mean over the grayscale rendering of the image; for non-RGB images this is
/// the plain mean over all pixels.
inline double grayscale_mean(const Image& img) {
  double sum = 0.0;
  if (img.channels == 3) {
    for (std::size_t i = 0; i < img.plane_size(); ++i)
      sum += luma(img.pixels[i], img.pixels[i + img.plane_size()],
                  img.pixels[i + 2 * img.plane_size()]);
    return sum / static_cast<double>(img.plane_size());
  }
  for (float v : img.pixels) sum += v;
  return img.pixels.empty() ? 0.0 : sum / static_cast<double>(img.pixels.size());
}

inline Image adjust_brightness(const Image& img, double factor) {
  Image out = img;
  for (float& v : out.pixels) v = clamp01(static_cast<float>(v * factor));
  return out;
}

/// Blend toward the image's grayscale mean; factor 0 collapses every channel
/// to that mean, factor 1 is the identity.
inline Image adjust_contrast(const Image& img, double factor) {
  const double mean = grayscale_mean(img);
  Image out = img;
  for (float& v : out.pixels)
    v = clamp01(static_cast<float>(factor * v + (1.0 - factor) * mean));
  return out;
}

/// Blend toward the per-pixel grayscale value. RGB images only.
inline Image adjust_saturation(const Image& img, double factor) {
  if (img.channels != 3)
    throw Error(Errc::UnsupportedChannels,
                "saturation adjustment requires 3 channels");
  Image out = img;
  const std::size_t n = img.plane_size();
  for (std::size_t i = 0; i < n; ++i) {
    const float g =
        luma(img.pixels[i], img.pixels[i + n], img.pixels[i + 2 * n]);
    for (int c = 0; c < 3; ++c) {
      const float v = img.pixels[i + c * n];
      out.pixels[i + c * n] =
          clamp01(static_cast<float>(factor * v + (1.0 - factor) * g));
    }
  }
  return out;
}

/// Rotate the hue channel by `shift` turns (shift in [-0.5, 0.5]). RGB only.
inline Image adjust_hue(const Image& img, double shift) {
  if (img.channels != 3)
    throw Error(Errc::UnsupportedChannels, "hue adjustment requires 3 channels");
  Image out = img;
  const std::size_t n = img.plane_size();
  for (std::size_t i = 0; i < n; ++i) {
    const float r = img.pixels[i];
    const float g = img.pixels[i + n];
    const float b = img.pixels[i + 2 * n];
    const float maxc = std::max({r, g, b});
    const float minc = std::min({r, g, b});
    const float v = maxc;
    const float delta = maxc - minc;
    float h = 0.0f, s = 0.0f;
    if (delta > 0.0f && maxc > 0.0f) {
      s = delta / maxc;
      if (r == maxc)
        h = (g - b) / delta;
      else if (g == maxc)
        h = 2.0f + (b - r) / delta;
      else
        h = 4.0f + (r - g) / delta;
      h /= 6.0f;
      if (h < 0.0f) h += 1.0f;
    }
    h = static_cast<float>(h + shift);
    h -= std::floor(h);
    const float hf = h * 6.0f;
    const int sector = static_cast<int>(hf) % 6;
    const float f = hf - std::floor(hf);
    const float p = v * (1.0f - s);
    const float q = v * (1.0f - s * f);
    const float t = v * (1.0f - s * (1.0f - f));
    float nr, ng, nb;
    switch (sector) {
      case 0: nr = v; ng = t; nb = p; break;
      case 1: nr = q; ng = v; nb = p; break;
      case 2: nr = p; ng = v; nb = t; break;
      case 3: nr = p; ng = q; nb = v; break;
      case 4: nr = t; ng = p; nb = v; break;
      default: nr = v; ng = p; nb = q; break;
    }
    out.pixels[i] = clamp01(nr);
    out.pixels[i + n] = clamp01(ng);
    out.pixels[i + 2 * n] = clamp01(nb);
  }
  return out;
}

/// Blend toward a 3x3-smoothed copy (border pixels stay unsmoothed, matching
/// the reference filter); factor 1 is the identity, 0 is fully smoothed.
inline Image adjust_sharpness(const Image& img, double factor) {
  Image smooth = img;
  if (img.height >= 3 && img.width >= 3) {
    for (int c = 0; c < img.channels; ++c)
      for (int y = 1; y + 1 < img.height; ++y)
        for (int x = 1; x + 1 < img.width; ++x) {
          float acc = 5.0f * img.at(c, y, x);
          acc += img.at(c, y - 1, x - 1) + img.at(c, y - 1, x) +
                 img.at(c, y - 1, x + 1);
          acc += img.at(c, y, x - 1) + img.at(c, y, x + 1);
          acc += img.at(c, y + 1, x - 1) + img.at(c, y + 1, x) +
                 img.at(c, y + 1, x + 1);
          smooth.at(c, y, x) = acc / 13.0f;
        }
  }
  Image out = img;
  for (std::size_t i = 0; i < out.pixels.size(); ++i)
    out.pixels[i] = clamp01(static_cast<float>(
        smooth.pixels[i] + factor * (img.pixels[i] - smooth.pixels[i])));
  return out;
}

inline Image invert(const Image& img) {
  Image out = img;
  for (float& v : out.pixels) v = 1.0f - v;
  return out;
}

/// Keep the top `bits` bits of each 8-bit quantized channel value.
inline Image posterize(const Image& img, int bits) {
  if (bits < 1 || bits > 8)
    throw Error(Errc::InvalidParameter, "posterize bits must be in [1, 8]");
  const int mask = (0xFF << (8 - bits)) & 0xFF;
  Image out = img;
  for (float& v : out.pixels) {
    const int b = static_cast<int>(std::lround(clamp01(v) * 255.0f)) & mask;
    v = static_cast<float>(b) / 255.0f;
  }
  return out;
}

inline Image solarize(const Image& img, double threshold) {
  Image out = img;
  for (float& v : out.pixels)
    if (v >= threshold) v = 1.0f - v;
  return out;
}

/// Per-channel histogram equalization over the 256-level quantization, using
/// the classic cumulative-step table.
inline Image equalize(const Image& img) {
  Image out = img;
  const std::size_t n = img.plane_size();
  for (int c = 0; c < img.channels; ++c) {
    std::array<std::int64_t, 256> hist{};
    for (std::size_t i = 0; i < n; ++i) {
      const int b = static_cast<int>(
          std::lround(clamp01(img.pixels[c * n + i]) * 255.0f));
      ++hist[b];
    }
    int last_nonzero = -1;
    int nonzero_bins = 0;
    for (int b = 0; b < 256; ++b)
      if (hist[b] > 0) {
        last_nonzero = b;
        ++nonzero_bins;
      }
    if (nonzero_bins <= 1) continue;
    const std::int64_t step =
        (static_cast<std::int64_t>(n) - hist[last_nonzero]) / 255;
    if (step == 0) continue;
    std::array<float, 256> lut{};
    std::int64_t acc = step / 2;
    for (int b = 0; b < 256; ++b) {
      lut[b] = static_cast<float>(std::min<std::int64_t>(acc / step, 255)) /
               255.0f;
      acc += hist[b];
    }
    for (std::size_t i = 0; i < n; ++i) {
      const int b = static_cast<int>(
          std::lround(clamp01(img.pixels[c * n + i]) * 255.0f));
      out.pixels[c * n + i] = lut[b];
    }
  }
  return out;
}

/// Per-channel linear rescale so the darkest pixel maps to 0 and the
/// brightest to 1. Flat channels are left alone.
inline Image auto_contrast(const Image& img) {
  Image out = img;
  const std::size_t n = img.plane_size();
  for (int c = 0; c < img.channels; ++c) {
    float mn = 1.0f, mx = 0.0f;
    for (std::size_t i = 0; i < n; ++i) {
      mn = std::min(mn, img.pixels[c * n + i]);
      mx = std::max(mx, img.pixels[c * n + i]);
    }
    if (mx <= mn) continue;
    const float scale = 1.0f / (mx - mn);
    for (std::size_t i = 0; i < n; ++i)
      out.pixels[c * n + i] = clamp01((img.pixels[c * n + i] - mn) * scale);
  }
  return out;
}

/// Inverse affine map from output pixel coordinates to source coordinates:
/// sx = a*x + b*y + tx, sy = c*x + d*y + ty.
struct InverseAffine {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0, tx = 0.0, ty = 0.0;
};

/// Resample through an inverse affine map with bilinear interpolation;
/// source taps outside the image contribute zero.
inline Image affine_warp(const Image& img, const InverseAffine& m) {
  Image out(img.channels, img.height, img.width);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const double sx = m.a * x + m.b * y + m.tx;
      const double sy = m.c * x + m.d * y + m.ty;
      const int x0 = static_cast<int>(std::floor(sx));
      const int y0 = static_cast<int>(std::floor(sy));
      const double fx = sx - x0;
      const double fy = sy - y0;
      const double w00 = (1.0 - fx) * (1.0 - fy);
      const double w01 = fx * (1.0 - fy);
      const double w10 = (1.0 - fx) * fy;
      const double w11 = fx * fy;
      for (int c = 0; c < img.channels; ++c) {
        double acc = 0.0;
        auto tap = [&](int yy, int xx, double w) {
          if (w > 0.0 && yy >= 0 && yy < img.height && xx >= 0 &&
              xx < img.width)
            acc += w * img.at(c, yy, xx);
        };
        tap(y0, x0, w00);
        tap(y0, x0 + 1, w01);
        tap(y0 + 1, x0, w10);
        tap(y0 + 1, x0 + 1, w11);
        out.at(c, y, x) = clamp01(static_cast<float>(acc));
      }
    }
  }
  return out;
}

inline Image rotate_deg(const Image& img, double degrees) {
  if (degrees == 0.0) return img;
  const double th = degrees * std::numbers::pi / 180.0;
  const double cx = (img.width - 1) / 2.0;
  const double cy = (img.height - 1) / 2.0;
  InverseAffine m;
  m.a = std::cos(th);
  m.b = std::sin(th);
  m.c = -std::sin(th);
  m.d = std::cos(th);
  m.tx = cx - m.a * cx - m.b * cy;
  m.ty = cy - m.c * cx - m.d * cy;
  return affine_warp(img, m);
}

inline Image shear_x(const Image& img, double factor) {
  if (factor == 0.0) return img;
  const double cy = (img.height - 1) / 2.0;
  InverseAffine m;
  m.b = -factor;
  m.tx = factor * cy;
  return affine_warp(img, m);
}

inline Image shear_y(const Image& img, double factor) {
  if (factor == 0.0) return img;
  const double cx = (img.width - 1) / 2.0;
  InverseAffine m;
  m.c = -factor;
  m.ty = factor * cx;
  return affine_warp(img, m);
}

inline Image translate_x(const Image& img, double pixels) {
  if (pixels == 0.0) return img;
  InverseAffine m;
  m.tx = -pixels;
  return affine_warp(img, m);
}

inline Image translate_y(const Image& img, double pixels) {
  if (pixels == 0.0) return img;
  InverseAffine m;
  m.ty = -pixels;
  return affine_warp(img, m);
}

/// Bilinear resize (half-pixel-centered sampling, edge clamped).
inline Image resize_bilinear(const Image& img, int out_h, int out_w) {
  if (out_h <= 0 || out_w <= 0)
    throw Error(Errc::InvalidParameter, "resize target must be positive");
  if (out_h == img.height && out_w == img.width) return img;
  Image out(img.channels, out_h, out_w);
  const double sy_scale = static_cast<double>(img.height) / out_h;
  const double sx_scale = static_cast<double>(img.width) / out_w;
  for (int y = 0; y < out_h; ++y) {
    const double sy =
        std::clamp((y + 0.5) * sy_scale - 0.5, 0.0, img.height - 1.0);
    const int y0 = static_cast<int>(sy);
    const int y1 = std::min(y0 + 1, img.height - 1);
    const double fy = sy - y0;
    for (int x = 0; x < out_w; ++x) {
      const double sx =
          std::clamp((x + 0.5) * sx_scale - 0.5, 0.0, img.width - 1.0);
      const int x0 = static_cast<int>(sx);
      const int x1 = std::min(x0 + 1, img.width - 1);
      const double fx = sx - x0;
      for (int c = 0; c < img.channels; ++c) {
        const double top =
            (1.0 - fx) * img.at(c, y0, x0) + fx * img.at(c, y0, x1);
        const double bot =
            (1.0 - fx) * img.at(c, y1, x0) + fx * img.at(c, y1, x1);
        out.at(c, y, x) = clamp01(static_cast<float>((1.0 - fy) * top + fy * bot));
      }
    }
  }
  return out;
}

/// Kernel extent for the 10%-of-extent blur rule: nearest odd integer to
/// 0.1*extent, never below 1.
inline int blur_kernel_extent(int extent) {
  const double target = 0.1 * extent;
  const long k = 2 * std::lround((target - 1.0) / 2.0) + 1;
  return static_cast<int>(std::max(1L, k));
}

namespace detail {
inline int reflect_index(int i, int n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * n - 2 - i;
  }
  return i;
}
}  // namespace detail

/// Separable Gaussian convolution with per-dimension kernel extents and
/// reflection padding (border pixel not duplicated).
inline Image gaussian_blur_fixed(const Image& img, double sigma, int kh,
                                 int kw) {
  if (sigma <= 0.0)
    throw Error(Errc::InvalidParameter, "blur sigma must be positive");
  auto make_kernel = [&](int k) {
    std::vector<double> w(k);
    const int r = k / 2;
    double sum = 0.0;
    for (int i = 0; i < k; ++i) {
      w[i] = std::exp(-0.5 * (i - r) * (i - r) / (sigma * sigma));
      sum += w[i];
    }
    for (double& v : w) v /= sum;
    return w;
  };
  Image tmp = img;
  if (kw > 1) {
    const auto w = make_kernel(kw);
    const int r = kw / 2;
    Image dst(img.channels, img.height, img.width);
    for (int c = 0; c < img.channels; ++c)
      for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
          double acc = 0.0;
          for (int i = 0; i < kw; ++i)
            acc += w[i] *
                   tmp.at(c, y, detail::reflect_index(x + i - r, img.width));
          dst.at(c, y, x) = static_cast<float>(acc);
        }
    tmp = std::move(dst);
  }
  if (kh > 1) {
    const auto w = make_kernel(kh);
    const int r = kh / 2;
    Image dst(img.channels, img.height, img.width);
    for (int c = 0; c < img.channels; ++c)
      for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
          double acc = 0.0;
          for (int i = 0; i < kh; ++i)
            acc += w[i] *
                   tmp.at(c, detail::reflect_index(y + i - r, img.height), x);
          dst.at(c, y, x) = static_cast<float>(acc);
        }
    tmp = std::move(dst);
  }
  for (float& v : tmp.pixels) v = clamp01(v);
  return tmp;
}

}  // namespace yoco
