#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <numeric>
#include <string>
#include <vector>

#include "yoco/image.hpp"
#include "yoco/transforms.hpp"

namespace yoco {

inline Image center_crop(const Image& img, int h, int w) {
  if (img.height < h || img.width < w)
    throw Error(Errc::InvalidInput, "image smaller than crop");
  return crop(img, (img.height - h) / 2, (img.width - w) / 2, h, w);
}

/// Scale so the shorter side hits `target` (bilinear); already-matching
/// inputs pass through untouched.
inline Image resize_short_side(const Image& img, int target) {
  const int short_side = std::min(img.height, img.width);
  if (short_side == target) return img;
  if (img.height <= img.width) {
    const int w = static_cast<int>(std::lround(
        static_cast<double>(img.width) * target / img.height));
    return resize_bilinear(img, target, w);
  }
  const int h = static_cast<int>(
      std::lround(static_cast<double>(img.height) * target / img.width));
  return resize_bilinear(img, h, target);
}

inline constexpr int kCrop4Full = 448;
inline constexpr int kCrop4Piece = 224;

/// Partial-image protocol: center-crop to 448x448, split into the four
/// non-overlapping 224x224 corners, ordered tl, tr, bl, br. The caller
/// resizes the short side to 512 first (resize_short_side).
inline std::array<Image, 4> crop4(const Image& img) {
  if (img.height < kCrop4Full || img.width < kCrop4Full)
    throw Error(Errc::InvalidInput, "crop4 needs at least 448x448");
  const Image full = center_crop(img, kCrop4Full, kCrop4Full);
  return {crop(full, 0, 0, kCrop4Piece, kCrop4Piece),
          crop(full, 0, kCrop4Piece, kCrop4Piece, kCrop4Piece),
          crop(full, kCrop4Piece, 0, kCrop4Piece, kCrop4Piece),
          crop(full, kCrop4Piece, kCrop4Piece, kCrop4Piece, kCrop4Piece)};
}

struct PredictionRecord {
  double confidence = 0.0;
  bool correct = false;
};

struct BinSummary {
  std::size_t count = 0;
  double mean_confidence = 0.0;
  double accuracy = 0.0;
};

/// Equal-count bins by confidence rank (stable sort, ascending); when the
/// count does not divide evenly the lowest-confidence bins take the extras.
inline std::vector<BinSummary> adaptive_bins(
    const std::vector<PredictionRecord>& records, std::size_t bin_count) {
  if (records.empty())
    throw Error(Errc::InvalidInput, "no prediction records");
  if (bin_count < 1 || bin_count > records.size())
    throw Error(Errc::InvalidInput, "bin count outside 1..record count");
  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return records[a].confidence < records[b].confidence;
                   });
  const std::size_t base = records.size() / bin_count;
  const std::size_t extra = records.size() % bin_count;
  std::vector<BinSummary> bins;
  bins.reserve(bin_count);
  std::size_t off = 0;
  for (std::size_t b = 0; b < bin_count; ++b) {
    const std::size_t n = base + (b < extra ? 1 : 0);
    BinSummary s;
    s.count = n;
    double conf = 0.0;
    std::size_t correct = 0;
    for (std::size_t i = off; i < off + n; ++i) {
      conf += records[order[i]].confidence;
      correct += records[order[i]].correct ? 1 : 0;
    }
    s.mean_confidence = conf / static_cast<double>(n);
    s.accuracy = static_cast<double>(correct) / static_cast<double>(n);
    bins.push_back(s);
    off += n;
  }
  return bins;
}

/// sqrt of the count-weighted mean squared gap between per-bin mean
/// confidence and accuracy.
inline double rms_calibration_error(
    const std::vector<PredictionRecord>& records, std::size_t bin_count) {
  const auto bins = adaptive_bins(records, bin_count);
  const double n = static_cast<double>(records.size());
  double acc = 0.0;
  for (const BinSummary& b : bins) {
    const double gap = b.mean_confidence - b.accuracy;
    acc += static_cast<double>(b.count) / n * gap * gap;
  }
  return std::sqrt(acc);
}

/// Parse `confidence<TAB>correct` lines, correct in {0,1}. Any malformed
/// line aborts with its line number.
inline std::vector<PredictionRecord> parse_prediction_log(std::istream& in) {
  std::vector<PredictionRecord> records;
  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string& what) -> Error {
    return Error(Errc::Format,
                 "prediction log line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos)
      throw fail("expected confidence<TAB>correct");
    PredictionRecord r;
    try {
      std::size_t used = 0;
      r.confidence = std::stod(line.substr(0, tab), &used);
      if (used != tab) throw std::invalid_argument(line);
    } catch (const std::exception&) {
      throw fail("bad confidence value");
    }
    if (r.confidence < 0.0 || r.confidence > 1.0)
      throw fail("confidence outside [0,1]");
    const std::string c = line.substr(tab + 1);
    if (c == "0")
      r.correct = false;
    else if (c == "1")
      r.correct = true;
    else
      throw fail("correct flag must be 0 or 1");
    records.push_back(r);
  }
  return records;
}

}  // namespace yoco
