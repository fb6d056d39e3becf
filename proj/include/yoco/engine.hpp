#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "yoco/augment.hpp"
#include "yoco/mix.hpp"
#include "yoco/rng.hpp"

namespace yoco {

/// Cut-once configuration. Single mode draws one uniform; values at or below
/// 0.5 cut across the height, above it across the width. Grid mode cuts each
/// dimension a fixed number of times. Positions come from the midpoint rule
/// or from Beta(alpha, alpha) draws.
struct YocoConfig {
  enum class Mode { Single, Grid };
  enum class Position { Half, Beta };

  bool enabled = true;
  Mode mode = Mode::Single;
  Position position = Position::Half;
  int cuts_height = 1;  // grid mode only
  int cuts_width = 0;   // grid mode only
  double beta_alpha = 1.0;
};

/// Interior cut coordinates per dimension, strictly increasing.
struct PieceLayout {
  std::vector<int> h_positions;
  std::vector<int> w_positions;

  int rows() const { return static_cast<int>(h_positions.size()) + 1; }
  int cols() const { return static_cast<int>(w_positions.size()) + 1; }
  int piece_count() const { return rows() * cols(); }
};

inline Dim choose_dimension(double p) {
  return p <= 0.5 ? Dim::Height : Dim::Width;
}

namespace detail {

inline void validate_yoco(const YocoConfig& cfg) {
  if (cfg.cuts_height < 0 || cfg.cuts_width < 0)
    throw Error(Errc::InvalidParameter, "negative cut count");
  if (cfg.mode == YocoConfig::Mode::Grid && cfg.cuts_height == 0 &&
      cfg.cuts_width == 0)
    throw Error(Errc::InvalidLayout, "grid mode enabled with no cuts");
  if (cfg.position == YocoConfig::Position::Beta && !(cfg.beta_alpha > 0.0))
    throw Error(Errc::InvalidParameter, "beta alpha must be positive");
}

inline int single_cut_position(int extent, const YocoConfig& cfg,
                               RngStream& stream) {
  if (cfg.position == YocoConfig::Position::Half) return extent / 2;
  const long pos = std::lround(extent * stream.beta(cfg.beta_alpha));
  return static_cast<int>(std::clamp(pos, 1L, static_cast<long>(extent - 1)));
}

inline std::vector<int> grid_positions(int extent, int cuts,
                                       const YocoConfig& cfg,
                                       RngStream& stream) {
  if (cuts == 0) return {};
  if (cuts > extent - 1)
    throw Error(Errc::InvalidLayout, "more cuts than interior positions");
  std::vector<int> pos(cuts);
  if (cfg.position == YocoConfig::Position::Half) {
    for (int k = 0; k < cuts; ++k)
      pos[k] = static_cast<int>(
          std::lround(static_cast<double>(extent) * (k + 1) / (cuts + 1)));
    return pos;
  }
  for (int k = 0; k < cuts; ++k) {
    const long p = std::lround(extent * stream.beta(cfg.beta_alpha));
    pos[k] =
        static_cast<int>(std::clamp(p, 1L, static_cast<long>(extent - 1)));
  }
  std::sort(pos.begin(), pos.end());
  // Nudge collisions upward, then pull anything pushed past the edge back.
  for (int k = 1; k < cuts; ++k) pos[k] = std::max(pos[k], pos[k - 1] + 1);
  for (int k = cuts - 1; k >= 0; --k)
    pos[k] = std::min(pos[k], extent - 1 - (cuts - 1 - k));
  return pos;
}

}  // namespace detail

/// Draw the cut layout. Single mode: one uniform picks the dimension (with a
/// fallback to the other when the pick cannot be cut), then the position rule
/// places one cut. Grid mode: height positions first, then width.
inline PieceLayout make_layout(int height, int width, const YocoConfig& cfg,
                               RngStream& stream) {
  detail::validate_yoco(cfg);
  PieceLayout layout;
  if (cfg.mode == YocoConfig::Mode::Single) {
    Dim dim = choose_dimension(stream.uniform());
    if (dim == Dim::Height && height < 2) dim = Dim::Width;
    if (dim == Dim::Width && width < 2 && height >= 2) dim = Dim::Height;
    const int extent = dim == Dim::Height ? height : width;
    if (extent < 2) throw Error(Errc::CannotCut, "image too small to cut");
    const int pos = detail::single_cut_position(extent, cfg, stream);
    (dim == Dim::Height ? layout.h_positions : layout.w_positions)
        .push_back(pos);
    return layout;
  }
  layout.h_positions =
      detail::grid_positions(height, cfg.cuts_height, cfg, stream);
  layout.w_positions =
      detail::grid_positions(width, cfg.cuts_width, cfg, stream);
  return layout;
}

inline PieceLayout make_layout(const Image& img, const YocoConfig& cfg,
                               RngStream& stream) {
  return make_layout(img.height, img.width, cfg, stream);
}

/// One piece's placement within the full image.
struct PieceRef {
  int y0 = 0, x0 = 0, height = 0, width = 0;
};

inline std::vector<PieceRef> layout_pieces(int height, int width,
                                           const PieceLayout& layout) {
  auto edges = [](int extent, const std::vector<int>& cuts) {
    std::vector<int> e;
    e.push_back(0);
    for (int c : cuts) {
      if (c <= e.back() || c >= extent)
        throw Error(Errc::InvalidLayout,
                    "cut positions must be interior and increasing");
      e.push_back(c);
    }
    e.push_back(extent);
    return e;
  };
  const auto ye = edges(height, layout.h_positions);
  const auto xe = edges(width, layout.w_positions);
  std::vector<PieceRef> pieces;
  pieces.reserve((ye.size() - 1) * (xe.size() - 1));
  for (std::size_t r = 0; r + 1 < ye.size(); ++r)
    for (std::size_t c = 0; c + 1 < xe.size(); ++c)
      pieces.push_back({ye[r], xe[c], ye[r + 1] - ye[r], xe[c + 1] - xe[c]});
  return pieces;
}

enum class YocoOutcome { Untouched, PartiallyAugmented, FullyAugmented };

inline YocoOutcome outcome_from_counts(int augmented, int total) {
  if (augmented == 0) return YocoOutcome::Untouched;
  if (augmented == total) return YocoOutcome::FullyAugmented;
  return YocoOutcome::PartiallyAugmented;
}

/// Classify a cut augmentation by looking at the pixels: a piece counts as
/// augmented only if some pixel actually changed, so ops that fired but acted
/// as identities read as untouched.
inline YocoOutcome classify_outcome(const Image& original,
                                    const Image& augmented,
                                    const PieceLayout& layout) {
  if (!original.same_shape(augmented))
    throw Error(Errc::InvalidComparison, "classify_outcome shape mismatch");
  const auto pieces = layout_pieces(original.height, original.width, layout);
  int changed = 0;
  for (const PieceRef& ref : pieces) {
    bool differs = false;
    for (int c = 0; c < original.channels && !differs; ++c)
      for (int y = ref.y0; y < ref.y0 + ref.height && !differs; ++y)
        for (int x = ref.x0; x < ref.x0 + ref.width; ++x)
          if (original.at(c, y, x) != augmented.at(c, y, x)) {
            differs = true;
            break;
          }
    if (differs) ++changed;
  }
  return outcome_from_counts(changed, static_cast<int>(pieces.size()));
}

inline YocoOutcome classify_outcome(const Image& original,
                                    const Image& augmented,
                                    const CutSpec& cut) {
  PieceLayout layout;
  (cut.dimension == Dim::Height ? layout.h_positions : layout.w_positions)
      .push_back(cut.position);
  return classify_outcome(original, augmented, layout);
}

struct YocoResult {
  Sample sample;
  PieceLayout layout;
  YocoOutcome outcome = YocoOutcome::Untouched;  // per-piece gate bookkeeping
  int pieces_augmented = 0;
  int piece_count = 0;
};

namespace detail {

inline void validate_ops(const std::vector<AugmentOp>& ops) {
  for (std::size_t i = 0; i < ops.size(); ++i)
    if (is_mix_op(ops[i].kind) && i + 1 != ops.size())
      throw Error(Errc::InvalidMix, "mix op must be the last pipeline step");
}

/// Run the full op sequence on one piece with one stream. Mix ops blend
/// against the partner's aligned piece; the returned weight is the effective
/// weight kept on the original label for this piece.
struct PieceOutcome {
  Image image;
  bool any_fired = false;
  double weight = 1.0;
};

inline PieceOutcome run_piece(const Image& piece, const Image* partner_piece,
                              const std::vector<AugmentOp>& ops,
                              RngStream& stream) {
  PieceOutcome out{piece};
  for (const AugmentOp& op : ops) {
    if (!gate(op, stream)) continue;
    out.any_fired = true;
    if (!is_mix_op(op.kind)) {
      out.image = apply_op(out.image, op, stream);
      continue;
    }
    if (!partner_piece)
      throw Error(Errc::InvalidMix, "mix op without a partner sample");
    const double lambda = stream.beta(op.mix_alpha);
    if (op.kind == OpKind::Mixup) {
      out.image = mixup_image(out.image, *partner_piece, lambda);
      out.weight = lambda;
    } else {
      const int cy = static_cast<int>(stream.below(out.image.height));
      const int cx = static_cast<int>(stream.below(out.image.width));
      const PatchRect r =
          cutmix_rect(out.image.height, out.image.width, lambda, cy, cx);
      paste_patch(out.image, *partner_piece, r);
      out.weight = 1.0 - static_cast<double>(r.pixel_count()) /
                             (static_cast<double>(out.image.height) *
                              out.image.width);
    }
  }
  return out;
}

}  // namespace detail

/// Piece-wise augmentation over a fixed layout. Piece k (row-major) draws
/// from the child stream split(k); the parent stream is not consumed here.
/// With a mix op present the partner is cut identically, its pieces are used
/// raw, and the final label mixes by the area-weighted sum of per-piece
/// effective weights.
inline YocoResult yoco_augment_with_layout(const Sample& s,
                                           const std::vector<AugmentOp>& ops,
                                           const Sample* partner,
                                           const PieceLayout& layout,
                                           const RngStream& stream) {
  detail::validate_ops(ops);
  if (partner) check_mixable(s, *partner);
  const auto pieces = layout_pieces(s.image.height, s.image.width, layout);
  YocoResult result;
  result.layout = layout;
  result.piece_count = static_cast<int>(pieces.size());
  result.sample.image = Image(s.image.channels, s.image.height, s.image.width);
  result.sample.label = s.label;

  const double total_area = static_cast<double>(s.image.height) * s.image.width;
  double own_weight = 0.0;
  bool mixed = false;
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    const PieceRef& ref = pieces[k];
    const Image piece = crop(s.image, ref.y0, ref.x0, ref.height, ref.width);
    Image partner_piece;
    if (partner)
      partner_piece =
          crop(partner->image, ref.y0, ref.x0, ref.height, ref.width);
    RngStream child = stream.split(k);
    const auto piece_out = detail::run_piece(
        piece, partner ? &partner_piece : nullptr, ops, child);
    paste(result.sample.image, piece_out.image, ref.y0, ref.x0);
    if (piece_out.any_fired) ++result.pieces_augmented;
    const double area_frac =
        static_cast<double>(ref.height) * ref.width / total_area;
    own_weight += area_frac * piece_out.weight;
    if (piece_out.weight < 1.0) mixed = true;
  }
  result.outcome =
      outcome_from_counts(result.pieces_augmented, result.piece_count);
  if (partner && mixed)
    result.sample.label = mix_labels(s.label, partner->label, own_weight);
  return result;
}

/// Full engine entry. With the engine disabled the ops run once over the
/// whole image on the given stream. Enabled, the layout draws come from the
/// stream and every piece runs on its own child stream.
inline YocoResult yoco_augment(const Sample& s,
                               const std::vector<AugmentOp>& ops,
                               const Sample* partner, const YocoConfig& cfg,
                               RngStream& stream) {
  detail::validate_ops(ops);
  if (!cfg.enabled) {
    if (partner) check_mixable(s, *partner);
    YocoResult result;
    result.piece_count = 1;
    const auto piece_out = detail::run_piece(
        s.image, partner ? &partner->image : nullptr, ops, stream);
    result.sample.image = piece_out.image;
    result.sample.label = s.label;
    if (partner && piece_out.weight < 1.0)
      result.sample.label =
          mix_labels(s.label, partner->label, piece_out.weight);
    result.pieces_augmented = piece_out.any_fired ? 1 : 0;
    result.outcome =
        outcome_from_counts(result.pieces_augmented, result.piece_count);
    return result;
  }
  const PieceLayout layout =
      make_layout(s.image.height, s.image.width, cfg, stream);
  return yoco_augment_with_layout(s, ops, partner, layout, stream);
}

/// Label-free canonical entry.
inline Image yoco_apply(const Image& img, const std::vector<AugmentOp>& ops,
                        const YocoConfig& cfg, RngStream& stream) {
  Sample s;
  s.image = img;
  return yoco_augment(s, ops, nullptr, cfg, stream).sample.image;
}

/// Label-free grid entry over an explicit layout.
inline Image yoco_apply_grid(const Image& img,
                             const std::vector<AugmentOp>& ops,
                             const PieceLayout& layout,
                             const RngStream& stream) {
  Sample s;
  s.image = img;
  return yoco_augment_with_layout(s, ops, nullptr, layout, stream)
      .sample.image;
}

/// Cut-once mixing: both samples are cut identically, every piece mixes
/// against the partner's aligned piece with its own draw, and the label is
/// the area-weighted blend.
inline YocoResult yoco_mix(const Sample& s, const Sample& partner, OpKind kind,
                           const YocoConfig& cfg, RngStream& stream) {
  if (!is_mix_op(kind)) throw Error(Errc::InvalidMix, "yoco_mix needs a mix op");
  std::vector<AugmentOp> ops{kind == OpKind::Mixup ? AugmentOp::mixup()
                                                   : AugmentOp::cutmix()};
  return yoco_augment(s, ops, &partner, cfg, stream);
}

}  // namespace yoco
