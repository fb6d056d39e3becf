#pragma once

#include <array>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "yoco/rng.hpp"
#include "yoco/transforms.hpp"

namespace yoco {

enum class PolicyOpKind {
  Identity,
  AutoContrast,
  Equalize,
  Invert,
  Rotate,
  Posterize,
  Solarize,
  Color,
  Contrast,
  Brightness,
  Sharpness,
  ShearX,
  ShearY,
  TranslateX,
  TranslateY,
};

inline std::string_view policy_op_name(PolicyOpKind k) {
  switch (k) {
    case PolicyOpKind::Identity: return "Identity";
    case PolicyOpKind::AutoContrast: return "AutoContrast";
    case PolicyOpKind::Equalize: return "Equalize";
    case PolicyOpKind::Invert: return "Invert";
    case PolicyOpKind::Rotate: return "Rotate";
    case PolicyOpKind::Posterize: return "Posterize";
    case PolicyOpKind::Solarize: return "Solarize";
    case PolicyOpKind::Color: return "Color";
    case PolicyOpKind::Contrast: return "Contrast";
    case PolicyOpKind::Brightness: return "Brightness";
    case PolicyOpKind::Sharpness: return "Sharpness";
    case PolicyOpKind::ShearX: return "ShearX";
    case PolicyOpKind::ShearY: return "ShearY";
    case PolicyOpKind::TranslateX: return "TranslateX";
    case PolicyOpKind::TranslateY: return "TranslateY";
  }
  return "?";
}

inline std::optional<PolicyOpKind> parse_policy_op_name(std::string_view s) {
  static constexpr std::array<PolicyOpKind, 15> kAll = {
      PolicyOpKind::Identity,   PolicyOpKind::AutoContrast,
      PolicyOpKind::Equalize,   PolicyOpKind::Invert,
      PolicyOpKind::Rotate,     PolicyOpKind::Posterize,
      PolicyOpKind::Solarize,   PolicyOpKind::Color,
      PolicyOpKind::Contrast,   PolicyOpKind::Brightness,
      PolicyOpKind::Sharpness,  PolicyOpKind::ShearX,
      PolicyOpKind::ShearY,     PolicyOpKind::TranslateX,
      PolicyOpKind::TranslateY,
  };
  for (PolicyOpKind k : kAll)
    if (policy_op_name(k) == s) return k;
  return std::nullopt;
}

inline bool policy_op_has_magnitude(PolicyOpKind k) {
  switch (k) {
    case PolicyOpKind::Identity:
    case PolicyOpKind::AutoContrast:
    case PolicyOpKind::Equalize:
    case PolicyOpKind::Invert:
      return false;
    default:
      return true;
  }
}

inline bool policy_op_signed(PolicyOpKind k) {
  switch (k) {
    case PolicyOpKind::Rotate:
    case PolicyOpKind::Color:
    case PolicyOpKind::Contrast:
    case PolicyOpKind::Brightness:
    case PolicyOpKind::Sharpness:
    case PolicyOpKind::ShearX:
    case PolicyOpKind::ShearY:
    case PolicyOpKind::TranslateX:
    case PolicyOpKind::TranslateY:
      return true;
    default:
      return false;
  }
}

/// Map a discrete magnitude level to the op's parameter value. `bins` is the
/// size of the level grid (10 for learned policies, 31 for the random policy);
/// levels run 0..bins-1 and the top level hits the maximum strength.
inline double policy_magnitude_value(PolicyOpKind k, int level, int bins,
                                     int height, int width) {
  if (bins < 2) throw Error(Errc::InvalidParameter, "magnitude bins < 2");
  if (level < 0 || level >= bins)
    throw Error(Errc::InvalidParameter, "magnitude level out of range");
  const double t = static_cast<double>(level) / (bins - 1);
  switch (k) {
    case PolicyOpKind::ShearX:
    case PolicyOpKind::ShearY:
      return 0.3 * t;
    case PolicyOpKind::TranslateX:
      return 150.0 / 331.0 * width * t;
    case PolicyOpKind::TranslateY:
      return 150.0 / 331.0 * height * t;
    case PolicyOpKind::Rotate:
      return 30.0 * t;
    case PolicyOpKind::Color:
    case PolicyOpKind::Contrast:
    case PolicyOpKind::Brightness:
    case PolicyOpKind::Sharpness:
      return 0.9 * t;
    case PolicyOpKind::Posterize:
      return 8.0 - std::lround(4.0 * t);
    case PolicyOpKind::Solarize:
      return 1.0 - t;
    default:
      return 0.0;
  }
}

/// Apply one policy op with an already-resolved (possibly negated) value.
inline Image apply_policy_op(const Image& img, PolicyOpKind k, double value) {
  switch (k) {
    case PolicyOpKind::Identity: return img;
    case PolicyOpKind::AutoContrast: return auto_contrast(img);
    case PolicyOpKind::Equalize: return equalize(img);
    case PolicyOpKind::Invert: return invert(img);
    case PolicyOpKind::Rotate: return rotate_deg(img, value);
    case PolicyOpKind::Posterize:
      return posterize(img, static_cast<int>(value));
    case PolicyOpKind::Solarize: return solarize(img, value);
    case PolicyOpKind::Color: return adjust_saturation(img, 1.0 + value);
    case PolicyOpKind::Contrast: return adjust_contrast(img, 1.0 + value);
    case PolicyOpKind::Brightness: return adjust_brightness(img, 1.0 + value);
    case PolicyOpKind::Sharpness: return adjust_sharpness(img, 1.0 + value);
    case PolicyOpKind::ShearX: return shear_x(img, value);
    case PolicyOpKind::ShearY: return shear_y(img, value);
    case PolicyOpKind::TranslateX: return translate_x(img, value);
    case PolicyOpKind::TranslateY: return translate_y(img, value);
  }
  throw Error(Errc::InvalidParameter, "unknown policy op");
}

/// One stochastic op inside a sub-policy. `magnitude` is a level on the
/// 10-bin grid, or -1 for ops that take none.
struct PolicyOp {
  PolicyOpKind kind = PolicyOpKind::Identity;
  double probability = 1.0;
  int magnitude = -1;
};

struct SubPolicy {
  PolicyOp first;
  PolicyOp second;
};

/// A learned augmentation policy: a uniform choice over sub-policies, each a
/// pair of probabilistic ops applied in order.
struct AutoAugPolicy {
  std::string name;
  std::vector<SubPolicy> sub_policies;
};

inline constexpr int kAutoAugBins = 10;
inline constexpr int kRandAugBins = 31;
inline constexpr int kSubPolicyCount = 25;

namespace detail {

inline PolicyOp parse_policy_entry(std::string_view text, int line_no) {
  auto fail = [&](const std::string& what) -> Error {
    std::ostringstream os;
    os << "policy line " << line_no << ": " << what;
    return Error(Errc::PolicyParse, os.str());
  };
  std::array<std::string, 3> field;
  std::size_t start = 0;
  for (int i = 0; i < 3; ++i) {
    const std::size_t comma = text.find(',', start);
    if (i < 2 && comma == std::string_view::npos)
      throw fail("expected op,probability,magnitude");
    const std::size_t end = i < 2 ? comma : text.size();
    field[i] = std::string(text.substr(start, end - start));
    start = end + 1;
  }
  if (text.find(',', start) != std::string_view::npos)
    throw fail("too many fields");
  auto trim = [](std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    s = b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  for (auto& f : field) trim(f);
  PolicyOp op;
  const auto kind = parse_policy_op_name(field[0]);
  if (!kind) throw fail("unknown op '" + field[0] + "'");
  op.kind = *kind;
  try {
    std::size_t used = 0;
    op.probability = std::stod(field[1], &used);
    if (used != field[1].size()) throw std::invalid_argument(field[1]);
  } catch (const std::exception&) {
    throw fail("bad probability '" + field[1] + "'");
  }
  if (op.probability < 0.0 || op.probability > 1.0)
    throw fail("probability outside [0,1]");
  if (field[2] == "-") {
    if (policy_op_has_magnitude(op.kind))
      throw fail(std::string(policy_op_name(op.kind)) + " needs a magnitude");
    op.magnitude = -1;
  } else {
    if (!policy_op_has_magnitude(op.kind))
      throw fail(std::string(policy_op_name(op.kind)) + " takes no magnitude");
    try {
      std::size_t used = 0;
      op.magnitude = std::stoi(field[2], &used);
      if (used != field[2].size()) throw std::invalid_argument(field[2]);
    } catch (const std::exception&) {
      throw fail("bad magnitude '" + field[2] + "'");
    }
    if (op.magnitude < 0 || op.magnitude >= kAutoAugBins)
      throw fail("magnitude outside 0..9");
  }
  return op;
}

}  // namespace detail

/// Parse a policy from text: one sub-policy per line, formatted
/// `op,prob,mag;op,prob,mag` with `-` for magnitude-free ops. Blank lines and
/// `#` comments are skipped. Exactly 25 sub-policies are required.
inline AutoAugPolicy parse_autoaug_policy(std::istream& in,
                                          const std::string& name) {
  AutoAugPolicy policy;
  policy.name = name;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    const auto e = line.find_last_not_of(" \t\r");
    const std::string_view body(line.data() + b, e - b + 1);
    const std::size_t semi = body.find(';');
    if (semi == std::string_view::npos || body.find(';', semi + 1) !=
                                              std::string_view::npos) {
      std::ostringstream os;
      os << "policy line " << line_no << ": expected exactly two entries";
      throw Error(Errc::PolicyParse, os.str());
    }
    SubPolicy sp;
    sp.first = detail::parse_policy_entry(body.substr(0, semi), line_no);
    sp.second = detail::parse_policy_entry(body.substr(semi + 1), line_no);
    policy.sub_policies.push_back(sp);
  }
  if (policy.sub_policies.size() != kSubPolicyCount) {
    std::ostringstream os;
    os << "policy '" << name << "' has " << policy.sub_policies.size()
       << " sub-policies, expected " << kSubPolicyCount;
    throw Error(Errc::PolicyParse, os.str());
  }
  return policy;
}

/// Directory searched for `*.policy` files: explicit override, then the
/// YOCO_AUG_POLICY_DIR environment variable, then the build-time default.
inline std::filesystem::path policy_dir(
    const std::optional<std::filesystem::path>& override_dir = std::nullopt) {
  if (override_dir) return *override_dir;
  if (const char* env = std::getenv("YOCO_AUG_POLICY_DIR"); env && *env)
    return std::filesystem::path(env);
#ifdef YOCO_DEFAULT_POLICY_DIR
  return std::filesystem::path(YOCO_DEFAULT_POLICY_DIR);
#else
  return std::filesystem::path("data");
#endif
}

inline AutoAugPolicy load_autoaug_policy(
    const std::string& name,
    const std::optional<std::filesystem::path>& override_dir = std::nullopt) {
  const auto path = policy_dir(override_dir) / ("autoaug_" + name + ".policy");
  std::ifstream in(path);
  if (!in)
    throw Error(Errc::Io, "cannot open policy file " + path.string());
  return parse_autoaug_policy(in, name);
}

/// Draw protocol: one bounded int picks the sub-policy, then per op a gate
/// draw, followed by one sign draw when the op is signed and actually fires.
inline Image apply_autoaug(const Image& img, const AutoAugPolicy& policy,
                           RngStream& stream) {
  if (policy.sub_policies.empty())
    throw Error(Errc::PolicyParse, "empty policy");
  const auto idx = stream.below(policy.sub_policies.size());
  const SubPolicy& sp = policy.sub_policies[idx];
  Image out = img;
  for (const PolicyOp* op : {&sp.first, &sp.second}) {
    if (!stream.bernoulli(op->probability)) continue;
    double value = 0.0;
    if (policy_op_has_magnitude(op->kind)) {
      value = policy_magnitude_value(op->kind, op->magnitude, kAutoAugBins,
                                     img.height, img.width);
      if (policy_op_signed(op->kind) && stream.bernoulli(0.5)) value = -value;
    }
    out = apply_policy_op(out, op->kind, value);
  }
  return out;
}

struct RandAugParams {
  int num_ops = 2;
  int magnitude = 9;  // level on the 31-bin grid
};

inline constexpr std::array<PolicyOpKind, 14> kRandAugOps = {
    PolicyOpKind::Identity,   PolicyOpKind::AutoContrast,
    PolicyOpKind::Equalize,   PolicyOpKind::Rotate,
    PolicyOpKind::Solarize,   PolicyOpKind::Color,
    PolicyOpKind::Posterize,  PolicyOpKind::Contrast,
    PolicyOpKind::Brightness, PolicyOpKind::Sharpness,
    PolicyOpKind::ShearX,     PolicyOpKind::ShearY,
    PolicyOpKind::TranslateX, PolicyOpKind::TranslateY,
};

/// Draw protocol: per op one bounded int chooses the kind, then one sign draw
/// when the kind is signed.
inline Image apply_randaug(const Image& img, const RandAugParams& params,
                           RngStream& stream) {
  if (params.num_ops < 0)
    throw Error(Errc::InvalidParameter, "negative op count");
  if (params.magnitude < 0 || params.magnitude >= kRandAugBins)
    throw Error(Errc::InvalidParameter, "magnitude outside 0..30");
  Image out = img;
  for (int i = 0; i < params.num_ops; ++i) {
    const PolicyOpKind kind = kRandAugOps[stream.below(kRandAugOps.size())];
    double value = 0.0;
    if (policy_op_has_magnitude(kind)) {
      value = policy_magnitude_value(kind, params.magnitude, kRandAugBins,
                                     img.height, img.width);
      if (policy_op_signed(kind) && stream.bernoulli(0.5)) value = -value;
    }
    out = apply_policy_op(out, kind, value);
  }
  return out;
}

}  // namespace yoco
