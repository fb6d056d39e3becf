#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "yoco/dataset.hpp"
#include "yoco/engine.hpp"

namespace yoco {

/// An ordered augmentation program plus the cut configuration. At most one
/// mix op is allowed and it must come last (it needs a partner sample).
struct Pipeline {
  std::vector<AugmentOp> ops;
  YocoConfig yoco{.enabled = false};
  std::size_t mix_batch_size = 256;  // partner pool for mix ops
  OutputFormat output_format = OutputFormat::Png;

  bool has_mix() const {
    for (const auto& op : ops)
      if (is_mix_op(op.kind)) return true;
    return false;
  }
};

namespace detail {

using json = nlohmann::json;

inline Error config_error(const std::string& what) {
  return Error(Errc::Config, "config: " + what);
}

inline void require_keys(const json& obj, const std::string& where,
                         std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool ok = false;
    for (const char* k : allowed)
      if (item.key() == k) {
        ok = true;
        break;
      }
    if (!ok) throw config_error("unknown key '" + item.key() + "' in " + where);
  }
}

inline double get_number(const json& obj, const char* key, double fallback,
                         double lo, double hi, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number())
    throw config_error(std::string(key) + " must be a number in " + where);
  const double v = obj[key].get<double>();
  if (v < lo || v > hi) {
    std::ostringstream os;
    os << where << ": " << key << " = " << v << " outside [" << lo << ", "
       << hi << "]";
    throw config_error(os.str());
  }
  return v;
}

inline std::pair<double, double> get_range(const json& obj, const char* key,
                                           std::pair<double, double> fallback,
                                           const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj[key];
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    throw config_error(std::string(key) + " must be [lo, hi] in " + where);
  const double lo = v[0].get<double>();
  const double hi = v[1].get<double>();
  if (hi < lo) throw config_error(std::string(key) + " has hi < lo in " + where);
  return {lo, hi};
}

inline AugmentOp parse_op(const json& obj, std::size_t index,
                          const std::optional<std::filesystem::path>& dir) {
  std::ostringstream ws;
  ws << "ops[" << index << "]";
  const std::string where = ws.str();
  if (!obj.is_object()) throw config_error(where + " must be an object");
  if (!obj.contains("kind") || !obj["kind"].is_string())
    throw config_error(where + " needs a string 'kind'");
  const std::string kind = obj["kind"].get<std::string>();

  AugmentOp op;
  if (kind == "horizontal-flip") {
    require_keys(obj, where, {"kind", "probability"});
    op = AugmentOp::horizontal_flip();
  } else if (kind == "vertical-flip") {
    require_keys(obj, where, {"kind", "probability"});
    op = AugmentOp::vertical_flip();
  } else if (kind == "color-jitter") {
    require_keys(obj, where,
                 {"kind", "probability", "brightness", "contrast",
                  "saturation", "hue"});
    JitterParams p;
    p.brightness = get_number(obj, "brightness", p.brightness, 0.0, 1.0, where);
    p.contrast = get_number(obj, "contrast", p.contrast, 0.0, 1.0, where);
    p.saturation = get_number(obj, "saturation", p.saturation, 0.0, 1.0, where);
    p.hue = get_number(obj, "hue", p.hue, 0.0, 0.5, where);
    op = AugmentOp::color_jitter(p);
  } else if (kind == "gaussian-blur") {
    require_keys(obj, where, {"kind", "probability", "sigma"});
    BlurParams p;
    std::tie(p.sigma_lo, p.sigma_hi) =
        get_range(obj, "sigma", {p.sigma_lo, p.sigma_hi}, where);
    if (!(p.sigma_lo > 0.0))
      throw config_error(where + ": sigma range must be positive");
    op = AugmentOp::gaussian_blur(p);
  } else if (kind == "random-erasing") {
    require_keys(obj, where,
                 {"kind", "probability", "scale", "ratio", "value", "attempts"});
    ErasingParams p;
    std::tie(p.scale_lo, p.scale_hi) =
        get_range(obj, "scale", {p.scale_lo, p.scale_hi}, where);
    std::tie(p.ratio_lo, p.ratio_hi) =
        get_range(obj, "ratio", {p.ratio_lo, p.ratio_hi}, where);
    if (!(p.scale_lo > 0.0) || p.scale_hi > 1.0)
      throw config_error(where + ": scale range must lie in (0,1]");
    if (!(p.ratio_lo > 0.0))
      throw config_error(where + ": ratio range must be positive");
    p.value = static_cast<float>(get_number(obj, "value", 0.0, 0.0, 1.0, where));
    p.attempts = static_cast<int>(
        get_number(obj, "attempts", p.attempts, 1, 1000, where));
    op = AugmentOp::random_erasing(p);
  } else if (kind == "cutout") {
    require_keys(obj, where, {"kind", "probability", "fraction"});
    const double f = get_number(obj, "fraction", 0.25, 0.0, 1.0, where);
    if (!(f > 0.0)) throw config_error(where + ": fraction must be positive");
    op = AugmentOp::cutout(f);
  } else if (kind == "autoaug") {
    require_keys(obj, where, {"kind", "probability", "policy"});
    std::string name = "cifar10";
    if (obj.contains("policy")) {
      if (!obj["policy"].is_string())
        throw config_error(where + ": policy must be a string");
      name = obj["policy"].get<std::string>();
    }
    if (name != "cifar10" && name != "imagenet")
      throw config_error(where + ": policy must be cifar10 or imagenet");
    op = AugmentOp::autoaug(
        std::make_shared<AutoAugPolicy>(load_autoaug_policy(name, dir)));
  } else if (kind == "randaug") {
    require_keys(obj, where, {"kind", "probability", "num_ops", "magnitude"});
    RandAugParams p;
    p.num_ops =
        static_cast<int>(get_number(obj, "num_ops", p.num_ops, 0, 16, where));
    p.magnitude = static_cast<int>(get_number(obj, "magnitude", p.magnitude,
                                              0, kRandAugBins - 1, where));
    op = AugmentOp::randaug(p);
  } else if (kind == "mixup" || kind == "cutmix") {
    require_keys(obj, where, {"kind", "probability", "alpha"});
    const double alpha = get_number(obj, "alpha", 1.0, 1e-9, 1e9, where);
    op = kind == "mixup" ? AugmentOp::mixup(alpha) : AugmentOp::cutmix(alpha);
  } else {
    throw config_error(where + ": unknown op kind '" + kind + "'");
  }
  op.probability = get_number(obj, "probability", op.probability, 0.0, 1.0,
                              where);
  return op;
}

inline YocoConfig parse_yoco(const json& obj) {
  require_keys(obj, "yoco",
               {"enabled", "mode", "position", "beta_alpha", "cuts_height",
                "cuts_width"});
  YocoConfig cfg;
  cfg.enabled = true;
  if (obj.contains("enabled")) {
    if (!obj["enabled"].is_boolean())
      throw config_error("yoco.enabled must be a boolean");
    cfg.enabled = obj["enabled"].get<bool>();
  }
  if (obj.contains("mode")) {
    const std::string m = obj["mode"].is_string()
                              ? obj["mode"].get<std::string>()
                              : std::string();
    if (m == "single")
      cfg.mode = YocoConfig::Mode::Single;
    else if (m == "grid")
      cfg.mode = YocoConfig::Mode::Grid;
    else
      throw config_error("yoco.mode must be single or grid");
  }
  if (obj.contains("position")) {
    const std::string p = obj["position"].is_string()
                              ? obj["position"].get<std::string>()
                              : std::string();
    if (p == "half")
      cfg.position = YocoConfig::Position::Half;
    else if (p == "beta")
      cfg.position = YocoConfig::Position::Beta;
    else
      throw config_error("yoco.position must be half or beta");
  }
  cfg.beta_alpha =
      get_number(obj, "beta_alpha", cfg.beta_alpha, 1e-9, 1e9, "yoco");
  cfg.cuts_height = static_cast<int>(
      get_number(obj, "cuts_height", cfg.cuts_height, 0, 1 << 20, "yoco"));
  cfg.cuts_width = static_cast<int>(
      get_number(obj, "cuts_width", cfg.cuts_width, 0, 1 << 20, "yoco"));
  if (cfg.mode == YocoConfig::Mode::Grid && cfg.cuts_height == 0 &&
      cfg.cuts_width == 0)
    throw config_error("yoco grid mode needs at least one cut");
  return cfg;
}

}  // namespace detail

/// Parse and validate a pipeline config (JSON). Unknown keys anywhere are
/// errors. AutoAug policies resolve against `policy_dir` (or the environment
/// default) at parse time so bad policies fail here, not mid-run.
inline Pipeline parse_config(
    const std::string& text,
    const std::optional<std::filesystem::path>& policy_dir = std::nullopt) {
  detail::json root;
  try {
    root = detail::json::parse(text);
  } catch (const detail::json::parse_error& e) {
    throw detail::config_error(e.what());
  }
  if (!root.is_object()) throw detail::config_error("top level must be an object");
  detail::require_keys(root, "top level",
                       {"ops", "yoco", "mix_batch_size", "output_format"});
  Pipeline p;
  if (root.contains("ops")) {
    if (!root["ops"].is_array())
      throw detail::config_error("ops must be an array");
    std::size_t i = 0;
    for (const auto& op : root["ops"])
      p.ops.push_back(detail::parse_op(op, i++, policy_dir));
  }
  std::size_t mix_count = 0;
  for (std::size_t i = 0; i < p.ops.size(); ++i)
    if (is_mix_op(p.ops[i].kind)) {
      ++mix_count;
      if (i + 1 != p.ops.size())
        throw detail::config_error("mix ops must be the last pipeline step");
    }
  if (mix_count > 1)
    throw detail::config_error("at most one mix op per pipeline");
  if (root.contains("yoco")) {
    if (!root["yoco"].is_object())
      throw detail::config_error("yoco must be an object");
    p.yoco = detail::parse_yoco(root["yoco"]);
  }
  p.mix_batch_size = static_cast<std::size_t>(detail::get_number(
      root, "mix_batch_size", static_cast<double>(p.mix_batch_size), 1, 1e9,
      "top level"));
  if (root.contains("output_format")) {
    const std::string f = root["output_format"].is_string()
                              ? root["output_format"].get<std::string>()
                              : std::string();
    if (f == "png")
      p.output_format = OutputFormat::Png;
    else if (f == "cifar-bin")
      p.output_format = OutputFormat::CifarBin;
    else
      throw detail::config_error("output_format must be png or cifar-bin");
  }
  return p;
}

inline Pipeline load_pipeline(
    const std::filesystem::path& file,
    const std::optional<std::filesystem::path>& policy_dir = std::nullopt) {
  std::ifstream in(file);
  if (!in) throw Error(Errc::Io, "cannot open config " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), policy_dir);
}

/// Everything one augmentation run needs; the persisted run record mirrors
/// this plus the tool version.
struct RunConfig {
  DatasetSource source;
  std::filesystem::path output_dir;
  Pipeline pipeline;
  std::uint64_t seed = 0;
  std::optional<std::size_t> sample_limit;
  std::size_t workers = 1;
  std::string config_text;  // original config body, kept for the run record
};

}  // namespace yoco
