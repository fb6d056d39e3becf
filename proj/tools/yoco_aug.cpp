#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "yoco/yoco.hpp"

namespace {

yoco::DatasetFormat parse_input_format(const std::string& s) {
  if (s == "cifar10") return yoco::DatasetFormat::Cifar10;
  if (s == "cifar100") return yoco::DatasetFormat::Cifar100;
  return yoco::DatasetFormat::Folder;
}

std::uint64_t fresh_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

int cmd_augment(const std::string& input, const std::string& input_format,
                const std::string& output, const std::string& config,
                std::optional<std::uint64_t> seed, bool force_yoco,
                std::optional<std::size_t> limit, std::size_t workers) {
  yoco::RunConfig cfg;
  cfg.source.format = parse_input_format(input_format);
  cfg.source.root = input;
  cfg.output_dir = output;
  {
    std::ifstream in(config);
    if (!in) throw yoco::Error(yoco::Errc::Io, "cannot open config " + config);
    std::stringstream ss;
    ss << in.rdbuf();
    cfg.config_text = ss.str();
  }
  cfg.pipeline = yoco::parse_config(cfg.config_text);
  if (force_yoco) cfg.pipeline.yoco.enabled = true;
  cfg.seed = seed ? *seed : fresh_seed();
  cfg.sample_limit = limit;
  cfg.workers = workers;

  const yoco::AugmentReport report = yoco::run_augment(cfg);
  if (report.warnings > 0)
    std::cerr << "warning: " << report.warnings << " input problem(s) skipped\n";
  const double rate =
      report.seconds > 0.0 ? report.sample_count / report.seconds : 0.0;
  std::cout << "augmented " << report.sample_count << " sample(s) -> " << output
            << " (seed " << cfg.seed << ", " << std::fixed
            << std::setprecision(2) << report.seconds << " s, "
            << std::setprecision(0) << rate << " img/s)\n";
  return 0;
}

int cmd_preview(const std::string& input, const std::string& config,
                std::uint64_t seed, const std::string& out_dir) {
  const yoco::Pipeline pipe = yoco::load_pipeline(config);
  const auto files = yoco::run_preview(input, pipe, seed, out_dir);
  for (const auto& f : files) std::cout << f.string() << '\n';
  return 0;
}

int cmd_crop4(const std::string& input, const std::string& output) {
  const yoco::Crop4Report report = yoco::run_crop4(input, output);
  if (report.warnings > 0)
    std::cerr << "warning: " << report.warnings << " input(s) skipped\n";
  std::cout << "wrote " << report.outputs << " piece(s) from " << report.inputs
            << " input(s) -> " << output << '\n';
  return 0;
}

int cmd_calibration(const std::string& predictions, std::size_t bins) {
  const yoco::CalibrationReport report =
      yoco::run_calibration(predictions, bins);
  yoco::print_calibration(std::cout, report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic cut-once piece-wise image augmentation"};
  app.require_subcommand(1);

  auto* augment = app.add_subcommand("augment", "augment a dataset to disk");
  std::string a_input, a_format, a_output, a_config;
  std::optional<std::uint64_t> a_seed;
  bool a_yoco = false;
  std::optional<std::size_t> a_limit;
  std::size_t a_workers = 1;
  augment->add_option("--input", a_input, "dataset path")->required();
  augment->add_option("--input-format", a_format, "cifar10|cifar100|folder")
      ->required()
      ->check(CLI::IsMember({"cifar10", "cifar100", "folder"}));
  augment->add_option("--output", a_output, "output directory")->required();
  augment->add_option("--config", a_config, "pipeline config file")->required();
  augment->add_option("--seed", a_seed, "run seed (fresh if omitted)");
  augment->add_flag("--yoco", a_yoco, "force cut-once mode on");
  augment->add_option("--limit", a_limit, "process only the first N samples");
  augment->add_option("--workers", a_workers, "worker thread count");

  auto* preview = app.add_subcommand("preview", "write the 4-image preview");
  std::string p_input, p_config, p_out;
  std::uint64_t p_seed = 0;
  preview->add_option("--input", p_input, "image file")->required();
  preview->add_option("--config", p_config, "pipeline config file")->required();
  preview->add_option("--seed", p_seed, "run seed")->required();
  preview->add_option("--out", p_out, "output directory")->required();

  auto* crop4 = app.add_subcommand("crop4", "four-crop preprocessing");
  std::string c_input, c_output;
  crop4->add_option("--input", c_input, "input image directory")->required();
  crop4->add_option("--output", c_output, "output directory")->required();

  auto* calibration =
      app.add_subcommand("calibration", "RMS calibration error report");
  std::string m_pred;
  std::size_t m_bins = 15;
  calibration->add_option("--predictions", m_pred, "prediction log file")
      ->required();
  calibration->add_option("--bins", m_bins, "adaptive bin count");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(augment))
      return cmd_augment(a_input, a_format, a_output, a_config, a_seed, a_yoco,
                         a_limit, a_workers);
    if (app.got_subcommand(preview))
      return cmd_preview(p_input, p_config, p_seed, p_out);
    if (app.got_subcommand(crop4)) return cmd_crop4(c_input, c_output);
    if (app.got_subcommand(calibration)) return cmd_calibration(m_pred, m_bins);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
