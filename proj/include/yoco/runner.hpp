#pragma once

#include <atomic>
#include <chrono>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "yoco/dataset.hpp"
#include "yoco/engine.hpp"
#include "yoco/metrics.hpp"
#include "yoco/pipeline.hpp"

namespace yoco {

inline constexpr const char* kToolName = "yoco-aug";
inline constexpr const char* kToolVersion = "1.2.0";

namespace detail {

/// Index-parallel loop with a shared work counter. The first exception wins
/// and is rethrown on the caller's thread after join.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t workers, Fn&& fn) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

struct LoadedData {
  std::vector<Sample> samples;
  std::vector<std::string> names;
  int warnings = 0;
};

inline LoadedData load_source(const DatasetSource& src) {
  LoadedData data;
  if (src.format == DatasetFormat::Folder) {
    FolderData f = read_folder(src);
    data.samples = std::move(f.samples);
    data.names = std::move(f.names);
    data.warnings = f.warnings;
    return data;
  }
  data.samples = read_cifar(src);
  return data;
}

inline const char* format_name(DatasetFormat f) {
  switch (f) {
    case DatasetFormat::Cifar10: return "cifar10";
    case DatasetFormat::Cifar100: return "cifar100";
    default: return "folder";
  }
}

inline void write_run_record(const RunConfig& cfg) {
  nlohmann::json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["seed"] = cfg.seed;
  j["input"] = cfg.source.root.string();
  j["input_format"] = format_name(cfg.source.format);
  j["output"] = cfg.output_dir.string();
  j["workers"] = cfg.workers;
  if (cfg.sample_limit)
    j["limit"] = *cfg.sample_limit;
  else
    j["limit"] = nullptr;
  j["yoco_enabled"] = cfg.pipeline.yoco.enabled;
  try {
    j["config"] = nlohmann::json::parse(cfg.config_text);
  } catch (const nlohmann::json::parse_error&) {
    j["config"] = cfg.config_text;
  }
  std::ofstream out(cfg.output_dir / "run.json", std::ios::trunc);
  if (!out) throw Error(Errc::Io, "cannot write run.json");
  out << j.dump(2) << '\n';
}

}  // namespace detail

struct AugmentReport {
  Manifest manifest;
  std::size_t sample_count = 0;
  int warnings = 0;
  double seconds = 0.0;
};

/// Batch augmentation. Sample i draws from split(seed, i); with a mix op in
/// the pipeline the partner is picked first from i's own batch (seeded
/// shuffle, self excluded unless the batch has one sample), so outputs are
/// identical for any worker count.
inline AugmentReport run_augment(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  detail::LoadedData data = detail::load_source(cfg.source);
  if (cfg.sample_limit && data.samples.size() > *cfg.sample_limit)
    data.samples.resize(*cfg.sample_limit);
  const std::size_t n = data.samples.size();
  const Pipeline& pipe = cfg.pipeline;

  // batch id and position per sample, for partner lookup
  std::vector<std::vector<std::size_t>> batches;
  std::vector<std::pair<std::size_t, std::size_t>> slot(n);
  if (pipe.has_mix()) {
    batches = batch_indices(n, pipe.mix_batch_size, cfg.seed);
    for (std::size_t b = 0; b < batches.size(); ++b)
      for (std::size_t p = 0; p < batches[b].size(); ++p)
        slot[batches[b][p]] = {b, p};
  }

  std::filesystem::create_directories(cfg.output_dir);
  const RngStream root(cfg.seed);
  std::vector<Sample> results(n);
  detail::parallel_for(n, std::max<std::size_t>(1, cfg.workers), [&](std::size_t i) {
    RngStream stream = root.split(i);
    const Sample* partner = nullptr;
    if (pipe.has_mix()) {
      const auto [b, pos] = slot[i];
      const auto& batch = batches[b];
      std::size_t j = i;
      if (batch.size() > 1) {
        std::size_t pick = stream.below(batch.size() - 1);
        if (pick >= pos) ++pick;
        j = batch[pick];
      }
      partner = &data.samples[j];
    }
    YocoResult r =
        yoco_augment(data.samples[i], pipe.ops, partner, pipe.yoco, stream);
    if (pipe.output_format == OutputFormat::Png)
      write_png(cfg.output_dir / sample_filename(i), r.sample.image);
    results[i] = std::move(r.sample);
  });

  AugmentReport report;
  report.warnings = data.warnings;
  report.sample_count = n;
  const DatasetFormat rec_format = cfg.source.format == DatasetFormat::Cifar100
                                       ? DatasetFormat::Cifar100
                                       : DatasetFormat::Cifar10;
  std::ofstream bin;
  if (pipe.output_format == OutputFormat::CifarBin) {
    bin.open(cfg.output_dir / "data.bin", std::ios::binary | std::ios::trunc);
    if (!bin) throw Error(Errc::Io, "cannot open data.bin");
  }
  for (std::size_t i = 0; i < n; ++i) {
    ManifestEntry e;
    e.label = results[i].label;
    e.source_index = i;
    e.seed_path = std::to_string(i);
    if (pipe.output_format == OutputFormat::Png) {
      e.filename = sample_filename(i);
    } else {
      const auto rec = encode_cifar_record(results[i], rec_format);
      bin.write(reinterpret_cast<const char*>(rec.data()),
                static_cast<std::streamsize>(rec.size()));
      e.filename = "data.bin@" + std::to_string(i);
    }
    report.manifest.entries.push_back(std::move(e));
  }
  if (bin.is_open() && !bin) throw Error(Errc::Io, "short write to data.bin");
  write_manifest(cfg.output_dir / "manifest.tsv", report.manifest);
  detail::write_run_record(cfg);
  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return report;
}

/// Write the preview quadruplet: original, image-level augmentation, forced
/// height cut, forced width cut, each on its own child stream (0..2).
/// Pipelines with mix ops are rejected; a preview has no partner pool.
inline std::vector<std::filesystem::path> run_preview(
    const std::filesystem::path& image_path, const Pipeline& pipe,
    std::uint64_t seed, const std::filesystem::path& out_dir) {
  if (pipe.has_mix())
    throw Error(Errc::InvalidMix, "preview cannot run mix ops");
  const Image original = read_image_file(image_path);
  std::filesystem::create_directories(out_dir);
  const RngStream root(seed);

  auto forced_layout = [&](Dim dim, RngStream& stream) {
    const int extent = dim == Dim::Height ? original.height : original.width;
    if (extent < 2) throw Error(Errc::CannotCut, "image too small to cut");
    PieceLayout layout;
    const int pos = detail::single_cut_position(extent, pipe.yoco, stream);
    (dim == Dim::Height ? layout.h_positions : layout.w_positions)
        .push_back(pos);
    return layout;
  };

  Sample s;
  s.image = original;
  std::vector<std::filesystem::path> files;
  files.push_back(out_dir / "preview_original.png");
  write_png(files.back(), original);

  RngStream level_stream = root.split(0);
  files.push_back(out_dir / "preview_image_level.png");
  write_png(files.back(), apply_ops(original, pipe.ops, level_stream));

  RngStream h_stream = root.split(1);
  const PieceLayout h_layout = forced_layout(Dim::Height, h_stream);
  files.push_back(out_dir / "preview_yoco_height.png");
  write_png(files.back(),
            yoco_augment_with_layout(s, pipe.ops, nullptr, h_layout, h_stream)
                .sample.image);

  RngStream w_stream = root.split(2);
  const PieceLayout w_layout = forced_layout(Dim::Width, w_stream);
  files.push_back(out_dir / "preview_yoco_width.png");
  write_png(files.back(),
            yoco_augment_with_layout(s, pipe.ops, nullptr, w_layout, w_stream)
                .sample.image);
  return files;
}

struct Crop4Report {
  Manifest manifest;
  std::size_t inputs = 0;
  std::size_t outputs = 0;
  int warnings = 0;
};

/// Four-crop preprocessing over a folder. Inputs shorter than 448 on either
/// side are skipped with a warning; everything else is resized (short side
/// to 512) and split into the `_tl,_tr,_bl,_br` corner pieces.
inline Crop4Report run_crop4(const std::filesystem::path& in_dir,
                             const std::filesystem::path& out_dir) {
  DatasetSource src;
  src.format = DatasetFormat::Folder;
  src.root = in_dir;
  FolderData data = read_folder(src);
  Crop4Report report;
  report.warnings = data.warnings;
  report.inputs = data.samples.size();
  std::filesystem::create_directories(out_dir);
  static constexpr const char* kSuffix[4] = {"_tl", "_tr", "_bl", "_br"};
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    const Image& img = data.samples[i].image;
    if (std::min(img.height, img.width) < kCrop4Full) {
      ++report.warnings;
      continue;
    }
    const Image sized = resize_short_side(img, 512);
    const auto pieces = crop4(sized);
    for (int k = 0; k < 4; ++k) {
      const std::string rel = data.names[i] + kSuffix[k] + ".png";
      const auto path = out_dir / rel;
      std::filesystem::create_directories(path.parent_path());
      write_png(path, pieces[k]);
      report.manifest.entries.push_back(
          {rel, data.samples[i].label, i, ""});
      ++report.outputs;
    }
  }
  write_manifest(out_dir / "manifest.tsv", report.manifest);
  return report;
}

struct CalibrationReport {
  std::size_t record_count = 0;
  std::size_t bin_count = 0;
  std::vector<BinSummary> bins;
  double rms = 0.0;
};

inline CalibrationReport run_calibration(
    const std::filesystem::path& predictions, std::size_t bin_count) {
  std::ifstream in(predictions);
  if (!in) throw Error(Errc::Io, "cannot open " + predictions.string());
  CalibrationReport report;
  const auto records = parse_prediction_log(in);
  report.record_count = records.size();
  report.bin_count = bin_count;
  report.bins = adaptive_bins(records, bin_count);
  report.rms = rms_calibration_error(records, bin_count);
  return report;
}

inline void print_calibration(std::ostream& os, const CalibrationReport& r) {
  os << "records: " << r.record_count << "\nbins: " << r.bin_count << '\n';
  os << std::fixed << std::setprecision(4);
  for (std::size_t b = 0; b < r.bins.size(); ++b)
    os << "bin " << b << ": count " << r.bins[b].count << ", confidence "
       << r.bins[b].mean_confidence << ", accuracy " << r.bins[b].accuracy
       << '\n';
  os << "RMS calibration error: " << r.rms << '\n';
  os.unsetf(std::ios_base::floatfield);
}

}  // namespace yoco
