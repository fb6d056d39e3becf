#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "yoco/image.hpp"
#include "yoco/rng.hpp"

namespace yoco {

enum class DatasetFormat { Cifar10, Cifar100, Folder };

struct DatasetSource {
  DatasetFormat format = DatasetFormat::Folder;
  std::filesystem::path root;
  int class_count = 0;  // 10/100 for the binary formats, inferred for folders
};

inline constexpr std::size_t kCifarPixelBytes = 3 * 32 * 32;

inline std::size_t cifar_record_size(DatasetFormat f) {
  switch (f) {
    case DatasetFormat::Cifar10: return 1 + kCifarPixelBytes;
    case DatasetFormat::Cifar100: return 2 + kCifarPixelBytes;
    default: throw Error(Errc::Format, "not a binary record format");
  }
}

inline int cifar_class_count(DatasetFormat f) {
  return f == DatasetFormat::Cifar10 ? 10 : 100;
}

inline float byte_to_unit(unsigned char b) {
  return static_cast<float>(b) / 255.0f;
}

inline unsigned char unit_to_byte(float v) {
  const long q = std::lround(static_cast<double>(v) * 255.0);
  return static_cast<unsigned char>(std::clamp(q, 0L, 255L));
}

/// Decode one record. Layout: label byte(s), then the R, G and B planes
/// row-major, which matches the in-memory channel-major order directly.
inline Sample decode_cifar_record(const unsigned char* rec, DatasetFormat f) {
  const int classes = cifar_class_count(f);
  const unsigned char label = f == DatasetFormat::Cifar10 ? rec[0] : rec[1];
  if (label >= classes)
    throw Error(Errc::Format, "label byte " + std::to_string(label) +
                                  " outside " + std::to_string(classes) +
                                  " classes");
  const unsigned char* px = rec + (f == DatasetFormat::Cifar10 ? 1 : 2);
  Sample s;
  s.image = Image(3, 32, 32);
  for (std::size_t i = 0; i < kCifarPixelBytes; ++i)
    s.image.pixels[i] = byte_to_unit(px[i]);
  s.label = LabelDistribution::one_hot(label, classes);
  return s;
}

/// Inverse of decode_cifar_record; bit-exact for byte-aligned pixel values.
inline std::vector<unsigned char> encode_cifar_record(const Sample& s,
                                                      DatasetFormat f) {
  if (s.image.channels != 3 || s.image.height != 32 || s.image.width != 32)
    throw Error(Errc::UnsupportedFormat, "record images must be 3x32x32");
  const int classes = cifar_class_count(f);
  if (static_cast<int>(s.label.weights.size()) != classes)
    throw Error(Errc::UnsupportedFormat, "label size does not match format");
  int hot = -1;
  for (std::size_t i = 0; i < s.label.weights.size(); ++i) {
    const float w = s.label.weights[i];
    if (w > 1.0f - 1e-6f)
      hot = static_cast<int>(i);
    else if (w > 1e-6f)
      throw Error(Errc::UnsupportedFormat,
                  "binary records require one-hot labels");
  }
  if (hot < 0)
    throw Error(Errc::UnsupportedFormat, "binary records require one-hot labels");
  std::vector<unsigned char> rec(cifar_record_size(f), 0);
  if (f == DatasetFormat::Cifar10) {
    rec[0] = static_cast<unsigned char>(hot);
  } else {
    rec[0] = 0;  // coarse label is not tracked
    rec[1] = static_cast<unsigned char>(hot);
  }
  unsigned char* px = rec.data() + (f == DatasetFormat::Cifar10 ? 1 : 2);
  for (std::size_t i = 0; i < kCifarPixelBytes; ++i)
    px[i] = unit_to_byte(s.image.pixels[i]);
  return rec;
}

inline std::vector<Sample> read_cifar_file(const std::filesystem::path& path,
                                           DatasetFormat f) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  std::vector<unsigned char> bytes{std::istreambuf_iterator<char>(in),
                                   std::istreambuf_iterator<char>()};
  const std::size_t rec = cifar_record_size(f);
  if (bytes.size() % rec != 0) {
    std::ostringstream os;
    os << path.string() << ": truncated record at byte offset "
       << bytes.size() / rec * rec << " (file size " << bytes.size()
       << ", record size " << rec << ")";
    throw Error(Errc::Format, os.str());
  }
  std::vector<Sample> out;
  out.reserve(bytes.size() / rec);
  for (std::size_t off = 0; off < bytes.size(); off += rec)
    out.push_back(decode_cifar_record(bytes.data() + off, f));
  return out;
}

/// Read binary records from a file, or from every `*.bin` under a directory
/// in name order.
inline std::vector<Sample> read_cifar(const DatasetSource& src) {
  if (!std::filesystem::exists(src.root))
    throw Error(Errc::Io, "no such path: " + src.root.string());
  if (!std::filesystem::is_directory(src.root))
    return read_cifar_file(src.root, src.format);
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(src.root))
    if (e.is_regular_file() && e.path().extension() == ".bin")
      files.push_back(e.path());
  std::sort(files.begin(), files.end());
  if (files.empty())
    throw Error(Errc::Io, "no .bin files under " + src.root.string());
  std::vector<Sample> out;
  for (const auto& f : files) {
    auto part = read_cifar_file(f, src.format);
    out.insert(out.end(), std::make_move_iterator(part.begin()),
               std::make_move_iterator(part.end()));
  }
  return out;
}

inline Image mat_to_image(const cv::Mat& m) {
  if (m.empty() || m.type() != CV_8UC3)
    throw Error(Errc::Format, "expected an 8-bit BGR decode");
  Image img(3, m.rows, m.cols);
  for (int y = 0; y < m.rows; ++y) {
    const cv::Vec3b* row = m.ptr<cv::Vec3b>(y);
    for (int x = 0; x < m.cols; ++x) {
      img.at(0, y, x) = byte_to_unit(row[x][2]);
      img.at(1, y, x) = byte_to_unit(row[x][1]);
      img.at(2, y, x) = byte_to_unit(row[x][0]);
    }
  }
  return img;
}

inline cv::Mat image_to_mat(const Image& img) {
  if (img.channels == 1) {
    cv::Mat m(img.height, img.width, CV_8UC1);
    for (int y = 0; y < img.height; ++y) {
      unsigned char* row = m.ptr<unsigned char>(y);
      for (int x = 0; x < img.width; ++x) row[x] = unit_to_byte(img.at(0, y, x));
    }
    return m;
  }
  if (img.channels != 3)
    throw Error(Errc::UnsupportedFormat,
                "only 1- and 3-channel images can be encoded");
  cv::Mat m(img.height, img.width, CV_8UC3);
  for (int y = 0; y < img.height; ++y) {
    cv::Vec3b* row = m.ptr<cv::Vec3b>(y);
    for (int x = 0; x < img.width; ++x) {
      row[x][2] = unit_to_byte(img.at(0, y, x));
      row[x][1] = unit_to_byte(img.at(1, y, x));
      row[x][0] = unit_to_byte(img.at(2, y, x));
    }
  }
  return m;
}

/// Decode an image file to RGB; grayscale sources are broadcast to 3
/// channels by the decoder.
inline Image read_image_file(const std::filesystem::path& path) {
  cv::Mat m = cv::imread(path.string(), cv::IMREAD_COLOR);
  if (m.empty())
    throw Error(Errc::Io, "cannot decode image " + path.string());
  return mat_to_image(m);
}

/// Encode to PNG in memory, then write through one stream per call so writes
/// can run in parallel.
inline void write_png(const std::filesystem::path& path, const Image& img) {
  std::vector<unsigned char> buf;
  if (!cv::imencode(".png", image_to_mat(img), buf))
    throw Error(Errc::Io, "PNG encode failed for " + path.string());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::Io, "cannot open " + path.string());
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size()));
  if (!out) throw Error(Errc::Io, "short write to " + path.string());
}

struct FolderData {
  std::vector<Sample> samples;
  std::vector<std::string> names;  // "class/stem" per sample
  std::vector<std::string> class_names;
  int warnings = 0;
};

inline bool has_image_extension(const std::filesystem::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".bmp";
}

/// Ingest `root/<class>/<image>` trees. Ordering is lexicographic by class
/// then filename, independent of directory enumeration order. Undecodable
/// files and empty class directories are skipped with a warning count. A
/// root holding images directly (no subdirectories) reads as one class.
inline FolderData read_folder(const DatasetSource& src) {
  if (!std::filesystem::is_directory(src.root))
    throw Error(Errc::Io, "not a directory: " + src.root.string());
  std::vector<std::filesystem::path> class_dirs;
  for (const auto& e : std::filesystem::directory_iterator(src.root))
    if (e.is_directory()) class_dirs.push_back(e.path());
  std::sort(class_dirs.begin(), class_dirs.end());

  FolderData out;
  const bool flat = class_dirs.empty();
  if (flat) class_dirs.push_back(src.root);
  const std::size_t k = class_dirs.size();
  for (const auto& dir : class_dirs)
    out.class_names.push_back(flat ? std::string("all")
                                   : dir.filename().string());
  for (std::size_t ci = 0; ci < k; ++ci) {
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(class_dirs[ci]))
      if (e.is_regular_file() && has_image_extension(e.path()))
        files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) {
      ++out.warnings;
      continue;
    }
    for (const auto& f : files) {
      Sample s;
      try {
        s.image = read_image_file(f);
      } catch (const Error&) {
        ++out.warnings;
        continue;
      }
      s.label = LabelDistribution::one_hot(ci, k);
      out.samples.push_back(std::move(s));
      out.names.push_back(flat ? f.stem().string()
                               : out.class_names[ci] + "/" + f.stem().string());
    }
  }
  return out;
}

struct ManifestEntry {
  std::string filename;
  LabelDistribution label;
  std::size_t source_index = 0;
  std::string seed_path;
};

struct Manifest {
  std::vector<ManifestEntry> entries;
};

inline std::string format_weights(const LabelDistribution& l) {
  std::string out;
  char buf[32];
  for (std::size_t i = 0; i < l.weights.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(l.weights[i]));
    if (i) out += ',';
    out += buf;
  }
  return out;
}

/// Tab-separated lines: filename, comma-joined label weights, source index,
/// seed path (may be empty).
inline void write_manifest(const std::filesystem::path& path,
                           const Manifest& m) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(Errc::Io, "cannot open " + path.string());
  for (const auto& e : m.entries)
    out << e.filename << '\t' << format_weights(e.label) << '\t'
        << e.source_index << '\t' << e.seed_path << '\n';
  if (!out) throw Error(Errc::Io, "short write to " + path.string());
}

inline Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  Manifest m;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::array<std::string, 4> field;
    std::size_t start = 0;
    for (int i = 0; i < 4; ++i) {
      const std::size_t tab = line.find('\t', start);
      if (i < 3 && tab == std::string::npos)
        throw Error(Errc::Format, path.string() + ": bad manifest line " +
                                      std::to_string(line_no));
      const std::size_t end = i < 3 ? tab : line.size();
      field[i] = line.substr(start, end - start);
      start = end + 1;
    }
    ManifestEntry e;
    e.filename = field[0];
    std::stringstream ws(field[1]);
    std::string w;
    while (std::getline(ws, w, ','))
      e.label.weights.push_back(std::stof(w));
    e.source_index = std::stoull(field[2]);
    e.seed_path = field[3];
    m.entries.push_back(std::move(e));
  }
  return m;
}

enum class OutputFormat { Png, CifarBin };

inline std::string sample_filename(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "sample_%06zu.png", index);
  return buf;
}

/// Write a dataset with its manifest (`manifest.tsv` in out_dir). PNG output
/// writes one file per sample; CifarBin packs 3x32x32 one-hot samples into a
/// single `data.bin` whose manifest names are `data.bin@<record>`.
inline Manifest write_dataset(const std::vector<Sample>& samples,
                              const std::filesystem::path& out_dir,
                              OutputFormat format) {
  std::filesystem::create_directories(out_dir);
  Manifest m;
  if (format == OutputFormat::Png) {
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const std::string name = sample_filename(i);
      write_png(out_dir / name, samples[i].image);
      m.entries.push_back({name, samples[i].label, i, ""});
    }
  } else {
    const int classes =
        samples.empty() ? 10 : static_cast<int>(samples[0].label.weights.size());
    const DatasetFormat f =
        classes == 100 ? DatasetFormat::Cifar100 : DatasetFormat::Cifar10;
    std::ofstream out(out_dir / "data.bin", std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::Io, "cannot open data.bin");
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const auto rec = encode_cifar_record(samples[i], f);
      out.write(reinterpret_cast<const char*>(rec.data()),
                static_cast<std::streamsize>(rec.size()));
      m.entries.push_back(
          {"data.bin@" + std::to_string(i), samples[i].label, i, ""});
    }
    if (!out) throw Error(Errc::Io, "short write to data.bin");
  }
  write_manifest(out_dir / "manifest.tsv", m);
  return m;
}

/// Deterministic batch order: Fisher-Yates over indices keyed by the seed,
/// chunked with the short final batch kept.
inline std::vector<std::vector<std::size_t>> batch_indices(
    std::size_t count, std::size_t batch_size, std::uint64_t seed) {
  if (batch_size < 1)
    throw Error(Errc::InvalidParameter, "batch size must be positive");
  std::vector<std::size_t> order(count);
  for (std::size_t i = 0; i < count; ++i) order[i] = i;
  RngStream stream(seed);
  for (std::size_t i = count; i > 1; --i) {
    const std::size_t j = stream.below(i);
    std::swap(order[i - 1], order[j]);
  }
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t off = 0; off < count; off += batch_size) {
    const std::size_t n = std::min(batch_size, count - off);
    batches.emplace_back(order.begin() + off, order.begin() + off + n);
  }
  return batches;
}

inline std::vector<std::vector<Sample>> batch_stream(
    const std::vector<Sample>& samples, std::size_t batch_size,
    std::uint64_t seed) {
  std::vector<std::vector<Sample>> out;
  for (const auto& idx : batch_indices(samples.size(), batch_size, seed)) {
    std::vector<Sample> batch;
    batch.reserve(idx.size());
    for (std::size_t i : idx) batch.push_back(samples[i]);
    out.push_back(std::move(batch));
  }
  return out;
}

}  // namespace yoco
