#pragma once

// Corpus manifest parsing, raw modality readers (WAV, PGM, text) and the
// deterministic train/test split.

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "modhate/error.hpp"
#include "modhate/random.hpp"
#include "modhate/text_io.hpp"

namespace modhate {

enum class Label : int { NonHate = 0, Hate = 1 };
enum class Split { Train, Test, Auto };

inline std::string_view to_string(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Test: return "test";
    case Split::Auto: return "auto";
  }
  return "auto";
}

struct ManifestRecord {
  std::string id;
  std::string audio_path;
  std::string image_dir;
  std::string text_path;
  Label label = Label::NonHate;
  Split split = Split::Auto;

  friend bool operator==(const ManifestRecord&, const ManifestRecord&) = default;
};

inline constexpr std::array<std::string_view, 6> kManifestColumns = {
    "id", "audio_path", "image_dir", "text_path", "label", "split"};

namespace detail {

inline std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

inline std::optional<Label> parse_label(std::string_view raw) {
  const auto s = lower(text_io::trim(raw));
  if (s == "hate" || s == "1") return Label::Hate;
  if (s == "nonhate" || s == "0") return Label::NonHate;
  return std::nullopt;
}

inline std::optional<Split> parse_split(std::string_view raw) {
  const auto s = lower(text_io::trim(raw));
  if (s == "train") return Split::Train;
  if (s == "test") return Split::Test;
  if (s == "auto" || s.empty()) return Split::Auto;
  return std::nullopt;
}

}  // namespace detail

/// Parses manifest CSV text. Columns are located by header name, `#` lines
/// and blank lines are skipped, and error messages carry 1-based file lines.
inline std::vector<ManifestRecord> parse_manifest_text(std::string_view text) {
  const auto all_lines = text_io::lines(text);
  std::size_t line_no = 0;
  std::optional<std::array<std::size_t, 6>> columns;
  std::size_t header_width = 0;
  std::vector<ManifestRecord> records;
  std::unordered_set<std::string> seen;

  for (const auto& raw_line : all_lines) {
    ++line_no;
    const auto line = text_io::trim(raw_line);
    if (line.empty() || line.front() == '#') continue;
    const auto fields = text_io::split(line);

    if (!columns) {
      std::array<std::size_t, 6> idx{};
      for (std::size_t c = 0; c < kManifestColumns.size(); ++c) {
        auto it = std::find_if(fields.begin(), fields.end(), [&](std::string_view f) {
          return text_io::trim(f) == kManifestColumns[c];
        });
        if (it == fields.end()) {
          throw Error(ErrorCode::MissingColumn,
                      "manifest header lacks column '" + std::string(kManifestColumns[c]) + "'");
        }
        idx[c] = static_cast<std::size_t>(it - fields.begin());
      }
      columns = idx;
      header_width = fields.size();
      continue;
    }

    if (fields.size() != header_width) {
      throw Error(ErrorCode::MissingColumn, "line " + std::to_string(line_no) + ": expected " +
                                                std::to_string(header_width) + " fields");
    }
    const auto& idx = *columns;
    ManifestRecord rec;
    rec.id = std::string(text_io::trim(fields[idx[0]]));
    rec.audio_path = std::string(text_io::trim(fields[idx[1]]));
    rec.image_dir = std::string(text_io::trim(fields[idx[2]]));
    rec.text_path = std::string(text_io::trim(fields[idx[3]]));
    if (rec.id.empty() || rec.audio_path.empty() || rec.image_dir.empty() ||
        rec.text_path.empty()) {
      throw Error(ErrorCode::MissingColumn,
                  "line " + std::to_string(line_no) + ": empty id or modality path");
    }
    const auto label = detail::parse_label(fields[idx[4]]);
    if (!label) {
      throw Error(ErrorCode::BadLabel, "line " + std::to_string(line_no) + ": label '" +
                                           std::string(fields[idx[4]]) + "'");
    }
    rec.label = *label;
    const auto split = detail::parse_split(fields[idx[5]]);
    if (!split) {
      throw Error(ErrorCode::BadSplit, "line " + std::to_string(line_no) + ": split '" +
                                           std::string(fields[idx[5]]) + "'");
    }
    rec.split = *split;
    if (!seen.insert(rec.id).second) {
      throw Error(ErrorCode::DuplicateId,
                  "line " + std::to_string(line_no) + ": id '" + rec.id + "' repeated");
    }
    records.push_back(std::move(rec));
  }
  if (!columns) throw Error(ErrorCode::MissingColumn, "manifest has no header line");
  return records;
}

inline std::vector<ManifestRecord> parse_manifest(const std::filesystem::path& path) {
  return parse_manifest_text(text_io::read_file(path));
}

inline std::string serialize_manifest(const std::vector<ManifestRecord>& records) {
  std::string out = "id,audio_path,image_dir,text_path,label,split\n";
  for (const auto& r : records) {
    out += r.id + ',' + r.audio_path + ',' + r.image_dir + ',' + r.text_path + ',' +
           (r.label == Label::Hate ? "hate" : "nonhate") + ',' + std::string(to_string(r.split)) +
           '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Audio

inline constexpr int kCanonicalSampleRate = 22050;

struct AudioClip {
  std::vector<double> samples;
  int sample_rate = kCanonicalSampleRate;
  /// Rate of the source file before resampling.
  int original_rate = kCanonicalSampleRate;
};

/// round(n * target / source): the length linear resampling produces.
inline std::size_t resampled_length(std::size_t n, int source_rate, int target_rate) {
  return static_cast<std::size_t>(
      std::llround(static_cast<double>(n) * target_rate / static_cast<double>(source_rate)));
}

inline std::vector<double> resample_linear(const std::vector<double>& in, int source_rate,
                                           int target_rate) {
  if (source_rate == target_rate || in.empty()) return in;
  const std::size_t out_len = resampled_length(in.size(), source_rate, target_rate);
  std::vector<double> out(out_len);
  const double step = static_cast<double>(source_rate) / target_rate;
  const std::size_t last = in.size() - 1;
  for (std::size_t j = 0; j < out_len; ++j) {
    const double pos = static_cast<double>(j) * step;
    const auto i0 = std::min(static_cast<std::size_t>(pos), last);
    const auto i1 = std::min(i0 + 1, last);
    const double frac = std::clamp(pos - static_cast<double>(i0), 0.0, 1.0);
    out[j] = in[i0] + frac * (in[i1] - in[i0]);
  }
  return out;
}

namespace detail {

inline std::uint32_t le32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}
inline std::uint16_t le16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}
inline void put32(std::string& s, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}
inline void put16(std::string& s, std::uint16_t v) {
  s.push_back(static_cast<char>(v & 0xFF));
  s.push_back(static_cast<char>(v >> 8));
}

}  // namespace detail

/// Decodes a RIFF/WAVE byte buffer: PCM (format 1), 16-bit, mono only.
inline AudioClip decode_wav(std::string_view bytes) {
  const auto* data = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::size_t size = bytes.size();
  if (size < 12 || std::memcmp(data, "RIFF", 4) != 0 || std::memcmp(data + 8, "WAVE", 4) != 0) {
    throw Error(ErrorCode::NotWav, "missing RIFF/WAVE signature");
  }
  bool have_fmt = false;
  int sample_rate = 0;
  const unsigned char* pcm = nullptr;
  std::size_t pcm_bytes = 0;

  std::size_t pos = 12;
  while (pos + 8 <= size) {
    const unsigned char* chunk = data + pos;
    const std::size_t chunk_size = detail::le32(chunk + 4);
    const std::size_t body = pos + 8;
    const std::size_t available = std::min(chunk_size, size - body);
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (available < 16) throw Error(ErrorCode::NotWav, "fmt chunk too short");
      const auto format = detail::le16(data + body);
      const auto channels = detail::le16(data + body + 2);
      const auto bits = detail::le16(data + body + 14);
      sample_rate = static_cast<int>(detail::le32(data + body + 4));
      if (format != 1) {
        throw Error(ErrorCode::UnsupportedEncoding,
                    "audio format " + std::to_string(format) + " (only PCM=1)");
      }
      if (channels != 1) {
        throw Error(ErrorCode::UnsupportedEncoding,
                    std::to_string(channels) + " channels (only mono)");
      }
      if (bits != 16) {
        throw Error(ErrorCode::UnsupportedEncoding, std::to_string(bits) + "-bit samples");
      }
      if (sample_rate <= 0) throw Error(ErrorCode::NotWav, "zero sample rate");
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      pcm = data + body;
      pcm_bytes = available;
    }
    pos = body + chunk_size + (chunk_size & 1U);
  }
  if (!have_fmt) throw Error(ErrorCode::NotWav, "no fmt chunk");
  if (pcm == nullptr) throw Error(ErrorCode::NotWav, "no data chunk");

  const std::size_t n = pcm_bytes / 2;
  if (n == 0) throw Error(ErrorCode::EmptyAudio, "data chunk holds no samples");
  std::vector<double> samples(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto v = static_cast<std::int16_t>(detail::le16(pcm + 2 * i));
    samples[i] = static_cast<double>(v) / 32768.0;
  }
  AudioClip clip;
  clip.original_rate = sample_rate;
  clip.samples = resample_linear(samples, sample_rate, kCanonicalSampleRate);
  clip.sample_rate = kCanonicalSampleRate;
  return clip;
}

inline AudioClip read_wav(const std::filesystem::path& path) {
  return decode_wav(text_io::read_file(path));
}

/// Encodes samples in [-1, 1] as 16-bit mono PCM (clipped, rounded).
inline std::string encode_wav(const std::vector<double>& samples, int sample_rate) {
  std::string out;
  const auto data_bytes = static_cast<std::uint32_t>(samples.size() * 2);
  out += "RIFF";
  detail::put32(out, 36 + data_bytes);
  out += "WAVEfmt ";
  detail::put32(out, 16);
  detail::put16(out, 1);
  detail::put16(out, 1);
  detail::put32(out, static_cast<std::uint32_t>(sample_rate));
  detail::put32(out, static_cast<std::uint32_t>(sample_rate) * 2);
  detail::put16(out, 2);
  detail::put16(out, 16);
  out += "data";
  detail::put32(out, data_bytes);
  for (double s : samples) {
    const double scaled = std::clamp(std::round(s * 32768.0), -32768.0, 32767.0);
    detail::put16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(scaled)));
  }
  return out;
}

inline void write_wav(const std::filesystem::path& path, const std::vector<double>& samples,
                      int sample_rate) {
  text_io::write_file(path, encode_wav(samples, sample_rate));
}

// ---------------------------------------------------------------------------
// Images

inline constexpr std::size_t kFrameSide = 50;
inline constexpr std::size_t kFramePixels = kFrameSide * kFrameSide;

struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;  // row-major

  std::uint8_t at(std::size_t row, std::size_t col) const { return pixels[row * width + col]; }
};

/// 50x50 grid of intensities in [0, 1], row-major.
struct ImageFrame {
  std::vector<double> pixels = std::vector<double>(kFramePixels, 0.0);

  double at(std::size_t row, std::size_t col) const { return pixels[row * kFrameSide + col]; }
};

inline GrayImage decode_pgm(std::string_view bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
    throw Error(ErrorCode::NotPgm, "missing P5 magic");
  }
  std::size_t pos = 2;
  auto next_token = [&]() -> std::size_t {
    while (pos < bytes.size()) {
      const char ch = bytes[pos];
      if (ch == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(ch))) {
        ++pos;
      } else {
        break;
      }
    }
    const std::size_t start = pos;
    while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) ++pos;
    const auto value = text_io::parse_int(bytes.substr(start, pos - start));
    if (!value || *value <= 0) throw Error(ErrorCode::CorruptHeader, "bad PGM header field");
    return static_cast<std::size_t>(*value);
  };
  GrayImage img;
  img.width = next_token();
  img.height = next_token();
  const auto maxval = next_token();
  if (maxval != 255) {
    throw Error(ErrorCode::CorruptHeader, "maxval " + std::to_string(maxval) + " (need 255)");
  }
  if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
    throw Error(ErrorCode::CorruptHeader, "missing separator before pixel payload");
  }
  ++pos;
  const std::size_t needed = img.width * img.height;
  if (bytes.size() - pos < needed) {
    throw Error(ErrorCode::CorruptHeader, "pixel payload truncated: have " +
                                              std::to_string(bytes.size() - pos) + " of " +
                                              std::to_string(needed));
  }
  img.pixels.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                    bytes.begin() + static_cast<std::ptrdiff_t>(pos + needed));
  return img;
}

inline std::string encode_pgm(const GrayImage& img) {
  std::string out = "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  out.append(img.pixels.begin(), img.pixels.end());
  return out;
}

inline void write_pgm(const std::filesystem::path& path, const GrayImage& img) {
  text_io::write_file(path, encode_pgm(img));
}

/// Bilinear resampling with pixel-centre alignment: destination pixel d maps
/// to source coordinate (d + 0.5) * src/dst - 0.5, clamped to the image.
inline std::vector<double> resize_bilinear(const GrayImage& img, std::size_t out_w,
                                           std::size_t out_h) {
  std::vector<double> out(out_w * out_h);
  const double sx = static_cast<double>(img.width) / static_cast<double>(out_w);
  const double sy = static_cast<double>(img.height) / static_cast<double>(out_h);
  auto coord = [](std::size_t d, double scale, std::size_t limit) {
    const double c = (static_cast<double>(d) + 0.5) * scale - 0.5;
    return std::clamp(c, 0.0, static_cast<double>(limit - 1));
  };
  for (std::size_t r = 0; r < out_h; ++r) {
    const double y = coord(r, sy, img.height);
    const auto y0 = static_cast<std::size_t>(y);
    const auto y1 = std::min(y0 + 1, img.height - 1);
    const double fy = y - static_cast<double>(y0);
    for (std::size_t c = 0; c < out_w; ++c) {
      const double x = coord(c, sx, img.width);
      const auto x0 = static_cast<std::size_t>(x);
      const auto x1 = std::min(x0 + 1, img.width - 1);
      const double fx = x - static_cast<double>(x0);
      const double top = img.at(y0, x0) * (1.0 - fx) + img.at(y0, x1) * fx;
      const double bottom = img.at(y1, x0) * (1.0 - fx) + img.at(y1, x1) * fx;
      out[r * out_w + c] = top * (1.0 - fy) + bottom * fy;
    }
  }
  return out;
}

inline ImageFrame to_frame(const GrayImage& img) {
  ImageFrame frame;
  frame.pixels = resize_bilinear(img, kFrameSide, kFrameSide);
  for (auto& v : frame.pixels) v = std::clamp(v / 255.0, 0.0, 1.0);
  return frame;
}

inline ImageFrame read_image_frame(const std::filesystem::path& path) {
  return to_frame(decode_pgm(text_io::read_file(path)));
}

/// Frame files (`*.pgm`) of a sample directory in lexicographic order.
inline std::vector<std::filesystem::path> list_frame_files(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw Error(ErrorCode::UnreadableFile, "not a directory: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".pgm") files.push_back(entry.path());
  }
  if (ec) throw Error(ErrorCode::UnreadableFile, "cannot list " + dir.string());
  std::sort(files.begin(), files.end(), [](const auto& a, const auto& b) {
    return a.filename().string() < b.filename().string();
  });
  return files;
}

inline std::string read_text_file(const std::filesystem::path& path) {
  return text_io::read_file(path);
}

// ---------------------------------------------------------------------------
// Splitting

inline constexpr double kTrainFraction = 0.8;
inline constexpr std::size_t kMinAutoSamples = 5;

struct SplitAssignment {
  std::vector<std::string> train_ids;  // manifest order
  std::vector<std::string> test_ids;   // manifest order

  bool is_train(const std::string& id) const {
    return std::find(train_ids.begin(), train_ids.end(), id) != train_ids.end();
  }
  friend bool operator==(const SplitAssignment&, const SplitAssignment&) = default;
};

/// Explicit train/test values pass through; `auto` records are shuffled with
/// the seeded generator and the first round(0.8 * n_auto) go to training.
inline SplitAssignment split_dataset(const std::vector<ManifestRecord>& records,
                                     std::uint64_t seed) {
  std::vector<std::size_t> auto_idx;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].split == Split::Auto) auto_idx.push_back(i);
  }
  if (!auto_idx.empty() && auto_idx.size() < kMinAutoSamples) {
    throw Error(ErrorCode::TooFewSamples, std::to_string(auto_idx.size()) +
                                              " auto-split records (need at least " +
                                              std::to_string(kMinAutoSamples) + ")");
  }
  if (records.empty()) throw Error(ErrorCode::TooFewSamples, "empty manifest");

  std::vector<bool> train(records.size(), false);
  for (std::size_t i = 0; i < records.size(); ++i) train[i] = records[i].split == Split::Train;
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(auto_idx));
  const auto n_train = static_cast<std::size_t>(
      std::llround(kTrainFraction * static_cast<double>(auto_idx.size())));
  for (std::size_t j = 0; j < n_train; ++j) train[auto_idx[j]] = true;

  SplitAssignment out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    (train[i] ? out.train_ids : out.test_ids).push_back(records[i].id);
  }
  return out;
}

}  // namespace modhate
