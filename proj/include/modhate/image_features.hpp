#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "modhate/error.hpp"
#include "modhate/ingest.hpp"

namespace modhate {

inline constexpr std::size_t kImageFeatureCount = kFramePixels;

/// Column names `px0000` .. `px2499`.
inline std::vector<std::string> image_feature_names() {
  std::vector<std::string> names;
  names.reserve(kImageFeatureCount);
  for (std::size_t i = 0; i < kImageFeatureCount; ++i) {
    std::string digits = std::to_string(i);
    names.push_back("px" + std::string(4 - digits.size(), '0') + digits);
  }
  return names;
}

inline std::vector<double> flatten_frame(const ImageFrame& frame) { return frame.pixels; }

inline ImageFrame unflatten_frame(std::span<const double> values) {
  if (values.size() != kFramePixels) {
    throw Error(ErrorCode::DimensionMismatch, "frame needs exactly 2500 values");
  }
  ImageFrame frame;
  frame.pixels.assign(values.begin(), values.end());
  return frame;
}

/// Element-wise mean of the flattened frames.
inline std::vector<double> aggregate_sample_frames(const std::vector<ImageFrame>& frames) {
  if (frames.empty()) throw Error(ErrorCode::NoFrames, "sample has no image frames");
  std::vector<double> mean(kImageFeatureCount, 0.0);
  for (const auto& frame : frames) {
    for (std::size_t i = 0; i < kImageFeatureCount; ++i) mean[i] += frame.pixels[i];
  }
  for (auto& v : mean) v /= static_cast<double>(frames.size());
  return mean;
}

/// Reads every `*.pgm` in `dir` (lexicographic order) and aggregates them.
inline std::vector<double> extract_image_features(const std::filesystem::path& dir) {
  std::vector<ImageFrame> frames;
  for (const auto& file : list_frame_files(dir)) frames.push_back(read_image_frame(file));
  if (frames.empty()) throw Error(ErrorCode::NoFrames, "no .pgm frames in " + dir.string());
  return aggregate_sample_frames(frames);
}

}  // namespace modhate
