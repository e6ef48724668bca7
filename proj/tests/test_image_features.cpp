#include <gtest/gtest.h>

#include "modhate/image_features.hpp"
#include "support.hpp"

using namespace modhate;
using testsupport::error_code_of;
using testsupport::ScratchDir;

namespace {

ImageFrame constant_frame(double v) {
  ImageFrame f;
  f.pixels.assign(kFramePixels, v);
  return f;
}

ImageFrame random_frame(Rng& rng) {
  ImageFrame f;
  f.pixels.resize(kFramePixels);
  for (auto& p : f.pixels) p = rng.uniform();
  return f;
}

}  // namespace

TEST(Flatten, ConstantAndIndexing) {
  const auto ones = flatten_frame(constant_frame(1.0));
  ASSERT_EQ(ones.size(), 2500u);
  EXPECT_TRUE(std::all_of(ones.begin(), ones.end(), [](double v) { return v == 1.0; }));

  auto f = constant_frame(0.0);
  f.pixels[17 * 50 + 33] = 1.0;
  const auto flat = flatten_frame(f);
  EXPECT_EQ(flat[50 * 17 + 33], 1.0);
  EXPECT_EQ(std::count(flat.begin(), flat.end(), 1.0), 1);
}

TEST(Flatten, UnflattenRoundTrip) {
  Rng rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    const auto f = random_frame(rng);
    EXPECT_EQ(unflatten_frame(flatten_frame(f)).pixels, f.pixels);
  }
  std::vector<double> short_row(10);
  EXPECT_EQ(error_code_of([&] { unflatten_frame(short_row); }), ErrorCode::DimensionMismatch);
}

TEST(Aggregate, Examples) {
  Rng rng(2);
  const auto f = random_frame(rng);
  EXPECT_EQ(aggregate_sample_frames({f}), flatten_frame(f));
  const auto half = aggregate_sample_frames({constant_frame(0.0), constant_frame(1.0)});
  EXPECT_TRUE(std::all_of(half.begin(), half.end(), [](double v) { return v == 0.5; }));
  EXPECT_EQ(error_code_of([] { aggregate_sample_frames({}); }), ErrorCode::NoFrames);
}

TEST(Aggregate, PermutationInvariantAndBounded) {
  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<ImageFrame> frames;
    const std::size_t n = 2 + rng.index(5);
    for (std::size_t i = 0; i < n; ++i) frames.push_back(random_frame(rng));
    const auto mean = aggregate_sample_frames(frames);
    auto shuffled = frames;
    rng.shuffle(std::span<ImageFrame>(shuffled));
    const auto other = aggregate_sample_frames(shuffled);
    for (std::size_t j = 0; j < kFramePixels; ++j) {
      EXPECT_NEAR(other[j], mean[j], 1e-12);
      double lo = 1.0, hi = 0.0;
      for (const auto& f : frames) {
        lo = std::min(lo, f.pixels[j]);
        hi = std::max(hi, f.pixels[j]);
      }
      EXPECT_GE(mean[j], lo - 1e-12);
      EXPECT_LE(mean[j], hi + 1e-12);
    }
  }
}

TEST(Extract, ReadsDirectoryInLexicographicOrder) {
  ScratchDir dir("frames");
  write_pgm(dir / "b.pgm", GrayImage{50, 50, std::vector<std::uint8_t>(2500, 255)});
  write_pgm(dir / "a.pgm", GrayImage{50, 50, std::vector<std::uint8_t>(2500, 0)});
  text_io::write_file(dir / "notes.txt", "ignored");
  const auto files = list_frame_files(dir.path());
  ASSERT_EQ(files.size(), 2u);
  EXPECT_EQ(files[0].filename(), "a.pgm");
  const auto v = extract_image_features(dir.path());
  EXPECT_TRUE(std::all_of(v.begin(), v.end(), [](double x) { return x == 0.5; }));
}

TEST(Extract, EmptyDirectoryHasNoFrames) {
  ScratchDir dir("noframes");
  EXPECT_EQ(error_code_of([&] { extract_image_features(dir.path()); }), ErrorCode::NoFrames);
}

TEST(Extract, ColumnNames) {
  const auto names = image_feature_names();
  ASSERT_EQ(names.size(), 2500u);
  EXPECT_EQ(names.front(), "px0000");
  EXPECT_EQ(names.back(), "px2499");
}
