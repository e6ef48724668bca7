#pragma once

// Seeded generator for a small on-disk demo corpus: WAV clips, PGM frame
// directories, transcripts and a manifest with auto splits.
//
// Each modality of each sample independently "presents" the true class with
// probability `modality_fidelity` and the opposite class otherwise, so single
// modalities are imperfect while a majority of three usually agrees with the
// label.

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include "modhate/ingest.hpp"
#include "modhate/random.hpp"
#include "modhate/text_io.hpp"

namespace modhate {

struct SyntheticCorpusSpec {
  std::size_t count = 300;
  double hate_fraction = 0.6;
  std::uint64_t seed = 42;
  double duration_s = 1.0;
  std::size_t frames_per_sample = 3;
  std::size_t frame_side = 64;
  double modality_fidelity = 0.92;
};

namespace synth {

inline const std::vector<std::string>& hate_lexicon() {
  static const std::vector<std::string> words = {
      "hate",   "stupid", "idiot", "kill",   "disgusting", "trash",  "worthless",
      "loser",  "ugly",   "pathetic", "destroy", "enemy",  "filthy", "scum",
      "liar",   "moron",  "fool",  "rage",   "attack",     "vermin"};
  return words;
}

inline const std::vector<std::string>& friendly_lexicon() {
  static const std::vector<std::string> words = {
      "love",  "friend", "happy", "great",  "thanks",  "beautiful", "wonderful",
      "fun",   "smile",  "kind",  "laugh",  "enjoy",   "joy",       "amazing",
      "sweet", "together", "peace", "hope", "welcome", "nice"};
  return words;
}

inline const std::vector<std::string>& neutral_lexicon() {
  static const std::vector<std::string> words = {
      "movie", "today",  "people", "time",  "house",  "car",    "night",  "really",
      "going", "think",  "know",   "said",  "look",   "come",   "thing",  "place",
      "city",  "school", "work",   "money", "dinner", "phone",  "game",   "music",
      "street", "week",  "morning", "family", "talk", "back"};
  return words;
}

inline const std::vector<std::string>& filler_words() {
  static const std::vector<std::string> words = {"the", "you", "are", "and", "that",
                                                 "this", "so", "we", "it", "to"};
  return words;
}

inline std::vector<double> make_audio(int hate, double duration_s, Rng& rng) {
  const auto n = static_cast<std::size_t>(duration_s * kCanonicalSampleRate);
  std::vector<double> x(n, 0.0);
  const double f0 = hate ? rng.uniform(110.0, 170.0) : rng.uniform(220.0, 320.0);
  const double amp = hate ? rng.uniform(0.45, 0.65) : rng.uniform(0.15, 0.30);
  const double noise = hate ? 0.08 : 0.02;
  const std::array<double, 4> harmonics =
      hate ? std::array<double, 4>{1.0, 0.8, 0.6, 0.45} : std::array<double, 4>{1.0, 0.3, 0.1, 0.0};
  const double trem = rng.uniform(2.0, 6.0);
  const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / kCanonicalSampleRate;
    double v = 0.0;
    for (std::size_t h = 0; h < harmonics.size(); ++h) {
      v += harmonics[h] * std::sin(2.0 * std::numbers::pi * f0 * static_cast<double>(h + 1) * t + phase);
    }
    const double envelope = 0.75 + 0.25 * std::sin(2.0 * std::numbers::pi * trem * t);
    x[i] = std::clamp(amp * envelope * v / 2.0 + rng.normal(0.0, noise), -1.0, 1.0);
  }
  return x;
}

inline GrayImage make_frame(int hate, std::size_t side, double base_shift, Rng& rng) {
  GrayImage img;
  img.width = img.height = side;
  img.pixels.resize(side * side);
  const double base = (hate ? 80.0 : 165.0) + base_shift;
  for (std::size_t r = 0; r < side; ++r) {
    for (std::size_t c = 0; c < side; ++c) {
      const double u = static_cast<double>(r) / static_cast<double>(side);
      const double v = static_cast<double>(c) / static_cast<double>(side);
      double value = base;
      if (hate) {
        // furrowed upper band: dark horizontal stripes
        if (u < 0.45 && (r / 3) % 2 == 0) value -= 45.0;
      } else {
        // soft smile curve in the lower half
        const double curve = 0.7 + 0.15 * std::cos(std::numbers::pi * (v - 0.5) * 2.0);
        if (std::abs(u - curve) < 0.04) value += 50.0;
        value += 20.0 * (1.0 - u);
      }
      value += rng.normal(0.0, 18.0);
      img.pixels[r * side + c] = static_cast<std::uint8_t>(std::clamp(std::round(value), 0.0, 255.0));
    }
  }
  return img;
}

inline std::string make_text(int hate, Rng& rng) {
  const auto& own = hate ? hate_lexicon() : friendly_lexicon();
  const auto& other = hate ? friendly_lexicon() : hate_lexicon();
  const std::size_t words = 10 + rng.index(7);
  std::string out;
  for (std::size_t w = 0; w < words; ++w) {
    const double u = rng.uniform();
    std::string word;
    if (u < 0.45) {
      word = own[rng.index(own.size())];
    } else if (u < 0.47) {
      word = other[rng.index(other.size())];
    } else if (u < 0.70) {
      word = filler_words()[rng.index(filler_words().size())];
    } else {
      word = neutral_lexicon()[rng.index(neutral_lexicon().size())];
    }
    if (w == 0 || rng.bernoulli(0.1)) word[0] = static_cast<char>(std::toupper(word[0]));
    if (!out.empty()) out += ' ';
    out += word;
    if (rng.bernoulli(0.12)) out += rng.bernoulli(0.5) ? "!!" : ",";
  }
  return out + ".\n";
}

inline std::string sample_id(std::size_t i) {
  std::string digits = std::to_string(i);
  return "s" + std::string(digits.size() < 4 ? 4 - digits.size() : 0, '0') + digits;
}

}  // namespace synth

/// Writes the corpus under `dir` and returns the manifest path. Exactly
/// round(count * hate_fraction) samples are labelled hate.
inline std::filesystem::path generate_demo_corpus(const std::filesystem::path& dir,
                                                  const SyntheticCorpusSpec& spec) {
  if (spec.count < kMinAutoSamples) {
    throw Error(ErrorCode::TooFewSamples, "demo corpus needs at least " +
                                              std::to_string(kMinAutoSamples) + " samples");
  }
  if (!(spec.hate_fraction >= 0.0 && spec.hate_fraction <= 1.0) ||
      !(spec.modality_fidelity >= 0.0 && spec.modality_fidelity <= 1.0)) {
    throw Error(ErrorCode::BadFraction, "hate fraction and fidelity must lie in [0, 1]");
  }
  Rng rng(spec.seed);
  const auto n_hate = static_cast<std::size_t>(
      std::llround(spec.hate_fraction * static_cast<double>(spec.count)));
  std::vector<int> labels(spec.count, 0);
  std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(std::min(n_hate, spec.count)), 1);
  rng.shuffle(std::span<int>(labels));

  std::vector<ManifestRecord> records;
  for (std::size_t i = 0; i < spec.count; ++i) {
    Rng srng(mix_seed(spec.seed, i));
    const int label = labels[i];
    auto presented = [&] { return srng.bernoulli(spec.modality_fidelity) ? label : 1 - label; };
    const int audio_class = presented();
    const int image_class = presented();
    const int text_class = presented();

    ManifestRecord rec;
    rec.id = synth::sample_id(i);
    rec.audio_path = "audio/" + rec.id + ".wav";
    rec.image_dir = "frames/" + rec.id;
    rec.text_path = "text/" + rec.id + ".txt";
    rec.label = label ? Label::Hate : Label::NonHate;
    rec.split = Split::Auto;

    write_wav(dir / rec.audio_path, synth::make_audio(audio_class, spec.duration_s, srng),
              kCanonicalSampleRate);
    const double shift = srng.uniform(-15.0, 15.0);
    for (std::size_t f = 0; f < spec.frames_per_sample; ++f) {
      write_pgm(dir / rec.image_dir / ("frame_" + std::to_string(100 + f).substr(1) + ".pgm"),
                synth::make_frame(image_class, spec.frame_side, shift, srng));
    }
    text_io::write_file(dir / rec.text_path, synth::make_text(text_class, srng));
    records.push_back(std::move(rec));
  }
  const auto manifest = dir / "manifest.csv";
  text_io::write_file(manifest, serialize_manifest(records));
  return manifest;
}

}  // namespace modhate
