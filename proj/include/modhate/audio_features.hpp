#pragma once

// Short-term audio analysis: framing, per-frame time and frequency domain
// features, and the 33-value clip summary (per-feature mean over frames).
//
// Frames use a rectangular window (no taper) and are zero-padded at the tail.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "modhate/error.hpp"
#include "modhate/ingest.hpp"

namespace modhate {

struct FrameConfig {
  std::size_t frame_length = 512;
  std::size_t hop_length = 256;
  int sample_rate = kCanonicalSampleRate;
};

inline constexpr std::size_t kEnergySubframes = 8;
inline constexpr std::size_t kSpectralEntropyBands = 16;
inline constexpr double kRolloffFraction = 0.90;
inline constexpr std::size_t kMelFilters = 26;
inline constexpr std::size_t kMfccCoeffs = 13;
inline constexpr std::size_t kChromaBins = 12;
inline constexpr double kLogFloor = 1e-10;
inline constexpr double kChromaMinHz = 20.0;

inline constexpr std::size_t kAudioFeatureCount = 8 + kMfccCoeffs + kChromaBins;
static_assert(kAudioFeatureCount == 33);

/// Column names of the audio feature layout, in vector order.
inline std::vector<std::string> audio_feature_names() {
  std::vector<std::string> names = {"energy",           "zcr",  "energy_entropy",
                                    "centroid_hz",      "spread_hz", "spectral_entropy",
                                    "flux",             "rolloff_hz"};
  for (std::size_t i = 0; i < kMfccCoeffs; ++i) names.push_back("mfcc_" + std::to_string(i));
  for (std::size_t i = 0; i < kChromaBins; ++i) names.push_back("chroma_" + std::to_string(i));
  return names;
}

// ---------------------------------------------------------------------------
// Framing

inline std::size_t frame_count(std::size_t n, const FrameConfig& cfg) {
  const std::size_t excess = n > cfg.frame_length ? n - cfg.frame_length : 0;
  return (excess + cfg.hop_length - 1) / cfg.hop_length + 1;
}

/// Frame i covers [i*hop, i*hop + W_L); the tail is zero-padded.
inline std::vector<std::vector<double>> frame_signal(std::span<const double> signal,
                                                     const FrameConfig& cfg) {
  if (cfg.hop_length == 0 || cfg.hop_length > cfg.frame_length) {
    throw Error(ErrorCode::BadHyperparameter, "need 0 < hop <= frame length");
  }
  if (signal.empty()) throw Error(ErrorCode::EmptyAudio, "cannot frame an empty clip");
  const std::size_t count = frame_count(signal.size(), cfg);
  std::vector<std::vector<double>> frames(count, std::vector<double>(cfg.frame_length, 0.0));
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t start = i * cfg.hop_length;
    const std::size_t end = std::min(start + cfg.frame_length, signal.size());
    std::copy(signal.begin() + static_cast<std::ptrdiff_t>(start),
              signal.begin() + static_cast<std::ptrdiff_t>(end), frames[i].begin());
  }
  return frames;
}

// ---------------------------------------------------------------------------
// Time domain

/// Mean of squared amplitudes over the frame.
inline double energy(std::span<const double> frame) {
  if (frame.empty()) return 0.0;
  double sum = 0.0;
  for (double x : frame) sum += x * x;
  return sum / static_cast<double>(frame.size());
}

/// Sign changes between adjacent samples divided by the frame length.
/// Zero counts as positive.
inline double zero_crossing_rate(std::span<const double> frame) {
  if (frame.empty()) return 0.0;
  std::size_t changes = 0;
  for (std::size_t n = 1; n < frame.size(); ++n) {
    if ((frame[n] >= 0.0) != (frame[n - 1] >= 0.0)) ++changes;
  }
  return static_cast<double>(changes) / static_cast<double>(frame.size());
}

inline double shannon_entropy_bits(std::span<const double> p) {
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log2(v);
  }
  return h;
}

inline double energy_entropy(std::span<const double> frame,
                             std::size_t n_sub = kEnergySubframes) {
  if (n_sub == 0 || frame.size() % n_sub != 0) {
    throw Error(ErrorCode::BadSubframeCount, std::to_string(n_sub) + " sub-frames do not divide " +
                                                 std::to_string(frame.size()));
  }
  const std::size_t len = frame.size() / n_sub;
  std::vector<double> sub(n_sub, 0.0);
  double total = 0.0;
  for (std::size_t j = 0; j < n_sub; ++j) {
    for (std::size_t n = 0; n < len; ++n) sub[j] += frame[j * len + n] * frame[j * len + n];
    total += sub[j];
  }
  for (auto& e : sub) e = total > 0.0 ? e / total : 1.0 / static_cast<double>(n_sub);
  return shannon_entropy_bits(sub);
}

// ---------------------------------------------------------------------------
// Spectrum

/// Magnitudes of bins 0..W_L/2 of a real frame; bin k sits at k * bin_hz.
struct Spectrum {
  std::vector<double> magnitudes;
  double bin_hz = 0.0;

  std::size_t size() const noexcept { return magnitudes.size(); }
  double frequency(std::size_t k) const { return static_cast<double>(k) * bin_hz; }
  double nyquist() const { return frequency(magnitudes.empty() ? 0 : magnitudes.size() - 1); }
};

namespace detail {

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

/// In-place iterative radix-2 FFT.
inline void fft_radix2(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double angle = -2.0 * std::numbers::pi / static_cast<double>(len);
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> w = std::polar(1.0, angle * static_cast<double>(k));
        const auto u = a[i + k];
        const auto v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
      }
    }
  }
}

}  // namespace detail

inline Spectrum magnitude_spectrum(std::span<const double> frame, int sample_rate) {
  const std::size_t n = frame.size();
  Spectrum spec;
  spec.bin_hz = static_cast<double>(sample_rate) / static_cast<double>(n);
  spec.magnitudes.assign(n / 2 + 1, 0.0);
  if (detail::is_power_of_two(n)) {
    std::vector<std::complex<double>> buf(frame.begin(), frame.end());
    detail::fft_radix2(buf);
    for (std::size_t k = 0; k <= n / 2; ++k) spec.magnitudes[k] = std::abs(buf[k]);
  } else {
    for (std::size_t k = 0; k <= n / 2; ++k) {
      std::complex<double> acc{};
      for (std::size_t t = 0; t < n; ++t) {
        const double angle = -2.0 * std::numbers::pi * static_cast<double>(k * t % n) /
                             static_cast<double>(n);
        acc += frame[t] * std::polar(1.0, angle);
      }
      spec.magnitudes[k] = std::abs(acc);
    }
  }
  return spec;
}

/// (centroid, spread) in Hz weighted by squared magnitude; (0, 0) for a
/// silent spectrum. Plain magnitude weights let the 1/d leakage tail of an
/// unwindowed off-bin tone drag the centroid far above the tone.
inline std::pair<double, double> spectral_centroid_spread(const Spectrum& spec) {
  double total = 0.0, weighted = 0.0;
  for (std::size_t k = 0; k < spec.size(); ++k) {
    const double p = spec.magnitudes[k] * spec.magnitudes[k];
    total += p;
    weighted += spec.frequency(k) * p;
  }
  if (total <= 0.0) return {0.0, 0.0};
  const double centroid = weighted / total;
  double var = 0.0;
  for (std::size_t k = 0; k < spec.size(); ++k) {
    const double d = spec.frequency(k) - centroid;
    var += d * d * spec.magnitudes[k] * spec.magnitudes[k];
  }
  return {centroid, std::sqrt(var / total)};
}

/// Band b spans bins [floor(b*K/n_bands), floor((b+1)*K/n_bands)).
inline std::vector<std::size_t> band_edges(std::size_t bins, std::size_t n_bands) {
  std::vector<std::size_t> edges(n_bands + 1);
  for (std::size_t b = 0; b <= n_bands; ++b) edges[b] = b * bins / n_bands;
  return edges;
}

inline double spectral_entropy(const Spectrum& spec, std::size_t n_bands = kSpectralEntropyBands) {
  const auto edges = band_edges(spec.size(), n_bands);
  std::vector<double> band(n_bands, 0.0);
  double total = 0.0;
  for (std::size_t b = 0; b < n_bands; ++b) {
    for (std::size_t k = edges[b]; k < edges[b + 1]; ++k) band[b] += spec.magnitudes[k] * spec.magnitudes[k];
    total += band[b];
  }
  for (auto& e : band) e = total > 0.0 ? e / total : 1.0 / static_cast<double>(n_bands);
  return shannon_entropy_bits(band);
}

namespace detail {

inline std::vector<double> unit_sum(std::span<const double> m) {
  double total = 0.0;
  for (double v : m) total += v;
  std::vector<double> out(m.size());
  for (std::size_t k = 0; k < m.size(); ++k) {
    out[k] = total > 0.0 ? m[k] / total : 1.0 / static_cast<double>(m.size());
  }
  return out;
}

}  // namespace detail

/// Squared difference of unit-sum-normalized magnitudes between two frames.
inline double spectral_flux(const Spectrum& current, const Spectrum& previous) {
  if (current.size() != previous.size()) {
    throw Error(ErrorCode::LengthMismatch, "spectra differ in length");
  }
  const auto a = detail::unit_sum(current.magnitudes);
  const auto b = detail::unit_sum(previous.magnitudes);
  double flux = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) flux += (a[k] - b[k]) * (a[k] - b[k]);
  return flux;
}

/// Lowest bin frequency whose cumulative energy reaches `fraction` of the total.
inline double spectral_rolloff(const Spectrum& spec, double fraction = kRolloffFraction) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw Error(ErrorCode::BadFraction, "rolloff fraction must lie in (0, 1)");
  }
  double total = 0.0;
  for (double m : spec.magnitudes) total += m * m;
  if (total <= 0.0) return 0.0;
  const double target = fraction * total;
  double cumulative = 0.0;
  for (std::size_t k = 0; k < spec.size(); ++k) {
    cumulative += spec.magnitudes[k] * spec.magnitudes[k];
    if (cumulative >= target) return spec.frequency(k);
  }
  return spec.nyquist();
}

// ---------------------------------------------------------------------------
// MFCC and chroma

inline double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
inline double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

/// Triangular filter weights, one row per filter, over the spectrum's bins.
/// Corner frequencies are equally spaced in mel between 0 and the Nyquist
/// frequency; weights are evaluated at each bin's exact frequency.
inline std::vector<std::vector<double>> mel_filterbank(std::size_t bins, double bin_hz,
                                                       double nyquist_hz,
                                                       std::size_t n_filters = kMelFilters) {
  std::vector<double> corners(n_filters + 2);
  const double top = hz_to_mel(nyquist_hz);
  for (std::size_t i = 0; i < corners.size(); ++i) {
    corners[i] = mel_to_hz(top * static_cast<double>(i) / static_cast<double>(n_filters + 1));
  }
  std::vector<std::vector<double>> bank(n_filters, std::vector<double>(bins, 0.0));
  for (std::size_t m = 0; m < n_filters; ++m) {
    const double lo = corners[m], mid = corners[m + 1], hi = corners[m + 2];
    for (std::size_t k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * bin_hz;
      if (f > lo && f < mid) {
        bank[m][k] = (f - lo) / (mid - lo);
      } else if (f >= mid && f < hi) {
        bank[m][k] = (hi - f) / (hi - mid);
      }
    }
  }
  return bank;
}

/// Orthonormal DCT-II.
inline std::vector<double> dct2_orthonormal(std::span<const double> x, std::size_t n_out) {
  const std::size_t n = x.size();
  std::vector<double> out(n_out, 0.0);
  for (std::size_t k = 0; k < n_out; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      acc += x[i] * std::cos(std::numbers::pi * static_cast<double>(k) *
                             (static_cast<double>(i) + 0.5) / static_cast<double>(n));
    }
    const double scale = k == 0 ? std::sqrt(1.0 / static_cast<double>(n))
                                : std::sqrt(2.0 / static_cast<double>(n));
    out[k] = scale * acc;
  }
  return out;
}

inline std::vector<double> mfcc_from_bank(const Spectrum& spec,
                                          const std::vector<std::vector<double>>& bank,
                                          std::size_t n_coeffs = kMfccCoeffs) {
  std::vector<double> log_energy(bank.size());
  for (std::size_t m = 0; m < bank.size(); ++m) {
    double e = 0.0;
    for (std::size_t k = 0; k < spec.size(); ++k) {
      e += bank[m][k] * spec.magnitudes[k] * spec.magnitudes[k];
    }
    log_energy[m] = std::log(std::max(e, kLogFloor));
  }
  return dct2_orthonormal(log_energy, n_coeffs);
}

inline std::vector<double> mfcc(const Spectrum& spec, std::size_t n_filters = kMelFilters,
                                std::size_t n_coeffs = kMfccCoeffs) {
  const auto bank = mel_filterbank(spec.size(), spec.bin_hz, spec.nyquist(), n_filters);
  return mfcc_from_bank(spec, bank, n_coeffs);
}

/// Equal-tempered pitch class of a frequency, C = 0 ... A = 9 ... B = 11.
inline std::size_t pitch_class(double hz) {
  const long midi = std::lround(12.0 * std::log2(hz / 440.0)) + 69;
  return static_cast<std::size_t>(((midi % 12) + 12) % 12);
}

/// Per pitch class, log(mean magnitude + 1e-10) over the bins (>= 20 Hz) that
/// fold onto it; log(1e-10) for classes with no bins.
inline std::vector<double> chroma_vector(const Spectrum& spec) {
  std::vector<double> sum(kChromaBins, 0.0);
  std::vector<std::size_t> count(kChromaBins, 0);
  for (std::size_t k = 0; k < spec.size(); ++k) {
    const double f = spec.frequency(k);
    if (f < kChromaMinHz) continue;
    const auto c = pitch_class(f);
    sum[c] += spec.magnitudes[k];
    ++count[c];
  }
  std::vector<double> out(kChromaBins);
  for (std::size_t c = 0; c < kChromaBins; ++c) {
    const double mean = count[c] > 0 ? sum[c] / static_cast<double>(count[c]) : 0.0;
    out[c] = std::log(mean + kLogFloor);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Clip summary

using AudioFeatureVector = std::array<double, kAudioFeatureCount>;

inline AudioFeatureVector extract_audio_features(std::span<const double> samples,
                                                 const FrameConfig& cfg = {}) {
  const auto frames = frame_signal(samples, cfg);
  AudioFeatureVector sum{};
  const auto bins = cfg.frame_length / 2 + 1;
  const double bin_hz = static_cast<double>(cfg.sample_rate) / static_cast<double>(cfg.frame_length);
  const auto bank = mel_filterbank(bins, bin_hz, static_cast<double>(bins - 1) * bin_hz);

  Spectrum previous;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const auto& frame = frames[i];
    const auto spec = magnitude_spectrum(frame, cfg.sample_rate);
    const auto [centroid, spread] = spectral_centroid_spread(spec);
    std::array<double, 8> scalar = {
        energy(frame),
        zero_crossing_rate(frame),
        energy_entropy(frame),
        centroid,
        spread,
        spectral_entropy(spec),
        i == 0 ? 0.0 : spectral_flux(spec, previous),
        spectral_rolloff(spec),
    };
    std::size_t j = 0;
    for (double v : scalar) sum[j++] += v;
    for (double v : mfcc_from_bank(spec, bank)) sum[j++] += v;
    for (double v : chroma_vector(spec)) sum[j++] += v;
    previous = spec;
  }
  for (auto& v : sum) v /= static_cast<double>(frames.size());
  return sum;
}

inline AudioFeatureVector extract_audio_features(const AudioClip& clip,
                                                 const FrameConfig& cfg = {}) {
  FrameConfig c = cfg;
  c.sample_rate = clip.sample_rate;
  return extract_audio_features(std::span<const double>(clip.samples), c);
}

}  // namespace modhate
