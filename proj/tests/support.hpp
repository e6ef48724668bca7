#pragma once

// Shared test helpers: independent oracles written without reusing library
// internals, hand-rolled random generators, and scratch directories.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <map>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <unistd.h>

#include "modhate/error.hpp"
#include "modhate/matrix.hpp"
#include "modhate/random.hpp"

namespace testsupport {

namespace fs = std::filesystem;
using modhate::Labels;
using modhate::Matrix;
using modhate::Rng;

/// Fresh empty directory under the system temp dir; removed on destruction.
class ScratchDir {
 public:
  explicit ScratchDir(const std::string& name) {
    path_ = fs::temp_directory_path() / ("modhate_" + name + "_" + std::to_string(counter()++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& child) const { return path_ / child; }

 private:
  static std::uint64_t& counter() {
    static std::uint64_t c = static_cast<std::uint64_t>(::getpid()) * 1000;
    return c;
  }
  fs::path path_;
};

/// Code of the modhate::Error thrown by `fn`, or nullopt if none is thrown.
inline std::optional<modhate::ErrorCode> error_code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const modhate::Error& e) {
    return e.code();
  }
  return std::nullopt;
}

inline std::string error_message_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const modhate::Error& e) {
    return e.what();
  }
  return {};
}

// ---------------------------------------------------------------------------
// Oracles

/// |X_k| for k = 0..n/2 by the O(n^2) definition.
inline std::vector<double> naive_dft_magnitudes(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<double> out(n / 2 + 1);
  for (std::size_t k = 0; k <= n / 2; ++k) {
    long double re = 0, im = 0;
    for (std::size_t t = 0; t < n; ++t) {
      const long double angle = -2.0L * std::numbers::pi_v<long double> *
                                static_cast<long double>(k * t % n) / static_cast<long double>(n);
      re += x[t] * std::cos(angle);
      im += x[t] * std::sin(angle);
    }
    out[k] = static_cast<double>(std::sqrt(re * re + im * im));
  }
  return out;
}

/// Two-pass (rows, then columns) bilinear resampler with pixel-centre
/// alignment, returning values in the 0..255 range.
inline std::vector<double> separable_bilinear(const std::vector<std::uint8_t>& px, std::size_t w,
                                              std::size_t h, std::size_t ow, std::size_t oh) {
  auto weights = [](std::size_t out, std::size_t in) {
    std::vector<std::pair<std::size_t, double>> lo(out);
    for (std::size_t d = 0; d < out; ++d) {
      double c = (d + 0.5) * static_cast<double>(in) / static_cast<double>(out) - 0.5;
      if (c < 0) c = 0;
      if (c > static_cast<double>(in - 1)) c = static_cast<double>(in - 1);
      const double f = std::floor(c);
      lo[d] = {static_cast<std::size_t>(f), c - f};
    }
    return lo;
  };
  const auto wx = weights(ow, w), wy = weights(oh, h);
  std::vector<double> horiz(h * ow);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < ow; ++c) {
      const auto [x0, fx] = wx[c];
      const std::size_t x1 = x0 + 1 < w ? x0 + 1 : x0;
      horiz[r * ow + c] = px[r * w + x0] + fx * (static_cast<double>(px[r * w + x1]) - px[r * w + x0]);
    }
  }
  std::vector<double> out(oh * ow);
  for (std::size_t r = 0; r < oh; ++r) {
    const auto [y0, fy] = wy[r];
    const std::size_t y1 = y0 + 1 < h ? y0 + 1 : y0;
    for (std::size_t c = 0; c < ow; ++c) {
      out[r * ow + c] = horiz[y0 * ow + c] + fy * (horiz[y1 * ow + c] - horiz[y0 * ow + c]);
    }
  }
  return out;
}

/// Majority label of the k nearest rows by exhaustive scan; equal distances
/// keep the lower index, an even vote split goes to 0.
inline int brute_force_knn(const Matrix& X, const Labels& y, const std::vector<double>& q,
                           std::size_t k) {
  std::vector<std::pair<double, std::size_t>> all;
  for (std::size_t i = 0; i < X.rows(); ++i) {
    double s = 0;
    for (std::size_t j = 0; j < X.cols(); ++j) s += (X(i, j) - q[j]) * (X(i, j) - q[j]);
    all.emplace_back(s, i);
  }
  std::stable_sort(all.begin(), all.end());
  std::size_t ones = 0;
  for (std::size_t i = 0; i < k; ++i) ones += y[all[i].second] == 1;
  return 2 * ones > k ? 1 : 0;
}

/// Mutual information in bits from plain count tables.
inline double mi_bits(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  std::map<std::pair<std::size_t, std::size_t>, double> joint;
  std::map<std::size_t, double> pa, pb;
  const double n = static_cast<double>(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    joint[{a[i], b[i]}] += 1;
    pa[a[i]] += 1;
    pb[b[i]] += 1;
  }
  double mi = 0;
  for (const auto& [key, c] : joint) {
    mi += (c / n) * std::log2((c / n) / ((pa[key.first] / n) * (pb[key.second] / n)));
  }
  return mi;
}

/// Equal-width 8-bin codes of a column (single bin when constant).
inline std::vector<std::size_t> bin8(const std::vector<double>& col) {
  const double lo = *std::min_element(col.begin(), col.end());
  const double hi = *std::max_element(col.begin(), col.end());
  std::vector<std::size_t> out(col.size(), 0);
  if (hi <= lo) return out;
  for (std::size_t i = 0; i < col.size(); ++i) {
    double b = std::floor((col[i] - lo) / ((hi - lo) / 8.0));
    out[i] = static_cast<std::size_t>(std::min(b, 7.0));
  }
  return out;
}

/// Greedy MID selection recomputing every score from scratch at each step.
inline std::vector<std::size_t> exhaustive_mid_order(const Matrix& X, const Labels& y,
                                                     std::size_t k) {
  std::vector<std::vector<std::size_t>> codes;
  for (std::size_t j = 0; j < X.cols(); ++j) codes.push_back(bin8(X.column(j)));
  const std::vector<std::size_t> labels(y.begin(), y.end());
  std::vector<std::size_t> chosen;
  while (chosen.size() < k) {
    std::size_t best = X.cols();
    double best_score = -1e300;
    for (std::size_t j = 0; j < X.cols(); ++j) {
      if (std::find(chosen.begin(), chosen.end(), j) != chosen.end()) continue;
      double score = mi_bits(codes[j], labels);
      if (!chosen.empty()) {
        double red = 0;
        for (auto s : chosen) red += mi_bits(codes[j], codes[s]);
        score -= red / static_cast<double>(chosen.size());
      }
      if (score > best_score + 1e-12) {
        best = j;
        best_score = score;
      }
    }
    chosen.push_back(best);
  }
  return chosen;
}

// ---------------------------------------------------------------------------
// Generators

inline Matrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols, double lo = -1.0,
                            double hi = 1.0) {
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rng.uniform(lo, hi);
  }
  return m;
}

inline Labels random_labels(Rng& rng, std::size_t n) {
  Labels y(n);
  for (auto& v : y) v = rng.bernoulli(0.5) ? 1 : 0;
  y[0] = 0;
  if (n > 1) y[1] = 1;
  return y;
}

struct Dataset {
  Matrix X;
  Labels y;
};

/// Two unit-variance Gaussian clusters centred at +-3 along a random unit
/// direction u, classes alternating. Points on the wrong side of u.x = 0 or
/// within `margin / 2` of it are redrawn, so the set is linearly separable.
inline Dataset separable_blobs(std::uint64_t seed, std::size_t n, std::size_t d,
                               double margin = 1.0) {
  Rng rng(seed);
  std::vector<double> u(d);
  double norm = 0;
  for (auto& v : u) {
    v = rng.normal();
    norm += v * v;
  }
  for (auto& v : u) v /= std::sqrt(norm);
  Dataset out{Matrix(0, d), {}};
  std::vector<double> x(d);
  while (out.y.size() < n) {
    const int label = static_cast<int>(out.y.size() % 2);
    const double centre = label == 1 ? 3.0 : -3.0;
    double s = 0;
    for (std::size_t j = 0; j < d; ++j) {
      x[j] = centre * u[j] + rng.normal();
      s += u[j] * x[j];
    }
    if ((s > 0) != (label == 1) || std::abs(s) < margin / 2) continue;
    out.X.append_row(x);
    out.y.push_back(label);
  }
  return out;
}

/// Feature 0 determines the label (y = x0 > 0); the rest are independent noise.
inline Dataset planted_relevance(std::uint64_t seed, std::size_t n, std::size_t noise_features) {
  Rng rng(seed);
  Dataset out{Matrix(n, 1 + noise_features), Labels(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const double x0 = rng.normal();
    out.y[i] = x0 > 0 ? 1 : 0;
    out.X(i, 0) = x0;
    for (std::size_t j = 1; j <= noise_features; ++j) out.X(i, j) = rng.normal();
  }
  return out;
}

inline double accuracy(const Labels& truth, const Labels& pred) {
  std::size_t ok = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) ok += truth[i] == pred[i];
  return truth.empty() ? 0.0 : static_cast<double>(ok) / static_cast<double>(truth.size());
}

}  // namespace testsupport
