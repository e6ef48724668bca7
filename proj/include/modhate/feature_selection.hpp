#pragma once

// Train-split standardization, recursive feature elimination wrapped around
// L2 logistic regression, and greedy mRMR (difference form) on binned mutual
// information.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "modhate/classifiers.hpp"
#include "modhate/error.hpp"
#include "modhate/matrix.hpp"

namespace modhate {

struct StandardizationParams {
  std::vector<double> mean;
  std::vector<double> stddev;  // population; 0 means centre only

  std::size_t size() const noexcept { return mean.size(); }

  void apply_row(std::span<const double> in, std::span<double> out) const {
    detail::check_width(mean.size(), in.size());
    for (std::size_t j = 0; j < in.size(); ++j) {
      const double centred = in[j] - mean[j];
      out[j] = stddev[j] > 0.0 ? centred / stddev[j] : centred;
    }
  }

  Matrix apply(const Matrix& X) const {
    Matrix out(X.rows(), X.cols());
    for (std::size_t i = 0; i < X.rows(); ++i) apply_row(X.row(i), out.row(i));
    return out;
  }

  friend bool operator==(const StandardizationParams&, const StandardizationParams&) = default;
};

inline StandardizationParams fit_standardization(const Matrix& train) {
  if (train.empty()) throw Error(ErrorCode::EmptyMatrix, "cannot standardize an empty matrix");
  const std::size_t n = train.rows(), d = train.cols();
  StandardizationParams p{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) p.mean[j] += train(i, j);
  }
  for (auto& m : p.mean) m /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double diff = train(i, j) - p.mean[j];
      p.stddev[j] += diff * diff;
    }
  }
  for (auto& s : p.stddev) s = std::sqrt(s / static_cast<double>(n));
  return p;
}

struct Standardized {
  StandardizationParams params;
  Matrix train;
  Matrix other;
};

/// Statistics come from `train` only and are applied unchanged to `other`.
inline Standardized standardize_fit_apply(const Matrix& train, const Matrix& other) {
  auto params = fit_standardization(train);
  auto t = params.apply(train);
  auto o = other.empty() ? Matrix{} : params.apply(other);
  return {std::move(params), std::move(t), std::move(o)};
}

// ---------------------------------------------------------------------------

enum class SelectionMethod { None, Rfe, Mrmr };

inline std::string_view to_string(SelectionMethod m) {
  switch (m) {
    case SelectionMethod::None: return "none";
    case SelectionMethod::Rfe: return "rfe";
    case SelectionMethod::Mrmr: return "mrmr";
  }
  return "none";
}

inline SelectionMethod parse_selection_method(std::string_view s) {
  if (s == "none") return SelectionMethod::None;
  if (s == "rfe") return SelectionMethod::Rfe;
  if (s == "mrmr") return SelectionMethod::Mrmr;
  throw Error(ErrorCode::BadHyperparameter, "selection method '" + std::string(s) + "'");
}

struct SelectionResult {
  SelectionMethod method = SelectionMethod::None;
  std::size_t k = 0;
  /// Kept feature indices, ascending.
  std::vector<std::size_t> kept;
  /// RFE: features in the order they were removed. mRMR: selection order.
  std::vector<std::size_t> order;

  friend bool operator==(const SelectionResult&, const SelectionResult&) = default;
};

inline SelectionResult select_all(std::size_t d) {
  SelectionResult r;
  r.k = d;
  r.kept.resize(d);
  std::iota(r.kept.begin(), r.kept.end(), 0);
  return r;
}

/// Hyperparameters of the logistic model RFE ranks features with.
inline Hyperparams rfe_ranking_hyperparams() {
  Hyperparams hp;
  hp.algorithm = Algorithm::LogReg;
  return hp;
}

/// One feature per round: refit on the survivors, drop the smallest |weight|
/// (ties drop the highest index), stop at k.
inline SelectionResult rfe_select(const Matrix& X, const Labels& y, std::size_t k) {
  const std::size_t d = X.cols();
  if (k < 1 || k >= d) {
    throw Error(ErrorCode::BadTargetCount,
                "RFE needs 1 <= k < " + std::to_string(d) + ", got " + std::to_string(k));
  }
  const auto hp = rfe_ranking_hyperparams();
  std::vector<std::size_t> remaining(d);
  std::iota(remaining.begin(), remaining.end(), 0);
  SelectionResult result;
  result.method = SelectionMethod::Rfe;
  result.k = k;
  while (remaining.size() > k) {
    const auto model = train_logreg(X.select_columns(remaining), y, hp);
    std::size_t drop = 0;
    for (std::size_t j = 1; j < remaining.size(); ++j) {
      if (std::abs(model.weights[j]) <= std::abs(model.weights[drop])) drop = j;
    }
    result.order.push_back(remaining[drop]);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(drop));
  }
  result.kept = remaining;
  return result;
}

// ---------------------------------------------------------------------------

inline constexpr std::size_t kMiBins = 8;

/// Equal-width bin of every value over the column's range; a constant column
/// falls into a single bin. The maximum lands in the last bin.
inline std::vector<std::size_t> discretize(std::span<const double> column,
                                           std::size_t n_bins = kMiBins) {
  std::vector<std::size_t> bins(column.size(), 0);
  if (column.empty()) return bins;
  const auto [lo_it, hi_it] = std::minmax_element(column.begin(), column.end());
  const double lo = *lo_it, hi = *hi_it;
  if (!(hi > lo)) return bins;
  const double width = (hi - lo) / static_cast<double>(n_bins);
  for (std::size_t i = 0; i < column.size(); ++i) {
    const auto b = static_cast<std::size_t>((column[i] - lo) / width);
    bins[i] = std::min(b, n_bins - 1);
  }
  return bins;
}

/// Mutual information in bits between two discrete variables.
inline double discrete_mutual_information(std::span<const std::size_t> a,
                                          std::span<const std::size_t> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::LengthMismatch, "MI inputs differ in length");
  if (a.empty()) return 0.0;
  const std::size_t na = *std::max_element(a.begin(), a.end()) + 1;
  const std::size_t nb = *std::max_element(b.begin(), b.end()) + 1;
  std::vector<double> joint(na * nb, 0.0), pa(na, 0.0), pb(nb, 0.0);
  const double inv = 1.0 / static_cast<double>(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    joint[a[i] * nb + b[i]] += inv;
    pa[a[i]] += inv;
    pb[b[i]] += inv;
  }
  double mi = 0.0;
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t j = 0; j < nb; ++j) {
      const double p = joint[i * nb + j];
      if (p > 0.0) mi += p * std::log2(p / (pa[i] * pb[j]));
    }
  }
  return std::max(mi, 0.0);
}

inline double mutual_information(std::span<const double> feature, const Labels& y,
                                 std::size_t n_bins = kMiBins) {
  if (feature.size() != y.size()) {
    throw Error(ErrorCode::LengthMismatch, "feature and label lengths differ");
  }
  if (feature.size() < 2) throw Error(ErrorCode::TooFewSamples, "MI needs at least 2 samples");
  const auto bins = discretize(feature, n_bins);
  std::vector<std::size_t> labels(y.begin(), y.end());
  return discrete_mutual_information(bins, labels);
}

/// Greedy MID: first the most relevant feature, then repeatedly the feature
/// maximizing MI(f; y) - mean_s MI(f; s) over already selected s. Ties keep
/// the lowest index.
inline SelectionResult mrmr_select(const Matrix& X, const Labels& y, std::size_t k) {
  const std::size_t d = X.cols();
  if (k < 1 || k > d) {
    throw Error(ErrorCode::BadTargetCount,
                "mRMR needs 1 <= k <= " + std::to_string(d) + ", got " + std::to_string(k));
  }
  if (X.rows() != y.size()) throw Error(ErrorCode::DimensionMismatch, "rows vs labels");
  if (X.rows() < 2) throw Error(ErrorCode::TooFewSamples, "MI needs at least 2 samples");

  std::vector<std::vector<std::size_t>> binned(d);
  for (std::size_t j = 0; j < d; ++j) binned[j] = discretize(X.column(j));
  const std::vector<std::size_t> labels(y.begin(), y.end());
  std::vector<double> relevance(d);
  for (std::size_t j = 0; j < d; ++j) relevance[j] = discrete_mutual_information(binned[j], labels);

  std::vector<double> redundancy(d, 0.0);
  std::vector<bool> chosen(d, false);
  SelectionResult result;
  result.method = SelectionMethod::Mrmr;
  result.k = k;
  for (std::size_t step = 0; step < k; ++step) {
    std::size_t best = d;
    double best_score = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      if (chosen[j]) continue;
      const double score =
          step == 0 ? relevance[j] : relevance[j] - redundancy[j] / static_cast<double>(step);
      if (best == d || score > best_score) {
        best = j;
        best_score = score;
      }
    }
    chosen[best] = true;
    result.order.push_back(best);
    for (std::size_t j = 0; j < d; ++j) {
      if (!chosen[j]) redundancy[j] += discrete_mutual_information(binned[j], binned[best]);
    }
  }
  result.kept = result.order;
  std::sort(result.kept.begin(), result.kept.end());
  return result;
}

/// Runs `method` keeping k features; k >= d (or method None) keeps everything.
inline SelectionResult select_features(SelectionMethod method, const Matrix& X, const Labels& y,
                                       std::size_t k) {
  if (method == SelectionMethod::None || k >= X.cols()) {
    auto all = select_all(X.cols());
    all.method = method;
    return all;
  }
  return method == SelectionMethod::Rfe ? rfe_select(X, y, k) : mrmr_select(X, y, k);
}

}  // namespace modhate
