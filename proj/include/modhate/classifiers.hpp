#pragma once

// Binary classifiers trained from scratch on an already-transformed feature
// matrix: logistic regression, linear SVM, k-nearest neighbours and Gaussian
// naive Bayes. Tree-based learners live in tree.hpp.
//
// Labels are 0 (non-hate) and 1 (hate). Every tie resolves to 0.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "modhate/error.hpp"
#include "modhate/matrix.hpp"

namespace modhate {

enum class Algorithm { Svm, RForest, LogReg, AdaBoost, Knn, NaiveBayes, DTree };

inline constexpr std::array<Algorithm, 7> kAllAlgorithms = {
    Algorithm::Svm, Algorithm::RForest,    Algorithm::LogReg, Algorithm::AdaBoost,
    Algorithm::Knn, Algorithm::NaiveBayes, Algorithm::DTree};

inline std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Svm: return "svm";
    case Algorithm::RForest: return "rforest";
    case Algorithm::LogReg: return "logreg";
    case Algorithm::AdaBoost: return "adaboost";
    case Algorithm::Knn: return "knn";
    case Algorithm::NaiveBayes: return "nb";
    case Algorithm::DTree: return "dtree";
  }
  return "?";
}

inline Algorithm parse_algorithm(std::string_view s) {
  for (auto a : kAllAlgorithms) {
    if (to_string(a) == s) return a;
  }
  throw Error(ErrorCode::BadHyperparameter, "unknown algorithm '" + std::string(s) + "'");
}

/// Display names used in reports.
inline std::string_view display_name(Algorithm a) {
  switch (a) {
    case Algorithm::Svm: return "SVM";
    case Algorithm::RForest: return "Random Forest";
    case Algorithm::LogReg: return "Logistic Regression";
    case Algorithm::AdaBoost: return "Adaboost";
    case Algorithm::Knn: return "k-NN";
    case Algorithm::NaiveBayes: return "Naive Bayes";
    case Algorithm::DTree: return "Decision Tree";
  }
  return "?";
}

struct Hyperparams {
  Algorithm algorithm = Algorithm::LogReg;
  double learning_rate = 0.1;        // logreg
  std::size_t iterations = 1000;     // logreg
  double lambda = 1e-4;              // logreg, svm
  std::size_t epochs = 1000;         // svm
  std::size_t k_neighbors = 5;       // knn
  std::size_t max_depth = 10;        // dtree, rforest
  std::size_t min_samples_split = 2; // dtree, rforest
  std::size_t forest_size = 100;     // rforest
  std::size_t boost_rounds = 50;     // adaboost
  std::uint64_t seed = 0;            // rforest

  void validate() const {
    if (!(learning_rate > 0.0) || !(lambda > 0.0) || iterations == 0 || epochs == 0 ||
        k_neighbors == 0 || max_depth == 0 || min_samples_split == 0 || forest_size == 0 ||
        boost_rounds == 0) {
      throw Error(ErrorCode::BadHyperparameter, "numeric hyperparameters must be positive");
    }
  }

  friend bool operator==(const Hyperparams&, const Hyperparams&) = default;
};

namespace detail {

inline void check_training_set(const Matrix& X, const Labels& y, bool need_both_classes) {
  if (X.empty() || X.cols() == 0) throw Error(ErrorCode::EmptyMatrix, "empty training matrix");
  if (X.rows() != y.size()) {
    throw Error(ErrorCode::DimensionMismatch, std::to_string(X.rows()) + " rows but " +
                                                  std::to_string(y.size()) + " labels");
  }
  bool seen[2] = {false, false};
  for (int label : y) {
    if (label != 0 && label != 1) throw Error(ErrorCode::BadLabel, "labels must be 0 or 1");
    seen[label] = true;
  }
  if (need_both_classes && !(seen[0] && seen[1])) {
    throw Error(ErrorCode::SingleClassTrainingSet, "training labels contain a single class");
  }
}

inline void check_width(std::size_t expected, std::size_t got) {
  if (expected != got) {
    throw Error(ErrorCode::DimensionMismatch, "expected " + std::to_string(expected) +
                                                  " features, got " + std::to_string(got));
  }
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Linear models

struct LinearModel {
  std::vector<double> weights;
  double bias = 0.0;

  double score(std::span<const double> x) const {
    detail::check_width(weights.size(), x.size());
    return detail::dot(weights, x) + bias;
  }
  double probability(std::span<const double> x) const { return detail::sigmoid(score(x)); }
  /// Positive score means hate; a zero score is a tie and maps to 0.
  int predict(std::span<const double> x) const { return score(x) > 0.0 ? 1 : 0; }

  friend bool operator==(const LinearModel&, const LinearModel&) = default;
};

/// Mean log-loss plus (lambda/2)||w||^2; the bias is not penalized.
inline double logistic_loss(const LinearModel& m, const Matrix& X, const Labels& y,
                            double lambda) {
  double loss = 0.0;
  for (std::size_t i = 0; i < X.rows(); ++i) {
    const double z = m.score(X.row(i));
    // log(1 + exp(-z)) for y=1, log(1 + exp(z)) for y=0, computed stably
    const double s = y[i] == 1 ? -z : z;
    loss += s > 0 ? s + std::log1p(std::exp(-s)) : std::log1p(std::exp(s));
  }
  loss /= static_cast<double>(X.rows());
  return loss + 0.5 * lambda * detail::dot(m.weights, m.weights);
}

/// Full-batch gradient descent from zero weights. When `loss_trace` is given it
/// receives the objective after every iteration.
inline LinearModel train_logreg(const Matrix& X, const Labels& y, const Hyperparams& hp,
                                std::vector<double>* loss_trace = nullptr) {
  detail::check_training_set(X, y, true);
  hp.validate();
  const std::size_t n = X.rows(), d = X.cols();
  LinearModel m{std::vector<double>(d, 0.0), 0.0};
  std::vector<double> grad(d);
  for (std::size_t it = 0; it < hp.iterations; ++it) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double grad_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto x = X.row(i);
      const double err = m.probability(x) - static_cast<double>(y[i]);
      for (std::size_t j = 0; j < d; ++j) grad[j] += err * x[j];
      grad_b += err;
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t j = 0; j < d; ++j) {
      m.weights[j] -= hp.learning_rate * (grad[j] * inv_n + hp.lambda * m.weights[j]);
    }
    m.bias -= hp.learning_rate * grad_b * inv_n;
    if (loss_trace) loss_trace->push_back(logistic_loss(m, X, y, hp.lambda));
  }
  return m;
}

/// Linear SVM by deterministic stochastic subgradient descent on the
/// L2-regularized hinge loss. The bias is an extra weight on a constant 1
/// input (so it is regularized too); samples are visited in index order and
/// step t uses rate 1 / (lambda * t).
inline LinearModel train_svm(const Matrix& X, const Labels& y, const Hyperparams& hp) {
  detail::check_training_set(X, y, true);
  hp.validate();
  const std::size_t n = X.rows(), d = X.cols();
  std::vector<double> w(d, 0.0);
  double b = 0.0;
  std::size_t t = 0;
  for (std::size_t epoch = 0; epoch < hp.epochs; ++epoch) {
    for (std::size_t i = 0; i < n; ++i) {
      ++t;
      const double eta = 1.0 / (hp.lambda * static_cast<double>(t));
      const double sign = y[i] == 1 ? 1.0 : -1.0;
      const auto x = X.row(i);
      const double margin = sign * (detail::dot(w, x) + b);
      const double shrink = 1.0 - eta * hp.lambda;
      for (auto& wj : w) wj *= shrink;
      b *= shrink;
      if (margin < 1.0) {
        for (std::size_t j = 0; j < d; ++j) w[j] += eta * sign * x[j];
        b += eta * sign;
      }
    }
  }
  return LinearModel{std::move(w), b};
}

/// Mean hinge loss max(0, 1 - y * score) with y in {-1, +1}.
inline double hinge_loss(const LinearModel& m, const Matrix& X, const Labels& y) {
  double loss = 0.0;
  for (std::size_t i = 0; i < X.rows(); ++i) {
    const double sign = y[i] == 1 ? 1.0 : -1.0;
    loss += std::max(0.0, 1.0 - sign * m.score(X.row(i)));
  }
  return X.rows() ? loss / static_cast<double>(X.rows()) : 0.0;
}

// ---------------------------------------------------------------------------
// k-nearest neighbours

struct KnnModel {
  Matrix train_x;
  Labels train_y;
  std::size_t k = 5;

  /// Indices of the k nearest training rows by Euclidean distance; equal
  /// distances keep the lower training index first.
  std::vector<std::size_t> neighbours(std::span<const double> x) const {
    detail::check_width(train_x.cols(), x.size());
    std::vector<std::pair<double, std::size_t>> dist(train_x.rows());
    for (std::size_t i = 0; i < train_x.rows(); ++i) {
      const auto r = train_x.row(i);
      double s = 0.0;
      for (std::size_t j = 0; j < r.size(); ++j) s += (r[j] - x[j]) * (r[j] - x[j]);
      dist[i] = {s, i};
    }
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
    std::vector<std::size_t> out(k);
    for (std::size_t i = 0; i < k; ++i) out[i] = dist[i].second;
    return out;
  }

  int predict(std::span<const double> x) const {
    std::size_t hate = 0;
    for (auto i : neighbours(x)) hate += static_cast<std::size_t>(train_y[i]);
    return 2 * hate > k ? 1 : 0;
  }

  friend bool operator==(const KnnModel&, const KnnModel&) = default;
};

inline KnnModel train_knn(const Matrix& X, const Labels& y, const Hyperparams& hp) {
  detail::check_training_set(X, y, false);
  hp.validate();
  if (hp.k_neighbors % 2 == 0) {
    throw Error(ErrorCode::EvenK, "k=" + std::to_string(hp.k_neighbors) + " must be odd");
  }
  if (hp.k_neighbors > X.rows()) {
    throw Error(ErrorCode::KTooLarge, "k=" + std::to_string(hp.k_neighbors) + " exceeds " +
                                          std::to_string(X.rows()) + " training samples");
  }
  return KnnModel{X, y, hp.k_neighbors};
}

// ---------------------------------------------------------------------------
// Gaussian naive Bayes

inline constexpr double kVarSmoothing = 1e-9;

struct GaussianNbModel {
  std::array<double, 2> log_prior{};
  std::array<std::vector<double>, 2> mean;
  std::array<std::vector<double>, 2> var;

  std::array<double, 2> log_posteriors(std::span<const double> x) const {
    detail::check_width(mean[0].size(), x.size());
    std::array<double, 2> out{};
    for (int c = 0; c < 2; ++c) {
      double lp = log_prior[c];
      for (std::size_t j = 0; j < x.size(); ++j) {
        const double d = x[j] - mean[c][j];
        lp += -0.5 * std::log(2.0 * std::numbers::pi * var[c][j]) - d * d / (2.0 * var[c][j]);
      }
      out[c] = lp;
    }
    return out;
  }

  int predict(std::span<const double> x) const {
    const auto lp = log_posteriors(x);
    return lp[1] > lp[0] ? 1 : 0;
  }

  friend bool operator==(const GaussianNbModel&, const GaussianNbModel&) = default;
};

/// Per-class priors and per-feature Gaussians; every variance is smoothed by
/// 1e-9 times the largest per-feature variance of the whole training matrix
/// (or by 1e-9 when all features are constant).
inline GaussianNbModel train_nb(const Matrix& X, const Labels& y, const Hyperparams& hp) {
  detail::check_training_set(X, y, true);
  hp.validate();
  const std::size_t n = X.rows(), d = X.cols();

  double max_var = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += X(i, j);
    mean /= static_cast<double>(n);
    double v = 0.0;
    for (std::size_t i = 0; i < n; ++i) v += (X(i, j) - mean) * (X(i, j) - mean);
    max_var = std::max(max_var, v / static_cast<double>(n));
  }
  const double epsilon = max_var > 0.0 ? kVarSmoothing * max_var : kVarSmoothing;

  GaussianNbModel m;
  for (int c = 0; c < 2; ++c) {
    std::size_t count = 0;
    m.mean[c].assign(d, 0.0);
    m.var[c].assign(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (y[i] != c) continue;
      ++count;
      for (std::size_t j = 0; j < d; ++j) m.mean[c][j] += X(i, j);
    }
    for (auto& v : m.mean[c]) v /= static_cast<double>(count);
    for (std::size_t i = 0; i < n; ++i) {
      if (y[i] != c) continue;
      for (std::size_t j = 0; j < d; ++j) {
        const double diff = X(i, j) - m.mean[c][j];
        m.var[c][j] += diff * diff;
      }
    }
    for (auto& v : m.var[c]) v = v / static_cast<double>(count) + epsilon;
    m.log_prior[c] = std::log(static_cast<double>(count) / static_cast<double>(n));
  }
  return m;
}

}  // namespace modhate
