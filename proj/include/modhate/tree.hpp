#pragma once

// CART decision trees on (weighted) Gini impurity, random forests, and
// AdaBoost over decision stumps.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <thread>
#include <vector>

#include "modhate/classifiers.hpp"
#include "modhate/error.hpp"
#include "modhate/matrix.hpp"
#include "modhate/random.hpp"

namespace modhate {

/// Gini impurity 1 - sum p_c^2 of a two-class weight vector.
inline double gini(double w0, double w1) {
  const double total = w0 + w1;
  if (total <= 0.0) return 0.0;
  const double p0 = w0 / total, p1 = w1 / total;
  return 1.0 - p0 * p0 - p1 * p1;
}

struct TreeNode {
  bool leaf = true;
  int label = 0;
  std::array<double, 2> counts{};  // class weight reaching the node
  std::size_t feature = 0;
  double threshold = 0.0;  // x[feature] <= threshold goes left
  std::int32_t left = -1;
  std::int32_t right = -1;

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

/// Nodes stored flat; node 0 is the root.
struct DecisionTree {
  std::vector<TreeNode> nodes;
  std::size_t n_features = 0;

  const TreeNode& leaf_for(std::span<const double> x) const {
    detail::check_width(n_features, x.size());
    std::size_t i = 0;
    while (!nodes[i].leaf) {
      i = static_cast<std::size_t>(x[nodes[i].feature] <= nodes[i].threshold ? nodes[i].left
                                                                              : nodes[i].right);
    }
    return nodes[i];
  }

  int predict(std::span<const double> x) const { return leaf_for(x).label; }

  std::size_t depth() const {
    std::size_t best = 0;
    std::vector<std::pair<std::size_t, std::size_t>> stack = {{0, 0}};
    while (!stack.empty()) {
      auto [i, d] = stack.back();
      stack.pop_back();
      best = std::max(best, d);
      if (!nodes[i].leaf) {
        stack.push_back({static_cast<std::size_t>(nodes[i].left), d + 1});
        stack.push_back({static_cast<std::size_t>(nodes[i].right), d + 1});
      }
    }
    return best;
  }

  friend bool operator==(const DecisionTree&, const DecisionTree&) = default;
};

struct TreeGrowth {
  std::size_t max_depth = 10;
  std::size_t min_samples_split = 2;
  /// Features examined per split; 0 means all of them.
  std::size_t features_per_split = 0;
};

namespace detail {

struct SplitChoice {
  std::size_t feature = 0;
  double threshold = 0.0;
  double impurity = std::numeric_limits<double>::infinity();
};

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& X, const Labels& y, std::span<const double> weights,
              const TreeGrowth& growth, Rng* rng)
      : X_(X), y_(y), w_(weights), growth_(growth), rng_(rng) {}

  DecisionTree build(std::vector<std::size_t> rows) {
    tree_.n_features = X_.cols();
    grow(std::move(rows), 0);
    return std::move(tree_);
  }

 private:
  std::size_t grow(std::vector<std::size_t> rows, std::size_t depth) {
    TreeNode node;
    for (auto r : rows) node.counts[static_cast<std::size_t>(y_[r])] += w_[r];
    node.label = node.counts[1] > node.counts[0] ? 1 : 0;
    const std::size_t id = tree_.nodes.size();
    tree_.nodes.push_back(node);

    const bool pure = std::all_of(rows.begin(), rows.end(),
                                  [&](std::size_t r) { return y_[r] == y_[rows.front()]; });
    if (pure || depth >= growth_.max_depth || rows.size() < growth_.min_samples_split) return id;
    const auto split = best_split(rows);
    if (!split) return id;

    std::vector<std::size_t> left, right;
    for (auto r : rows) (X_(r, split->feature) <= split->threshold ? left : right).push_back(r);
    rows.clear();
    rows.shrink_to_fit();
    const auto l = grow(std::move(left), depth + 1);
    const auto rt = grow(std::move(right), depth + 1);
    auto& n = tree_.nodes[id];
    n.leaf = false;
    n.feature = split->feature;
    n.threshold = split->threshold;
    n.left = static_cast<std::int32_t>(l);
    n.right = static_cast<std::int32_t>(rt);
    return id;
  }

  std::vector<std::size_t> candidate_features() {
    std::vector<std::size_t> features(X_.cols());
    std::iota(features.begin(), features.end(), 0);
    const auto m = growth_.features_per_split;
    if (m == 0 || m >= features.size() || rng_ == nullptr) return features;
    // partial Fisher-Yates: the first m entries are a uniform sample
    for (std::size_t i = 0; i < m; ++i) {
      std::swap(features[i], features[i + rng_->index(features.size() - i)]);
    }
    features.resize(m);
    std::sort(features.begin(), features.end());
    return features;
  }

  /// Lowest weighted child impurity; ties keep the lower feature index and
  /// then the lower threshold.
  std::optional<SplitChoice> best_split(const std::vector<std::size_t>& rows) {
    std::optional<SplitChoice> best;
    std::array<double, 2> total{};
    for (auto r : rows) total[static_cast<std::size_t>(y_[r])] += w_[r];
    const double total_w = total[0] + total[1];
    if (total_w <= 0.0) return best;

    std::vector<std::size_t> order(rows);
    for (auto f : candidate_features()) {
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return X_(a, f) < X_(b, f) || (X_(a, f) == X_(b, f) && a < b);
      });
      std::array<double, 2> left{};
      for (std::size_t i = 0; i + 1 < order.size(); ++i) {
        left[static_cast<std::size_t>(y_[order[i]])] += w_[order[i]];
        const double lo = X_(order[i], f), hi = X_(order[i + 1], f);
        if (!(lo < hi)) continue;
        const double wl = left[0] + left[1];
        const double wr = total_w - wl;
        const double impurity =
            (wl * gini(left[0], left[1]) + wr * gini(total[0] - left[0], total[1] - left[1])) /
            total_w;
        if (!best || impurity < best->impurity) {
          double mid = lo + (hi - lo) / 2.0;
          if (!(mid < hi)) mid = lo;
          best = SplitChoice{f, mid, impurity};
        }
      }
    }
    return best;
  }

  const Matrix& X_;
  const Labels& y_;
  std::span<const double> w_;
  TreeGrowth growth_;
  Rng* rng_;
  DecisionTree tree_;
};

}  // namespace detail

/// Grows a CART tree on the given rows (duplicates allowed, as in bootstrap
/// samples). Leaf labels are the weighted majority, ties going to 0.
inline DecisionTree grow_tree(const Matrix& X, const Labels& y, std::span<const double> weights,
                              std::vector<std::size_t> rows, const TreeGrowth& growth,
                              Rng* rng = nullptr) {
  detail::TreeBuilder builder(X, y, weights, growth, rng);
  return builder.build(std::move(rows));
}

inline DecisionTree train_dtree(const Matrix& X, const Labels& y, const Hyperparams& hp) {
  detail::check_training_set(X, y, false);
  hp.validate();
  std::vector<double> w(X.rows(), 1.0);
  std::vector<std::size_t> rows(X.rows());
  std::iota(rows.begin(), rows.end(), 0);
  return grow_tree(X, y, w, std::move(rows), {hp.max_depth, hp.min_samples_split, 0});
}

// ---------------------------------------------------------------------------
// Random forest

struct RandomForestModel {
  std::vector<DecisionTree> trees;

  /// Majority of tree votes; an even split goes to 0.
  int predict(std::span<const double> x) const {
    std::size_t hate = 0;
    for (const auto& t : trees) hate += static_cast<std::size_t>(t.predict(x));
    return 2 * hate > trees.size() ? 1 : 0;
  }

  friend bool operator==(const RandomForestModel&, const RandomForestModel&) = default;
};

/// Tree t draws its bootstrap sample and split features from a generator
/// seeded with mix_seed(seed, t), so trees are independent of build order and
/// may be grown concurrently.
inline RandomForestModel train_rforest(const Matrix& X, const Labels& y, const Hyperparams& hp,
                                       unsigned threads = 0) {
  detail::check_training_set(X, y, false);
  hp.validate();
  const std::size_t n = X.rows();
  const TreeGrowth growth{hp.max_depth, hp.min_samples_split,
                          static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(X.cols()))))};
  const std::vector<double> w(n, 1.0);

  RandomForestModel forest;
  forest.trees.resize(hp.forest_size);
  auto build = [&](std::size_t t) {
    Rng rng(mix_seed(hp.seed, t));
    std::vector<std::size_t> rows(n);
    for (auto& r : rows) r = rng.index(n);
    forest.trees[t] = grow_tree(X, y, w, std::move(rows), growth, &rng);
  };

  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, hp.forest_size));
  if (threads <= 1) {
    for (std::size_t t = 0; t < hp.forest_size; ++t) build(t);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned k = 0; k < threads; ++k) {
      pool.emplace_back([&, k] {
        for (std::size_t t = k; t < hp.forest_size; t += threads) build(t);
      });
    }
  }
  return forest;
}

// ---------------------------------------------------------------------------
// AdaBoost

inline constexpr double kBoostErrorClamp = 1e-10;

/// Stump weight for a weighted error rate (clamped away from 0 and 1).
inline double adaboost_alpha(double error) {
  const double e = std::clamp(error, kBoostErrorClamp, 1.0 - kBoostErrorClamp);
  return 0.5 * std::log((1.0 - e) / e);
}

struct AdaBoostModel {
  std::vector<DecisionTree> stumps;
  std::vector<double> alphas;

  double score(std::span<const double> x) const {
    double s = 0.0;
    for (std::size_t t = 0; t < stumps.size(); ++t) {
      s += alphas[t] * (stumps[t].predict(x) == 1 ? 1.0 : -1.0);
    }
    return s;
  }
  int predict(std::span<const double> x) const { return score(x) > 0.0 ? 1 : 0; }

  friend bool operator==(const AdaBoostModel&, const AdaBoostModel&) = default;
};

struct AdaBoostTrace {
  std::vector<double> errors;       // weighted error before clamping
  std::vector<double> weight_sums;  // after renormalization
};

inline AdaBoostModel train_adaboost(const Matrix& X, const Labels& y, const Hyperparams& hp,
                                    AdaBoostTrace* trace = nullptr) {
  detail::check_training_set(X, y, false);
  hp.validate();
  const std::size_t n = X.rows();
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), 0);

  AdaBoostModel model;
  for (std::size_t round = 0; round < hp.boost_rounds; ++round) {
    auto stump = grow_tree(X, y, w, rows, {1, 2, 0});
    std::vector<double> h(n);
    double error = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      h[i] = stump.predict(X.row(i)) == 1 ? 1.0 : -1.0;
      if ((h[i] > 0.0) != (y[i] == 1)) error += w[i];
    }
    const double alpha = adaboost_alpha(error);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double sign = y[i] == 1 ? 1.0 : -1.0;
      w[i] *= std::exp(-alpha * sign * h[i]);
      sum += w[i];
    }
    for (auto& wi : w) wi /= sum;
    if (trace) {
      trace->errors.push_back(error);
      trace->weight_sums.push_back(std::accumulate(w.begin(), w.end(), 0.0));
    }
    model.stumps.push_back(std::move(stump));
    model.alphas.push_back(alpha);
  }
  return model;
}

}  // namespace modhate
