#pragma once

// TrainedModel bundles a fitted classifier with the train-split
// standardization and the selected feature indices, so prediction accepts
// rows in the raw feature space. Models persist as versioned JSON.

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "modhate/classifiers.hpp"
#include "modhate/error.hpp"
#include "modhate/feature_selection.hpp"
#include "modhate/matrix.hpp"
#include "modhate/text_io.hpp"
#include "modhate/tree.hpp"

namespace modhate {

using ModelPayload = std::variant<LinearModel, KnnModel, GaussianNbModel, DecisionTree,
                                  RandomForestModel, AdaBoostModel>;

inline constexpr int kModelFormatVersion = 1;

struct TrainedModel {
  Hyperparams hyperparams;
  std::size_t input_dim = 0;  // raw feature width accepted by predict
  StandardizationParams standardization;
  std::vector<std::size_t> selected;
  ModelPayload payload;

  Algorithm algorithm() const { return hyperparams.algorithm; }

  friend bool operator==(const TrainedModel&, const TrainedModel&) = default;
};

/// Fits the classifier on the trained-space view: raw rows are standardized
/// with train statistics and reduced to `selected` (all columns when empty).
inline TrainedModel train_model(const Matrix& raw_train, const Labels& y, const Hyperparams& hp,
                                std::vector<std::size_t> selected = {}) {
  detail::check_training_set(raw_train, y, true);
  hp.validate();
  if (selected.empty()) selected = select_all(raw_train.cols()).kept;
  for (auto j : selected) {
    if (j >= raw_train.cols()) throw Error(ErrorCode::DimensionMismatch, "selected index out of range");
  }
  TrainedModel m;
  m.hyperparams = hp;
  m.input_dim = raw_train.cols();
  m.standardization = fit_standardization(raw_train);
  m.selected = std::move(selected);
  const Matrix X = m.standardization.apply(raw_train).select_columns(m.selected);

  switch (hp.algorithm) {
    case Algorithm::LogReg: m.payload = train_logreg(X, y, hp); break;
    case Algorithm::Svm: m.payload = train_svm(X, y, hp); break;
    case Algorithm::Knn: m.payload = train_knn(X, y, hp); break;
    case Algorithm::NaiveBayes: m.payload = train_nb(X, y, hp); break;
    case Algorithm::DTree: m.payload = train_dtree(X, y, hp); break;
    case Algorithm::RForest: m.payload = train_rforest(X, y, hp); break;
    case Algorithm::AdaBoost: m.payload = train_adaboost(X, y, hp); break;
  }
  return m;
}

inline Labels predict(const TrainedModel& model, const Matrix& raw) {
  Labels out;
  if (raw.rows() == 0) return out;
  detail::check_width(model.input_dim, raw.cols());
  out.reserve(raw.rows());
  std::vector<double> z(model.input_dim), x(model.selected.size());
  for (std::size_t i = 0; i < raw.rows(); ++i) {
    model.standardization.apply_row(raw.row(i), z);
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = z[model.selected[j]];
    out.push_back(std::visit([&](const auto& p) { return p.predict(x); }, model.payload));
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON

using json = nlohmann::json;

namespace detail {

inline json tree_to_json(const DecisionTree& t, std::size_t i = 0) {
  const auto& n = t.nodes[i];
  if (n.leaf) return json{{"label", n.label}, {"counts", n.counts}};
  return json{{"feature", n.feature},
              {"threshold", n.threshold},
              {"counts", n.counts},
              {"label", n.label},
              {"left", tree_to_json(t, static_cast<std::size_t>(n.left))},
              {"right", tree_to_json(t, static_cast<std::size_t>(n.right))}};
}

inline std::size_t tree_from_json(const json& j, DecisionTree& t) {
  TreeNode node;
  node.label = j.at("label").get<int>();
  node.counts = j.at("counts").get<std::array<double, 2>>();
  const std::size_t id = t.nodes.size();
  t.nodes.push_back(node);
  if (j.contains("left")) {
    const auto l = tree_from_json(j.at("left"), t);
    const auto r = tree_from_json(j.at("right"), t);
    auto& n = t.nodes[id];
    n.leaf = false;
    n.feature = j.at("feature").get<std::size_t>();
    n.threshold = j.at("threshold").get<double>();
    n.left = static_cast<std::int32_t>(l);
    n.right = static_cast<std::int32_t>(r);
  }
  return id;
}

inline json tree_document(const DecisionTree& t) {
  return json{{"n_features", t.n_features}, {"root", tree_to_json(t)}};
}

inline DecisionTree tree_from_document(const json& j) {
  DecisionTree t;
  t.n_features = j.at("n_features").get<std::size_t>();
  tree_from_json(j.at("root"), t);
  return t;
}

inline json matrix_to_json(const Matrix& m) {
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.data()}};
}

inline Matrix matrix_from_json(const json& j) {
  const auto rows = j.at("rows").get<std::size_t>();
  const auto cols = j.at("cols").get<std::size_t>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (data.size() != rows * cols) throw Error(ErrorCode::BadModelFile, "matrix size mismatch");
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    std::copy(data.begin() + static_cast<std::ptrdiff_t>(i * cols),
              data.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols), m.row(i).begin());
  }
  return m;
}

struct PayloadToJson {
  json operator()(const LinearModel& m) const {
    return {{"weights", m.weights}, {"bias", m.bias}};
  }
  json operator()(const KnnModel& m) const {
    return {{"k", m.k}, {"train_x", matrix_to_json(m.train_x)}, {"train_y", m.train_y}};
  }
  json operator()(const GaussianNbModel& m) const {
    return {{"log_prior", m.log_prior}, {"mean", m.mean}, {"var", m.var}};
  }
  json operator()(const DecisionTree& t) const { return tree_document(t); }
  json operator()(const RandomForestModel& f) const {
    json trees = json::array();
    for (const auto& t : f.trees) trees.push_back(tree_document(t));
    return {{"trees", trees}};
  }
  json operator()(const AdaBoostModel& a) const {
    json stumps = json::array();
    for (const auto& t : a.stumps) stumps.push_back(tree_document(t));
    return {{"stumps", stumps}, {"alphas", a.alphas}};
  }
};

inline ModelPayload payload_from_json(Algorithm algo, const json& j) {
  switch (algo) {
    case Algorithm::LogReg:
    case Algorithm::Svm:
      return LinearModel{j.at("weights").get<std::vector<double>>(), j.at("bias").get<double>()};
    case Algorithm::Knn:
      return KnnModel{matrix_from_json(j.at("train_x")), j.at("train_y").get<Labels>(),
                      j.at("k").get<std::size_t>()};
    case Algorithm::NaiveBayes: {
      GaussianNbModel m;
      m.log_prior = j.at("log_prior").get<std::array<double, 2>>();
      m.mean = j.at("mean").get<std::array<std::vector<double>, 2>>();
      m.var = j.at("var").get<std::array<std::vector<double>, 2>>();
      return m;
    }
    case Algorithm::DTree: return tree_from_document(j);
    case Algorithm::RForest: {
      RandomForestModel f;
      for (const auto& t : j.at("trees")) f.trees.push_back(tree_from_document(t));
      return f;
    }
    case Algorithm::AdaBoost: {
      AdaBoostModel a;
      for (const auto& t : j.at("stumps")) a.stumps.push_back(tree_from_document(t));
      a.alphas = j.at("alphas").get<std::vector<double>>();
      return a;
    }
  }
  throw Error(ErrorCode::BadModelFile, "unknown algorithm");
}

}  // namespace detail

inline json hyperparams_to_json(const Hyperparams& hp) {
  return json{{"algorithm", to_string(hp.algorithm)},
              {"learning_rate", hp.learning_rate},
              {"iterations", hp.iterations},
              {"lambda", hp.lambda},
              {"epochs", hp.epochs},
              {"k_neighbors", hp.k_neighbors},
              {"max_depth", hp.max_depth},
              {"min_samples_split", hp.min_samples_split},
              {"forest_size", hp.forest_size},
              {"boost_rounds", hp.boost_rounds},
              {"seed", hp.seed}};
}

inline Hyperparams hyperparams_from_json(const json& j) {
  Hyperparams hp;
  hp.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
  hp.learning_rate = j.at("learning_rate").get<double>();
  hp.iterations = j.at("iterations").get<std::size_t>();
  hp.lambda = j.at("lambda").get<double>();
  hp.epochs = j.at("epochs").get<std::size_t>();
  hp.k_neighbors = j.at("k_neighbors").get<std::size_t>();
  hp.max_depth = j.at("max_depth").get<std::size_t>();
  hp.min_samples_split = j.at("min_samples_split").get<std::size_t>();
  hp.forest_size = j.at("forest_size").get<std::size_t>();
  hp.boost_rounds = j.at("boost_rounds").get<std::size_t>();
  hp.seed = j.at("seed").get<std::uint64_t>();
  return hp;
}

inline json model_to_json(const TrainedModel& m) {
  return json{{"format", "modhate-model"},
              {"version", kModelFormatVersion},
              {"algorithm", to_string(m.algorithm())},
              {"hyperparams", hyperparams_to_json(m.hyperparams)},
              {"input_dim", m.input_dim},
              {"standardization",
               {{"mean", m.standardization.mean}, {"stddev", m.standardization.stddev}}},
              {"selected", m.selected},
              {"params", std::visit(detail::PayloadToJson{}, m.payload)}};
}

inline TrainedModel model_from_json(const json& j) {
  try {
    if (j.at("format").get<std::string>() != "modhate-model") {
      throw Error(ErrorCode::BadModelFile, "not a model document");
    }
    if (j.at("version").get<int>() != kModelFormatVersion) {
      throw Error(ErrorCode::BadModelFile, "unsupported model version");
    }
    TrainedModel m;
    m.hyperparams = hyperparams_from_json(j.at("hyperparams"));
    m.input_dim = j.at("input_dim").get<std::size_t>();
    m.standardization.mean = j.at("standardization").at("mean").get<std::vector<double>>();
    m.standardization.stddev = j.at("standardization").at("stddev").get<std::vector<double>>();
    m.selected = j.at("selected").get<std::vector<std::size_t>>();
    m.payload = detail::payload_from_json(m.hyperparams.algorithm, j.at("params"));
    if (m.standardization.size() != m.input_dim) {
      throw Error(ErrorCode::BadModelFile, "standardization width differs from input_dim");
    }
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BadModelFile, e.what());
  }
}

inline std::string serialize_model(const TrainedModel& m) { return model_to_json(m).dump(1) + "\n"; }

inline TrainedModel deserialize_model(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BadModelFile, e.what());
  }
  return model_from_json(j);
}

inline void save_model(const std::filesystem::path& path, const TrainedModel& m) {
  text_io::write_file(path, serialize_model(m));
}

inline TrainedModel load_model(const std::filesystem::path& path) {
  return deserialize_model(text_io::read_file(path));
}

}  // namespace modhate
