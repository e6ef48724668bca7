#pragma once

// End-to-end commands behind the CLI: extract, select, train, evaluate,
// predict and report. Every command works inside one output directory:
//
//   split.csv                    id,label,split
//   features_{audio,image,text}.csv
//   vocabulary.csv               text vocabulary (training split only)
//   warnings.txt                 per-sample read failures (id, modality, message)
//   selection_<modality>.json    kept feature indices and names
//   models/<algo>_<modality>.json
//   report_<algo>.{csv,txt}      per-algorithm evaluation
//   report.{csv,txt}             all evaluated algorithms
//   run_config_<command>.json    configuration that produced the outputs

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "modhate/audio_features.hpp"
#include "modhate/error.hpp"
#include "modhate/feature_selection.hpp"
#include "modhate/feature_table.hpp"
#include "modhate/fusion_eval.hpp"
#include "modhate/image_features.hpp"
#include "modhate/ingest.hpp"
#include "modhate/model.hpp"
#include "modhate/text_features.hpp"
#include "modhate/text_io.hpp"

namespace modhate {

namespace fs = std::filesystem;

enum class Modality { Image, Audio, Text };

inline constexpr std::array<Modality, 3> kAllModalities = {Modality::Image, Modality::Audio,
                                                           Modality::Text};

inline std::string_view to_string(Modality m) {
  switch (m) {
    case Modality::Image: return "image";
    case Modality::Audio: return "audio";
    case Modality::Text: return "text";
  }
  return "?";
}

inline Modality parse_modality(std::string_view s) {
  for (auto m : kAllModalities) {
    if (to_string(m) == s) return m;
  }
  throw Error(ErrorCode::BadHyperparameter, "unknown modality '" + std::string(s) + "'");
}

inline constexpr std::size_t kDefaultAudioK = 29;
inline constexpr std::size_t kDefaultImageK = 256;
inline constexpr std::size_t kDefaultTextK = 512;

struct RunConfig {
  fs::path manifest;
  fs::path out_dir;
  std::uint64_t seed = 42;
  TextMode text_mode = TextMode::TfIdf;
  std::optional<fs::path> stopwords;
  SelectionMethod selection = SelectionMethod::Mrmr;
  std::size_t k_audio = kDefaultAudioK;
  std::size_t k_image = kDefaultImageK;
  std::size_t k_text = kDefaultTextK;
  Hyperparams hyperparams;
  bool mixed = false;
  /// Explicit model files for evaluate/predict; empty means the default path.
  std::map<Modality, fs::path> model_paths;
  /// Extraction worker cap; 0 reads MODHATE_THREADS, else hardware threads.
  unsigned threads = 0;

  std::size_t k_for(Modality m) const {
    switch (m) {
      case Modality::Image: return k_image;
      case Modality::Audio: return k_audio;
      case Modality::Text: return k_text;
    }
    return 0;
  }

  /// Serialized form; thread count is omitted since it never changes outputs.
  nlohmann::json to_json() const {
    nlohmann::json models = nlohmann::json::object();
    for (const auto& [m, p] : model_paths) models[std::string(to_string(m))] = p.generic_string();
    return {{"manifest", manifest.generic_string()},
            {"out_dir", out_dir.generic_string()},
            {"seed", seed},
            {"text_mode", to_string(text_mode)},
            {"stopwords", stopwords ? stopwords->generic_string() : std::string()},
            {"selection", to_string(selection)},
            {"k", {{"audio", k_audio}, {"image", k_image}, {"text", k_text}}},
            {"hyperparams", hyperparams_to_json(hyperparams)},
            {"mixed", mixed},
            {"models", models}};
  }

  static RunConfig from_json(const nlohmann::json& j) {
    RunConfig c;
    c.manifest = j.at("manifest").get<std::string>();
    c.out_dir = j.at("out_dir").get<std::string>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.text_mode = parse_text_mode(j.at("text_mode").get<std::string>());
    const auto sw = j.at("stopwords").get<std::string>();
    if (!sw.empty()) c.stopwords = sw;
    c.selection = parse_selection_method(j.at("selection").get<std::string>());
    c.k_audio = j.at("k").at("audio").get<std::size_t>();
    c.k_image = j.at("k").at("image").get<std::size_t>();
    c.k_text = j.at("k").at("text").get<std::size_t>();
    c.hyperparams = hyperparams_from_json(j.at("hyperparams"));
    c.mixed = j.at("mixed").get<bool>();
    return c;
  }
};

namespace paths {
inline fs::path split(const fs::path& dir) { return dir / "split.csv"; }
inline fs::path features(const fs::path& dir, Modality m) {
  return dir / ("features_" + std::string(to_string(m)) + ".csv");
}
inline fs::path vocabulary(const fs::path& dir) { return dir / "vocabulary.csv"; }
inline fs::path warnings(const fs::path& dir) { return dir / "warnings.txt"; }
inline fs::path selection(const fs::path& dir, Modality m) {
  return dir / ("selection_" + std::string(to_string(m)) + ".json");
}
inline fs::path model(const fs::path& dir, Algorithm a, Modality m) {
  return dir / "models" / (std::string(to_string(a)) + "_" + std::string(to_string(m)) + ".json");
}
inline fs::path report(const fs::path& dir, const std::string& tag, const char* ext) {
  return dir / ("report_" + tag + ext);
}
inline fs::path run_config(const fs::path& dir, std::string_view command) {
  return dir / ("run_config_" + std::string(command) + ".json");
}
}  // namespace paths

inline void write_run_config(const RunConfig& config, std::string_view command) {
  text_io::write_file(paths::run_config(config.out_dir, command), config.to_json().dump(2) + "\n");
}

inline unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("MODHATE_THREADS")) {
    if (auto v = text_io::parse_int(env); v && *v > 0) return static_cast<unsigned>(*v);
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

inline StopWords resolve_stopwords(const RunConfig& config) {
  return config.stopwords ? load_stopwords(*config.stopwords) : default_stopwords();
}

// ---------------------------------------------------------------------------
// Split file

struct SplitTable {
  std::vector<std::string> ids;
  std::unordered_map<std::string, int> label;
  std::unordered_map<std::string, Split> split;

  std::string to_csv() const {
    std::string out = "id,label,split\n";
    for (const auto& id : ids) {
      out += id + ',' + std::to_string(label.at(id)) + ',' + std::string(to_string(split.at(id))) + '\n';
    }
    return out;
  }

  static SplitTable load(const fs::path& path) {
    SplitTable t;
    bool header = true;
    for (const auto& line : text_io::lines(text_io::read_file(path))) {
      if (line.empty()) continue;
      if (header) {
        header = false;
        continue;
      }
      const auto f = text_io::split(line);
      if (f.size() != 3 || (f[1] != "0" && f[1] != "1") || (f[2] != "train" && f[2] != "test")) {
        throw Error(ErrorCode::BadFeatureFile, "bad split row '" + line + "'");
      }
      const std::string id(f[0]);
      t.ids.push_back(id);
      t.label[id] = f[1] == "1" ? 1 : 0;
      t.split[id] = f[2] == "train" ? Split::Train : Split::Test;
    }
    return t;
  }
};

// ---------------------------------------------------------------------------
// extract

struct ExtractSummary {
  std::size_t samples = 0;
  std::map<Modality, std::size_t> rows;
  std::vector<std::string> warnings;
  std::size_t vocabulary_size = 0;
};

namespace detail {

template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
}

inline fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace detail

/// Reads every sample, writes the three feature CSVs, the split and the
/// training-split vocabulary. Manifest and split problems abort; a sample
/// whose file for some modality cannot be read is left out of that modality's
/// CSV and reported in warnings.txt.
inline ExtractSummary cmd_extract(const RunConfig& config) {
  const auto records = parse_manifest(config.manifest);
  const auto assignment = split_dataset(records, config.seed);
  const fs::path base = config.manifest.parent_path();
  const auto stopwords = resolve_stopwords(config);
  const std::size_t n = records.size();

  SplitTable split;
  for (const auto& r : records) {
    split.ids.push_back(r.id);
    split.label[r.id] = static_cast<int>(r.label);
    split.split[r.id] = Split::Test;
  }
  for (const auto& id : assignment.train_ids) split.split[id] = Split::Train;

  std::vector<std::optional<AudioFeatureVector>> audio(n);
  std::vector<std::optional<std::vector<double>>> image(n);
  std::vector<std::optional<TokenizedDoc>> docs(n);
  std::vector<std::string> audio_err(n), image_err(n), text_err(n);

  detail::parallel_for(n, resolve_threads(config.threads), [&](std::size_t i) {
    const auto& r = records[i];
    try {
      audio[i] = extract_audio_features(read_wav(detail::resolve(base, r.audio_path)));
    } catch (const Error& e) {
      audio_err[i] = e.what();
    }
    try {
      image[i] = extract_image_features(detail::resolve(base, r.image_dir));
    } catch (const Error& e) {
      image_err[i] = e.what();
    }
    try {
      docs[i] = normalize_and_tokenize(read_text_file(detail::resolve(base, r.text_path)), stopwords);
    } catch (const Error& e) {
      text_err[i] = e.what();
    }
  });

  ExtractSummary summary;
  summary.samples = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (!audio_err[i].empty()) summary.warnings.push_back(records[i].id + "\taudio\t" + audio_err[i]);
    if (!image_err[i].empty()) summary.warnings.push_back(records[i].id + "\timage\t" + image_err[i]);
    if (!text_err[i].empty()) summary.warnings.push_back(records[i].id + "\ttext\t" + text_err[i]);
  }

  std::vector<TokenizedDoc> train_docs;
  for (std::size_t i = 0; i < n; ++i) {
    if (docs[i] && split.split[records[i].id] == Split::Train) train_docs.push_back(*docs[i]);
  }
  const auto vocab = build_vocabulary(train_docs);
  summary.vocabulary_size = vocab.size();

  FeatureTable audio_table{audio_feature_names(), {}, Matrix(0, kAudioFeatureCount)};
  FeatureTable image_table{image_feature_names(), {}, Matrix(0, kImageFeatureCount)};
  FeatureTable text_table{text_feature_names(vocab), {}, Matrix(0, vocab.size())};
  for (std::size_t i = 0; i < n; ++i) {
    if (audio[i]) audio_table.add(records[i].id, *audio[i]);
    if (image[i]) image_table.add(records[i].id, *image[i]);
    if (docs[i]) text_table.add(records[i].id, vectorize(*docs[i], vocab, config.text_mode));
  }

  fs::create_directories(config.out_dir);
  text_io::write_file(paths::split(config.out_dir), split.to_csv());
  audio_table.save(paths::features(config.out_dir, Modality::Audio));
  image_table.save(paths::features(config.out_dir, Modality::Image));
  text_table.save(paths::features(config.out_dir, Modality::Text));
  text_io::write_file(paths::vocabulary(config.out_dir), vocab.dump());
  std::string warn;
  for (const auto& w : summary.warnings) warn += w + '\n';
  text_io::write_file(paths::warnings(config.out_dir), warn);
  write_run_config(config, "extract");

  summary.rows[Modality::Audio] = audio_table.rows();
  summary.rows[Modality::Image] = image_table.rows();
  summary.rows[Modality::Text] = text_table.rows();
  return summary;
}

// ---------------------------------------------------------------------------
// select / train

struct TrainingView {
  Matrix raw;
  Labels labels;
};

inline TrainingView training_rows(const FeatureTable& table, const SplitTable& split) {
  TrainingView v{Matrix(0, table.columns.size()), {}};
  for (std::size_t i = 0; i < table.rows(); ++i) {
    auto it = split.split.find(table.ids[i]);
    if (it == split.split.end() || it->second != Split::Train) continue;
    v.raw.append_row(table.values.row(i));
    v.labels.push_back(split.label.at(table.ids[i]));
  }
  return v;
}

/// Standardizes the training rows with their own statistics and selects
/// features on the result; test rows are never consulted.
inline SelectionResult select_for_training(const TrainingView& train, SelectionMethod method,
                                           std::size_t k) {
  if (train.raw.empty()) throw Error(ErrorCode::EmptyMatrix, "training split is empty");
  const auto z = fit_standardization(train.raw).apply(train.raw);
  return select_features(method, z, train.labels, k);
}

inline nlohmann::json selection_report(Modality m, const SelectionResult& sel,
                                       const std::vector<std::string>& names) {
  nlohmann::json kept = nlohmann::json::array();
  for (auto i : sel.kept) kept.push_back({{"index", i}, {"name", names.at(i)}});
  nlohmann::json order = nlohmann::json::array();
  for (auto i : sel.order) order.push_back({{"index", i}, {"name", names.at(i)}});
  return {{"modality", to_string(m)},
          {"method", to_string(sel.method)},
          {"k", sel.k},
          {"dimensions", names.size()},
          {"kept", kept},
          {sel.method == SelectionMethod::Rfe ? "elimination_order" : "selection_order", order}};
}

inline std::map<Modality, SelectionResult> cmd_select(const RunConfig& config,
                                                      std::vector<Modality> modalities = {
                                                          kAllModalities.begin(),
                                                          kAllModalities.end()}) {
  const auto split = SplitTable::load(paths::split(config.out_dir));
  std::map<Modality, SelectionResult> out;
  for (auto m : modalities) {
    const auto table = FeatureTable::load(paths::features(config.out_dir, m));
    const auto train = training_rows(table, split);
    auto sel = select_for_training(train, config.selection, config.k_for(m));
    text_io::write_file(paths::selection(config.out_dir, m),
                        selection_report(m, sel, table.columns).dump(2) + "\n");
    out[m] = std::move(sel);
  }
  write_run_config(config, "select");
  return out;
}

/// Selects features and fits one model per modality for the configured
/// algorithm on the training split only.
inline std::map<Modality, TrainedModel> cmd_train(const RunConfig& config) {
  const auto split = SplitTable::load(paths::split(config.out_dir));
  std::map<Modality, TrainedModel> out;
  for (auto m : kAllModalities) {
    const auto table = FeatureTable::load(paths::features(config.out_dir, m));
    const auto train = training_rows(table, split);
    if (train.raw.empty()) throw Error(ErrorCode::EmptyMatrix, "no training rows for " + std::string(to_string(m)));
    detail::check_training_set(train.raw, train.labels, true);
    const auto sel = select_for_training(train, config.selection, config.k_for(m));
    text_io::write_file(paths::selection(config.out_dir, m),
                        selection_report(m, sel, table.columns).dump(2) + "\n");
    auto model = train_model(train.raw, train.labels, config.hyperparams, sel.kept);
    save_model(paths::model(config.out_dir, config.hyperparams.algorithm, m), model);
    out.emplace(m, std::move(model));
  }
  write_run_config(config, std::string("train_") + std::string(to_string(config.hyperparams.algorithm)));
  return out;
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluationOutcome {
  std::string tag;  // algorithm tag, or "mixed"
  EvaluationReport report;
  std::vector<std::string> ids;
  Labels truth;
  ModalityPredictions predictions;
  Labels fused;
};

inline fs::path model_path(const RunConfig& config, Modality m) {
  auto it = config.model_paths.find(m);
  return it != config.model_paths.end() ? it->second
                                        : paths::model(config.out_dir, config.hyperparams.algorithm, m);
}

inline std::map<Modality, TrainedModel> load_modality_models(const RunConfig& config) {
  std::map<Modality, TrainedModel> models;
  for (auto m : kAllModalities) {
    const auto path = model_path(config, m);
    std::error_code ec;
    if (!fs::exists(path, ec)) {
      throw Error(ErrorCode::IncompleteResults,
                  "missing " + std::string(to_string(m)) + " model " + path.string());
    }
    models.emplace(m, load_model(path));
  }
  const auto algo = models.at(Modality::Image).algorithm();
  const bool same = models.at(Modality::Audio).algorithm() == algo &&
                    models.at(Modality::Text).algorithm() == algo;
  if (!same && !config.mixed) {
    throw Error(ErrorCode::MixedAlgorithms,
                "modality models use different algorithms; pass --mixed to fuse them");
  }
  return models;
}

/// Predicts the test samples present in all three feature tables, fuses by
/// majority vote and writes report_<tag>.{csv,txt}.
inline EvaluationOutcome cmd_evaluate(const RunConfig& config) {
  const auto split = SplitTable::load(paths::split(config.out_dir));
  const auto models = load_modality_models(config);
  std::map<Modality, FeatureTable> tables;
  std::map<Modality, std::unordered_map<std::string, std::size_t>> index;
  for (auto m : kAllModalities) {
    tables[m] = FeatureTable::load(paths::features(config.out_dir, m));
    index[m] = tables[m].index();
  }

  EvaluationOutcome out;
  const auto algo = models.at(Modality::Image).algorithm();
  const bool same = models.at(Modality::Audio).algorithm() == algo &&
                    models.at(Modality::Text).algorithm() == algo;
  out.tag = same ? std::string(to_string(algo)) : "mixed";

  for (const auto& id : split.ids) {
    if (split.split.at(id) != Split::Test) continue;
    if (std::all_of(kAllModalities.begin(), kAllModalities.end(),
                    [&](Modality m) { return index[m].contains(id); })) {
      out.ids.push_back(id);
      out.truth.push_back(split.label.at(id));
    }
  }
  if (out.ids.empty()) throw Error(ErrorCode::TooFewSamples, "test split has no complete samples");

  std::map<Modality, Labels> preds;
  for (auto m : kAllModalities) {
    std::vector<std::size_t> rows;
    for (const auto& id : out.ids) rows.push_back(index[m].at(id));
    preds[m] = predict(models.at(m), tables[m].values.select_rows(rows));
  }
  out.predictions = {preds[Modality::Image], preds[Modality::Audio], preds[Modality::Text]};
  out.fused = hard_vote(out.predictions);

  AlgorithmResults results;
  results[Source::Image] = metrics(confusion(out.truth, out.predictions.image));
  results[Source::Audio] = metrics(confusion(out.truth, out.predictions.audio));
  results[Source::Text] = metrics(confusion(out.truth, out.predictions.text));
  results[Source::MultiModal] = metrics(confusion(out.truth, out.fused));
  out.report = build_report({{out.tag, results}});

  text_io::write_file(paths::report(config.out_dir, out.tag, ".csv"), out.report.to_csv());
  text_io::write_file(paths::report(config.out_dir, out.tag, ".txt"), out.report.to_text());
  write_run_config(config, "evaluate_" + out.tag);
  return out;
}

/// Collects every report_<algo>.csv present (table order, then mixed) into
/// report.{csv,txt}.
inline EvaluationReport cmd_report(const fs::path& out_dir) {
  EvaluationReport combined;
  std::vector<std::string> tags;
  for (auto a : kAllAlgorithms) tags.emplace_back(to_string(a));
  tags.emplace_back("mixed");
  for (const auto& tag : tags) {
    const auto path = paths::report(out_dir, tag, ".csv");
    std::error_code ec;
    if (!fs::exists(path, ec)) continue;
    const auto part = EvaluationReport::from_csv(text_io::read_file(path));
    std::vector<std::pair<std::string, AlgorithmResults>> grouped(1);
    grouped[0].first = tag;
    for (const auto& row : part.rows) grouped[0].second[row.source] = row.metrics;
    const auto checked = build_report(grouped);
    combined.rows.insert(combined.rows.end(), checked.rows.begin(), checked.rows.end());
  }
  if (combined.rows.empty()) {
    throw Error(ErrorCode::IncompleteResults, "no per-algorithm reports in " + out_dir.string());
  }
  text_io::write_file(out_dir / "report.csv", combined.to_csv());
  text_io::write_file(out_dir / "report.txt", combined.to_text());
  return combined;
}

// ---------------------------------------------------------------------------
// predict

struct SamplePrediction {
  int image = 0;
  int audio = 0;
  int text = 0;
  int fused = 0;
  int votes = 0;
};

/// Classifies one raw sample with the three modality models. The vocabulary,
/// text mode and stop-words come from the extraction run in `out_dir`.
inline SamplePrediction cmd_predict(const RunConfig& config, const fs::path& wav,
                                    const fs::path& frames_dir, const fs::path& text_file) {
  const auto models = load_modality_models(config);
  const auto extract_cfg = RunConfig::from_json(nlohmann::json::parse(
      text_io::read_file(paths::run_config(config.out_dir, "extract"))));
  const auto vocab = Vocabulary::parse(text_io::read_file(paths::vocabulary(config.out_dir)));

  auto one_row = [](std::span<const double> v) {
    Matrix m(0, v.size());
    m.append_row(v);
    return m;
  };
  SamplePrediction p;
  p.audio = predict(models.at(Modality::Audio), one_row(extract_audio_features(read_wav(wav))))[0];
  p.image = predict(models.at(Modality::Image), one_row(extract_image_features(frames_dir)))[0];
  const auto doc = normalize_and_tokenize(read_text_file(text_file), resolve_stopwords(extract_cfg));
  p.text = predict(models.at(Modality::Text), one_row(vectorize(doc, vocab, extract_cfg.text_mode)))[0];
  p.votes = vote_count(p.image, p.audio, p.text);
  p.fused = hard_vote({{p.image}, {p.audio}, {p.text}})[0];
  return p;
}

}  // namespace modhate
