// Command-line front end: gen-demo, extract, select, train, evaluate,
// report and predict over a work directory.
//
// Exit codes: 0 success, 1 usage or bad hyperparameter, 2 data error,
// 3 internal error.

#include <CLI11.hpp>

#include <iostream>

#include "modhate/modhate.hpp"

namespace {

using namespace modhate;

struct Options {
  RunConfig config;
  std::string algo = "logreg";
  std::string text_mode = "tfidf";
  std::string selection = "mrmr";
  std::string stopwords;
  std::vector<std::string> modalities;
  std::string image_model, audio_model, text_model;
  std::string wav, frames, text;
  SyntheticCorpusSpec demo;
  std::string manifest, out;
  std::optional<std::size_t> k;
};

void add_common(CLI::App* cmd, Options& o, bool needs_manifest) {
  if (needs_manifest) cmd->add_option("--manifest", o.manifest, "Manifest CSV")->required();
  cmd->add_option("--out", o.out, "Work directory")->required();
}

void add_selection(CLI::App* cmd, Options& o) {
  cmd->add_option("--select", o.selection, "Feature selection: mrmr, rfe or none")
      ->capture_default_str();
  cmd->add_option("--k", o.k, "Features to keep in every modality without its own --k-* flag");
  cmd->add_option("--k-image", o.config.k_image, "Image features to keep")->capture_default_str();
  cmd->add_option("--k-audio", o.config.k_audio, "Audio features to keep")->capture_default_str();
  cmd->add_option("--k-text", o.config.k_text, "Text features to keep")->capture_default_str();
}

void add_hyperparams(CLI::App* cmd, Options& o) {
  auto& hp = o.config.hyperparams;
  cmd->add_option("--algo", o.algo, "svm, rforest, logreg, adaboost, knn, nb, dtree or all")
      ->capture_default_str();
  cmd->add_option("--learning-rate", hp.learning_rate)->capture_default_str();
  cmd->add_option("--iterations", hp.iterations)->capture_default_str();
  cmd->add_option("--lambda", hp.lambda)->capture_default_str();
  cmd->add_option("--epochs", hp.epochs)->capture_default_str();
  cmd->add_option("--k-neighbors", hp.k_neighbors)->capture_default_str();
  cmd->add_option("--max-depth", hp.max_depth)->capture_default_str();
  cmd->add_option("--min-samples-split", hp.min_samples_split)->capture_default_str();
  cmd->add_option("--forest-size", hp.forest_size)->capture_default_str();
  cmd->add_option("--boost-rounds", hp.boost_rounds)->capture_default_str();
  cmd->add_option("--forest-seed", hp.seed, "Random forest seed")->capture_default_str();
}

void add_model_paths(CLI::App* cmd, Options& o) {
  cmd->add_option("--image-model", o.image_model, "Image model file (default: from --algo)");
  cmd->add_option("--audio-model", o.audio_model, "Audio model file (default: from --algo)");
  cmd->add_option("--text-model", o.text_model, "Text model file (default: from --algo)");
  cmd->add_flag("--mixed", o.config.mixed, "Allow modality models of different algorithms");
}

std::vector<Algorithm> algorithms(const std::string& tag) {
  if (tag == "all") return {kAllAlgorithms.begin(), kAllAlgorithms.end()};
  return {parse_algorithm(tag)};
}

/// Copies parsed strings into the run configuration.
void finish_config(const CLI::App& cmd, Options& o) {
  auto& c = o.config;
  c.manifest = o.manifest;
  c.out_dir = o.out;
  c.text_mode = parse_text_mode(o.text_mode);
  c.selection = parse_selection_method(o.selection);
  if (!o.stopwords.empty()) c.stopwords = o.stopwords;
  if (!o.image_model.empty()) c.model_paths[Modality::Image] = o.image_model;
  if (!o.audio_model.empty()) c.model_paths[Modality::Audio] = o.audio_model;
  if (!o.text_model.empty()) c.model_paths[Modality::Text] = o.text_model;
  if (o.k) {
    const std::pair<const char*, std::size_t*> per_modality[] = {
        {"--k-image", &c.k_image}, {"--k-audio", &c.k_audio}, {"--k-text", &c.k_text}};
    for (const auto& [flag, target] : per_modality) {
      if (cmd.count(flag) == 0) *target = *o.k;
    }
  }
  if (o.algo != "all") c.hyperparams.algorithm = parse_algorithm(o.algo);
  c.hyperparams.validate();
}

int run(CLI::App& app, Options& o) {
  const auto* cmd = app.get_subcommands().front();
  finish_config(*cmd, o);
  auto& c = o.config;
  const std::string name = cmd->get_name();

  if (name == "gen-demo") {
    const auto manifest = generate_demo_corpus(o.out, o.demo);
    std::cout << "wrote " << o.demo.count << " samples; manifest " << manifest.string() << "\n";
  } else if (name == "extract") {
    const auto s = cmd_extract(c);
    std::cout << s.samples << " samples: audio " << s.rows.at(Modality::Audio) << ", image "
              << s.rows.at(Modality::Image) << ", text " << s.rows.at(Modality::Text)
              << " rows; vocabulary " << s.vocabulary_size << "\n";
    for (const auto& w : s.warnings) std::cerr << "warning: " << w << "\n";
  } else if (name == "select") {
    std::vector<Modality> mods;
    for (const auto& m : o.modalities) mods.push_back(parse_modality(m));
    if (mods.empty()) mods.assign(kAllModalities.begin(), kAllModalities.end());
    for (const auto& [m, sel] : cmd_select(c, mods)) {
      std::cout << to_string(m) << ": kept " << sel.kept.size() << "\n";
    }
  } else if (name == "train") {
    for (auto a : algorithms(o.algo)) {
      c.hyperparams.algorithm = a;
      cmd_train(c);
      std::cout << "trained " << to_string(a) << "\n";
    }
  } else if (name == "evaluate") {
    for (auto a : algorithms(o.algo)) {
      c.hyperparams.algorithm = a;
      std::cout << cmd_evaluate(c).report.to_text();
    }
  } else if (name == "report") {
    std::cout << cmd_report(c.out_dir).to_text();
  } else if (name == "predict") {
    const auto p = cmd_predict(c, o.wav, o.frames, o.text);
    std::cout << "image=" << p.image << " audio=" << p.audio << " text=" << p.text
              << " votes=" << p.votes << " fused=" << (p.fused ? "hate" : "non-hate") << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-modal hate speech detection pipeline", "modhate"};
  app.require_subcommand(1);
  Options o;
  auto& c = o.config;

  auto* gen = app.add_subcommand("gen-demo", "Write a seeded synthetic corpus");
  gen->add_option("--out", o.out, "Corpus directory")->required();
  gen->add_option("--count", o.demo.count)->capture_default_str();
  gen->add_option("--seed", o.demo.seed)->capture_default_str();
  gen->add_option("--hate-fraction", o.demo.hate_fraction)->capture_default_str();
  gen->add_option("--fidelity", o.demo.modality_fidelity,
                  "Probability each modality presents the true class")
      ->capture_default_str();

  auto* extract = app.add_subcommand("extract", "Extract features for every modality");
  add_common(extract, o, true);
  extract->add_option("--seed", c.seed, "Split seed")->capture_default_str();
  extract->add_option("--text-mode", o.text_mode, "tfidf or count")->capture_default_str();
  extract->add_option("--stopwords", o.stopwords, "Stop-word file (one word per line)");
  extract->add_option("--threads", c.threads, "Worker threads (0: MODHATE_THREADS or all cores)");

  auto* select = app.add_subcommand("select", "Run feature selection on the training split");
  add_common(select, o, false);
  add_selection(select, o);
  select->add_option("--modality", o.modalities, "image, audio or text (repeatable)");

  auto* train = app.add_subcommand("train", "Fit one model per modality");
  add_common(train, o, false);
  add_selection(train, o);
  add_hyperparams(train, o);

  auto* evaluate = app.add_subcommand("evaluate", "Score the test split and fuse by majority vote");
  add_common(evaluate, o, false);
  evaluate->add_option("--algo", o.algo, "Algorithm tag or all")->capture_default_str();
  add_model_paths(evaluate, o);

  auto* report = app.add_subcommand("report", "Combine per-algorithm reports");
  add_common(report, o, false);

  auto* predict = app.add_subcommand("predict", "Classify one raw sample");
  add_common(predict, o, false);
  predict->add_option("--algo", o.algo, "Algorithm tag")->capture_default_str();
  add_model_paths(predict, o);
  predict->add_option("--wav", o.wav, "WAV file")->required()->check(CLI::ExistingFile);
  predict->add_option("--frames", o.frames, "Directory of PGM frames")
      ->required()
      ->check(CLI::ExistingDirectory);
  predict->add_option("--text", o.text, "Transcript file")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    return run(app, o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.code()) {
      case ErrorCode::BadHyperparameter:
      case ErrorCode::EvenK:
        return 1;
      case ErrorCode::Internal:
        return 3;
      default:
        return 2;
    }
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
