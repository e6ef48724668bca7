#include <gtest/gtest.h>

#include "modhate/pipeline.hpp"
#include "modhate/synthetic.hpp"
#include "support.hpp"

using namespace modhate;
using testsupport::error_code_of;
using testsupport::ScratchDir;

namespace {

/// A 40-sample demo corpus and one extraction of it, shared by the suite.
class PipelineTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    root_ = new ScratchDir("pipeline");
    SyntheticCorpusSpec spec;
    spec.count = 40;
    spec.seed = 7;
    manifest_ = generate_demo_corpus(*root_ / "corpus", spec);
    cmd_extract(config(*root_ / "base"));
  }
  static void TearDownTestSuite() {
    delete root_;
    root_ = nullptr;
  }

  static RunConfig config(const fs::path& out) {
    RunConfig c;
    c.manifest = manifest_;
    c.out_dir = out;
    c.k_image = 64;
    c.threads = 2;
    return c;
  }

  /// Copy of the extracted base work dir.
  static RunConfig fresh_work(const ScratchDir& dir) {
    fs::copy(*root_ / "base", dir / "work", fs::copy_options::recursive);
    return config(dir / "work");
  }

  static fs::path base() { return *root_ / "base"; }

  static inline ScratchDir* root_ = nullptr;
  static inline fs::path manifest_;
};

std::string slurp(const fs::path& p) { return text_io::read_file(p); }

void mark_all(const fs::path& split_csv, const std::string& from, const std::string& to) {
  auto text = slurp(split_csv);
  for (auto pos = text.find(from); pos != std::string::npos; pos = text.find(from, pos + to.size())) {
    text.replace(pos, from.size(), to);
  }
  text_io::write_file(split_csv, text);
}

std::vector<std::string> ids_with_split(const SplitTable& split, Split s) {
  std::vector<std::string> out;
  for (const auto& id : split.ids) {
    if (split.split.at(id) == s) out.push_back(id);
  }
  return out;
}

}  // namespace

TEST_F(PipelineTest, ExtractWritesOneRowPerSample) {
  for (auto m : kAllModalities) {
    EXPECT_EQ(FeatureTable::load(paths::features(base(), m)).rows(), 40u) << to_string(m);
  }
  const auto split = SplitTable::load(paths::split(base()));
  EXPECT_EQ(ids_with_split(split, Split::Train).size(), 32u);
  EXPECT_EQ(slurp(paths::warnings(base())), "");
  EXPECT_TRUE(fs::exists(paths::run_config(base(), "extract")));
}

TEST_F(PipelineTest, ExtractIsByteIdenticalOnRerun) {
  ScratchDir dir("rerun");
  auto c = config(dir / "again");
  c.threads = 1;
  cmd_extract(c);
  for (auto m : kAllModalities) {
    EXPECT_EQ(slurp(paths::features(dir / "again", m)), slurp(paths::features(base(), m)));
  }
  EXPECT_EQ(slurp(paths::split(dir / "again")), slurp(paths::split(base())));
  EXPECT_EQ(slurp(paths::vocabulary(dir / "again")), slurp(paths::vocabulary(base())));
}

TEST_F(PipelineTest, UnreadableAudioSkipsOnlyThatRow) {
  ScratchDir dir("badwav");
  fs::copy(manifest_.parent_path(), dir / "corpus", fs::copy_options::recursive);
  text_io::write_file(dir / "corpus" / "audio" / "s0003.wav", "not a wav file");
  RunConfig c = config(dir / "work");
  c.manifest = dir / "corpus" / "manifest.csv";
  const auto summary = cmd_extract(c);
  EXPECT_EQ(summary.rows.at(Modality::Audio), 39u);
  EXPECT_EQ(summary.rows.at(Modality::Image), 40u);
  EXPECT_EQ(summary.rows.at(Modality::Text), 40u);
  ASSERT_EQ(summary.warnings.size(), 1u);
  EXPECT_EQ(summary.warnings[0].rfind("s0003\taudio\t", 0), 0u);
  EXPECT_EQ(text_io::lines(slurp(paths::warnings(c.out_dir))).size(), 1u);
  EXPECT_FALSE(FeatureTable::load(paths::features(c.out_dir, Modality::Audio)).index().contains("s0003"));
}

TEST_F(PipelineTest, TrainWritesReloadableModels) {
  ScratchDir dir("train");
  auto c = fresh_work(dir);
  c.hyperparams.algorithm = Algorithm::NaiveBayes;
  const auto models = cmd_train(c);
  ASSERT_EQ(models.size(), 3u);
  for (const auto& [m, model] : models) {
    EXPECT_EQ(load_model(paths::model(c.out_dir, Algorithm::NaiveBayes, m)), model);
    EXPECT_TRUE(fs::exists(paths::selection(c.out_dir, m)));
  }
  EXPECT_EQ(models.at(Modality::Image).selected.size(), 64u);
  EXPECT_EQ(models.at(Modality::Audio).selected.size(), kDefaultAudioK);
  EXPECT_TRUE(fs::exists(paths::run_config(c.out_dir, "train_nb")));
}

TEST_F(PipelineTest, HyperparameterOverrideIsSaved) {
  ScratchDir dir("override");
  auto c = fresh_work(dir);
  c.hyperparams.algorithm = Algorithm::Knn;
  c.hyperparams.k_neighbors = 3;
  cmd_train(c);
  const auto j = nlohmann::json::parse(slurp(paths::model(c.out_dir, Algorithm::Knn, Modality::Text)));
  EXPECT_EQ(j.at("hyperparams").at("k_neighbors"), 3);
}

TEST_F(PipelineTest, TrainWithoutTrainingRowsFails) {
  ScratchDir dir("notrain");
  auto c = fresh_work(dir);
  mark_all(paths::split(c.out_dir), ",train", ",test");
  EXPECT_EQ(error_code_of([&] { cmd_train(c); }), ErrorCode::EmptyMatrix);
}

TEST_F(PipelineTest, EvaluateMixedAndMissingModels) {
  ScratchDir dir("evaluate");
  auto c = fresh_work(dir);
  c.hyperparams.algorithm = Algorithm::NaiveBayes;
  cmd_train(c);
  auto lr = c;
  lr.hyperparams.algorithm = Algorithm::LogReg;
  cmd_train(lr);

  const auto nb = cmd_evaluate(c);
  EXPECT_EQ(nb.tag, "nb");
  EXPECT_EQ(nb.report.rows.size(), 4u);
  EXPECT_EQ(nb.ids.size(), 8u);
  EXPECT_EQ(nb.fused, hard_vote(nb.predictions));
  EXPECT_TRUE(fs::exists(paths::report(c.out_dir, "nb", ".txt")));
  cmd_evaluate(lr);

  auto mixed = c;
  mixed.model_paths[Modality::Text] = paths::model(c.out_dir, Algorithm::LogReg, Modality::Text);
  EXPECT_EQ(error_code_of([&] { cmd_evaluate(mixed); }), ErrorCode::MixedAlgorithms);
  mixed.mixed = true;
  EXPECT_EQ(cmd_evaluate(mixed).tag, "mixed");

  auto missing = c;
  missing.model_paths[Modality::Audio] = dir / "nope.json";
  EXPECT_EQ(error_code_of([&] { cmd_evaluate(missing); }), ErrorCode::IncompleteResults);

  const auto combined = cmd_report(c.out_dir);
  ASSERT_EQ(combined.rows.size(), 12u);
  EXPECT_EQ(combined.rows[0].algorithm, "logreg");
  EXPECT_EQ(combined.rows[4].algorithm, "nb");
  EXPECT_EQ(combined.rows[8].algorithm, "mixed");
  EXPECT_TRUE(fs::exists(c.out_dir / "report.txt"));
  EXPECT_TRUE(fs::exists(paths::run_config(c.out_dir, "evaluate_nb")));
}

TEST_F(PipelineTest, EvaluateWithoutTestSamplesFails) {
  ScratchDir dir("notest");
  auto c = fresh_work(dir);
  c.hyperparams.algorithm = Algorithm::NaiveBayes;
  cmd_train(c);
  mark_all(paths::split(c.out_dir), ",test", ",train");
  EXPECT_EQ(error_code_of([&] { cmd_evaluate(c); }), ErrorCode::TooFewSamples);
}

TEST_F(PipelineTest, ReportWithoutResultsFails) {
  ScratchDir dir("noreport");
  EXPECT_EQ(error_code_of([&] { cmd_report(dir.path()); }), ErrorCode::IncompleteResults);
}

TEST_F(PipelineTest, PredictCountsVotes) {
  ScratchDir dir("predict");
  auto c = fresh_work(dir);
  c.hyperparams.algorithm = Algorithm::LogReg;
  cmd_train(c);
  const auto corpus = manifest_.parent_path();
  for (const std::string id : {"s0000", "s0001", "s0002"}) {
    const auto p = cmd_predict(c, corpus / "audio" / (id + ".wav"), corpus / "frames" / id,
                               corpus / "text" / (id + ".txt"));
    EXPECT_EQ(p.votes, p.image + p.audio + p.text);
    EXPECT_EQ(p.fused, p.votes >= 2 ? 1 : 0);
  }
}

TEST_F(PipelineTest, TestSamplesNeverInfluenceTraining) {
  // Rewrite every test-split transcript and WAV, then rerun the pipeline: the
  // vocabulary, training rows, selections and models must not move.
  ScratchDir dir("leak");
  fs::copy(manifest_.parent_path(), dir / "corpus", fs::copy_options::recursive);
  const auto split = SplitTable::load(paths::split(base()));
  const auto test_ids = ids_with_split(split, Split::Test);
  ASSERT_FALSE(test_ids.empty());
  Rng rng(99);
  for (const auto& id : test_ids) {
    text_io::write_file(dir / "corpus" / "text" / (id + ".txt"), "zebra quokka narwhal " + id);
    std::vector<double> noise(22050);
    for (auto& v : noise) v = rng.uniform(-0.9, 0.9);
    write_wav(dir / "corpus" / "audio" / (id + ".wav"), noise, kCanonicalSampleRate);
  }
  RunConfig changed = config(dir / "work");
  changed.manifest = dir / "corpus" / "manifest.csv";
  cmd_extract(changed);
  EXPECT_EQ(slurp(paths::vocabulary(changed.out_dir)), slurp(paths::vocabulary(base())));

  ScratchDir ref_dir("leak_ref");
  auto ref = fresh_work(ref_dir);
  for (auto* c : {&ref, &changed}) c->hyperparams.algorithm = Algorithm::LogReg;
  const auto ref_models = cmd_train(ref);
  const auto changed_models = cmd_train(changed);
  for (auto m : kAllModalities) {
    const auto a = training_rows(FeatureTable::load(paths::features(ref.out_dir, m)), split);
    const auto b = training_rows(FeatureTable::load(paths::features(changed.out_dir, m)), split);
    EXPECT_EQ(a.raw, b.raw) << to_string(m);
    EXPECT_EQ(slurp(paths::selection(ref.out_dir, m)), slurp(paths::selection(changed.out_dir, m)));
    EXPECT_EQ(ref_models.at(m), changed_models.at(m)) << to_string(m);
  }
}

TEST(GenDemo, LabelBalanceAndDeterminism) {
  ScratchDir a("gen_a"), b("gen_b");
  SyntheticCorpusSpec spec;
  spec.count = 300;
  spec.duration_s = 0.05;
  spec.frame_side = 8;
  spec.frames_per_sample = 1;
  const auto records = parse_manifest(generate_demo_corpus(a.path(), spec));
  ASSERT_EQ(records.size(), 300u);
  EXPECT_EQ(std::count_if(records.begin(), records.end(),
                          [](const ManifestRecord& r) { return r.label == Label::Hate; }),
            180);

  spec.count = 20;
  generate_demo_corpus(a / "small", spec);
  generate_demo_corpus(b / "small", spec);
  for (const auto& entry : fs::recursive_directory_iterator(a / "small")) {
    if (!entry.is_regular_file()) continue;
    const auto rel = fs::relative(entry.path(), a / "small");
    EXPECT_EQ(slurp(entry.path()), slurp(b / "small" / rel)) << rel;
  }
}

TEST(GenDemo, RejectsTinyCorpora) {
  ScratchDir dir("gen_tiny");
  SyntheticCorpusSpec spec;
  spec.count = 4;
  EXPECT_EQ(error_code_of([&] { generate_demo_corpus(dir.path(), spec); }), ErrorCode::TooFewSamples);
  spec.count = 10;
  spec.modality_fidelity = 1.5;
  EXPECT_EQ(error_code_of([&] { generate_demo_corpus(dir.path(), spec); }), ErrorCode::BadFraction);
}

TEST(RunConfig, JsonRoundTrip) {
  RunConfig c;
  c.manifest = "m.csv";
  c.out_dir = "out";
  c.seed = 5;
  c.text_mode = TextMode::Count;
  c.selection = SelectionMethod::Rfe;
  c.k_text = 9;
  c.hyperparams.algorithm = Algorithm::Svm;
  c.hyperparams.lambda = 0.25;
  const auto back = RunConfig::from_json(c.to_json());
  EXPECT_EQ(back.to_json(), c.to_json());
  EXPECT_EQ(back.hyperparams, c.hyperparams);
}
