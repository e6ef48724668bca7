#include <gtest/gtest.h>

#include "modhate/fusion_eval.hpp"
#include "support.hpp"

using namespace modhate;
using testsupport::error_code_of;

TEST(HardVote, TruthTable) {
  for (int i = 0; i < 2; ++i) {
    for (int a = 0; a < 2; ++a) {
      for (int t = 0; t < 2; ++t) {
        const auto fused = hard_vote({{i}, {a}, {t}});
        EXPECT_EQ(fused[0], i + a + t >= 2 ? 1 : 0);
        EXPECT_EQ(vote_count(i, a, t), i + a + t);
      }
    }
  }
  EXPECT_TRUE(hard_vote({}).empty());
}

TEST(HardVote, SymmetricUnderModalityPermutation) {
  Rng rng(51);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng.index(40);
    const auto a = testsupport::random_labels(rng, n + 1), b = testsupport::random_labels(rng, n + 1),
               c = testsupport::random_labels(rng, n + 1);
    const auto ref = hard_vote({a, b, c});
    EXPECT_EQ(hard_vote({b, c, a}), ref);
    EXPECT_EQ(hard_vote({c, a, b}), ref);
    EXPECT_EQ(hard_vote({b, a, c}), ref);
  }
}

TEST(HardVote, LengthMismatch) {
  EXPECT_EQ(error_code_of([] { hard_vote({{1, 0}, {1}, {1, 0}}); }), ErrorCode::LengthMismatch);
}

TEST(Confusion, Examples) {
  const auto c = confusion({1, 1, 1, 1, 0}, {1, 1, 1, 0, 1});
  EXPECT_EQ(c.tp, 3u);
  EXPECT_EQ(c.fn, 1u);
  EXPECT_EQ(c.fp, 1u);
  EXPECT_EQ(c.tn, 0u);
  const auto empty = confusion({}, {});
  EXPECT_EQ(empty.total(), 0u);
  EXPECT_EQ(error_code_of([] { confusion({1}, {}); }), ErrorCode::LengthMismatch);
}

TEST(Metrics, Examples) {
  const auto m = metrics(confusion({1, 1, 1, 1, 0}, {1, 1, 1, 0, 1}));
  EXPECT_DOUBLE_EQ(m.precision, 0.75);
  EXPECT_DOUBLE_EQ(m.recall, 0.75);
  EXPECT_DOUBLE_EQ(m.f1, 0.75);
  EXPECT_DOUBLE_EQ(m.accuracy, 0.6);

  const auto perfect = metrics(confusion({1, 0, 1}, {1, 0, 1}));
  EXPECT_EQ(perfect.precision, 1.0);
  EXPECT_EQ(perfect.recall, 1.0);
  EXPECT_EQ(perfect.f1, 1.0);
  EXPECT_EQ(perfect.accuracy, 1.0);

  // No positives predicted and none present: every ratio with a zero
  // denominator is reported as 0.
  const auto none = metrics(confusion({0, 0}, {0, 0}));
  EXPECT_EQ(none.precision, 0.0);
  EXPECT_EQ(none.recall, 0.0);
  EXPECT_EQ(none.f1, 0.0);
  EXPECT_EQ(none.accuracy, 1.0);
  EXPECT_EQ(metrics(ConfusionCounts{}).accuracy, 0.0);
}

TEST(Metrics, BoundedAndF1IsHarmonicMean) {
  Rng rng(52);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.index(50);
    const auto truth = testsupport::random_labels(rng, n);
    Labels pred(n);
    for (auto& p : pred) p = rng.bernoulli(0.5) ? 1 : 0;
    const auto c = confusion(truth, pred);
    EXPECT_EQ(c.total(), n);
    const auto m = metrics(c);
    for (double v : {m.precision, m.recall, m.f1, m.accuracy}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
    const double expected_f1 =
        m.precision + m.recall > 0 ? 2 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
    EXPECT_NEAR(m.f1, expected_f1, 1e-12);
    EXPECT_NEAR(m.accuracy, testsupport::accuracy(truth, pred), 1e-12);
  }
}

namespace {

AlgorithmResults full_results(double base) {
  AlgorithmResults r;
  double v = base;
  for (auto s : kAllSources) {
    r[s] = Metrics{v, v / 2, v / 3, 1 - v};
    v += 0.01;
  }
  return r;
}

}  // namespace

TEST(Report, SizesAndOrder) {
  std::vector<std::pair<std::string, AlgorithmResults>> all;
  for (auto a : kAllAlgorithms) all.emplace_back(std::string(to_string(a)), full_results(0.5));
  const auto report = build_report(all);
  ASSERT_EQ(report.rows.size(), 28u);
  EXPECT_EQ(report.rows[0].algorithm, "svm");
  EXPECT_EQ(report.rows[0].source, Source::Image);
  EXPECT_EQ(report.rows[3].source, Source::MultiModal);
  EXPECT_EQ(report.rows[27].algorithm, "dtree");

  const auto one = build_report({{"logreg", full_results(0.3)}});
  EXPECT_EQ(one.rows.size(), 4u);
  EXPECT_NE(one.to_text().find("Logistic"), std::string::npos);
}

TEST(Report, MissingSourceIsIncomplete) {
  auto partial = full_results(0.2);
  partial.erase(Source::Audio);
  EXPECT_EQ(error_code_of([&] { build_report({{"nb", partial}}); }), ErrorCode::IncompleteResults);
}

TEST(Report, CsvRoundTrip) {
  Rng rng(53);
  std::vector<std::pair<std::string, AlgorithmResults>> all;
  for (auto a : kAllAlgorithms) all.emplace_back(std::string(to_string(a)), full_results(rng.uniform()));
  const auto report = build_report(all);
  const auto csv = report.to_csv();
  EXPECT_EQ(EvaluationReport::from_csv(csv).to_csv(), csv);
  EXPECT_EQ(error_code_of([] { EvaluationReport::from_csv("a,b\n"); }), ErrorCode::BadFeatureFile);
}
