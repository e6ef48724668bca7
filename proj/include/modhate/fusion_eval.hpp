#pragma once

// Late fusion by hard majority vote across the three modalities, confusion
// counts, precision/recall/F1/accuracy, and the per-algorithm report table.

#include <algorithm>
#include <array>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "modhate/classifiers.hpp"
#include "modhate/error.hpp"
#include "modhate/text_io.hpp"

namespace modhate {

enum class Source { Image, Audio, Text, MultiModal };

inline constexpr std::array<Source, 4> kAllSources = {Source::Image, Source::Audio, Source::Text,
                                                      Source::MultiModal};

inline std::string_view to_string(Source s) {
  switch (s) {
    case Source::Image: return "image";
    case Source::Audio: return "audio";
    case Source::Text: return "text";
    case Source::MultiModal: return "multimodal";
  }
  return "?";
}

inline std::string_view display_name(Source s) {
  switch (s) {
    case Source::Image: return "Image";
    case Source::Audio: return "Audio";
    case Source::Text: return "Text";
    case Source::MultiModal: return "Multi-modal";
  }
  return "?";
}

struct ModalityPredictions {
  Labels image;
  Labels audio;
  Labels text;
};

/// Number of modalities voting hate for one sample.
inline int vote_count(int image, int audio, int text) { return image + audio + text; }

/// Label 1 iff at least two of the three modality labels are 1.
inline Labels hard_vote(const ModalityPredictions& p) {
  if (p.image.size() != p.audio.size() || p.image.size() != p.text.size()) {
    throw Error(ErrorCode::LengthMismatch, "modality prediction lengths differ");
  }
  Labels fused(p.image.size());
  for (std::size_t i = 0; i < fused.size(); ++i) {
    fused[i] = vote_count(p.image[i], p.audio[i], p.text[i]) >= 2 ? 1 : 0;
  }
  return fused;
}

struct ConfusionCounts {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;

  std::size_t total() const { return tp + fp + fn + tn; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

inline ConfusionCounts confusion(const Labels& truth, const Labels& predicted) {
  if (truth.size() != predicted.size()) {
    throw Error(ErrorCode::LengthMismatch, "truth and prediction lengths differ");
  }
  ConfusionCounts c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == 1) {
      (predicted[i] == 1 ? c.tp : c.fn)++;
    } else {
      (predicted[i] == 1 ? c.fp : c.tn)++;
    }
  }
  return c;
}

struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double accuracy = 0.0;

  friend bool operator==(const Metrics&, const Metrics&) = default;
};

/// 0/0 evaluates to 0 for every metric.
inline Metrics metrics(const ConfusionCounts& c) {
  auto ratio = [](double num, double den) { return den > 0.0 ? num / den : 0.0; };
  Metrics m;
  m.precision = ratio(static_cast<double>(c.tp), static_cast<double>(c.tp + c.fp));
  m.recall = ratio(static_cast<double>(c.tp), static_cast<double>(c.tp + c.fn));
  m.f1 = ratio(2.0 * m.precision * m.recall, m.precision + m.recall);
  m.accuracy = ratio(static_cast<double>(c.tp + c.tn), static_cast<double>(c.total()));
  return m;
}

// ---------------------------------------------------------------------------
// Report

struct ReportRow {
  std::string algorithm;  // tag, or "mixed"
  Source source = Source::Image;
  Metrics metrics;
};

/// Per-algorithm metrics for each source; all four sources are required.
using AlgorithmResults = std::map<Source, Metrics>;

struct EvaluationReport {
  std::vector<ReportRow> rows;

  std::string to_csv() const {
    std::string out = "algorithm,source,precision,recall,f1,accuracy\n";
    for (const auto& r : rows) {
      out += r.algorithm + ',' + std::string(to_string(r.source)) + ',' +
             text_io::format_double(r.metrics.precision) + ',' +
             text_io::format_double(r.metrics.recall) + ',' + text_io::format_double(r.metrics.f1) +
             ',' + text_io::format_double(r.metrics.accuracy) + '\n';
    }
    return out;
  }

  /// Aligned plain-text table: one block per algorithm, one line per source.
  std::string to_text() const {
    char line[160];
    std::string out;
    const char* rule = "+----------------------+-------------+-----------+--------+---------+----------+\n";
    out += rule;
    std::snprintf(line, sizeof(line), "| %-20s | %-11s | %9s | %6s | %7s | %8s |\n", "Algorithm",
                  "Data", "Precision", "Recall", "F1Score", "Accuracy");
    out += line;
    out += rule;
    std::string current;
    for (const auto& r : rows) {
      const bool first = r.algorithm != current;
      if (first && !current.empty()) out += rule;
      current = r.algorithm;
      std::string name;
      if (first) {
        name = r.algorithm;
        for (auto a : kAllAlgorithms) {
          if (to_string(a) == r.algorithm) name = std::string(display_name(a));
        }
      }
      std::snprintf(line, sizeof(line), "| %-20s | %-11s | %9.4f | %6.4f | %7.4f | %8.4f |\n",
                    name.c_str(), std::string(display_name(r.source)).c_str(),
                    r.metrics.precision, r.metrics.recall, r.metrics.f1, r.metrics.accuracy);
      out += line;
    }
    out += rule;
    return out;
  }

  static EvaluationReport from_csv(std::string_view text) {
    EvaluationReport report;
    bool header = true;
    for (const auto& raw : text_io::lines(text)) {
      if (text_io::trim(raw).empty()) continue;
      if (header) {
        if (text_io::trim(raw) != "algorithm,source,precision,recall,f1,accuracy") {
          throw Error(ErrorCode::BadFeatureFile, "report header mismatch");
        }
        header = false;
        continue;
      }
      const auto f = text_io::split(raw);
      if (f.size() != 6) throw Error(ErrorCode::BadFeatureFile, "report row width");
      ReportRow row;
      row.algorithm = std::string(f[0]);
      bool found = false;
      for (auto s : kAllSources) {
        if (to_string(s) == f[1]) {
          row.source = s;
          found = true;
        }
      }
      auto p = text_io::parse_double(f[2]), r = text_io::parse_double(f[3]),
           f1 = text_io::parse_double(f[4]), a = text_io::parse_double(f[5]);
      if (!found || !p || !r || !f1 || !a) {
        throw Error(ErrorCode::BadFeatureFile, "bad report row '" + raw + "'");
      }
      row.metrics = {*p, *r, *f1, *a};
      report.rows.push_back(row);
    }
    return report;
  }
};

/// Rows in table order: algorithms as given, sources image, audio, text,
/// multi-modal within each block.
inline EvaluationReport build_report(
    const std::vector<std::pair<std::string, AlgorithmResults>>& per_algorithm) {
  EvaluationReport report;
  for (const auto& [algo, results] : per_algorithm) {
    for (auto s : kAllSources) {
      auto it = results.find(s);
      if (it == results.end()) {
        throw Error(ErrorCode::IncompleteResults,
                    algo + " lacks a " + std::string(to_string(s)) + " row");
      }
      report.rows.push_back({algo, s, it->second});
    }
  }
  return report;
}

}  // namespace modhate
