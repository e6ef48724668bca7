#pragma once

// Transcript normalization, training-split vocabulary, and bag-of-words /
// TF-IDF vectorization.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "modhate/error.hpp"
#include "modhate/text_io.hpp"

namespace modhate {

using StopWords = std::set<std::string, std::less<>>;
using TokenizedDoc = std::vector<std::string>;

enum class TextMode { Count, TfIdf };

inline std::string_view to_string(TextMode m) { return m == TextMode::Count ? "count" : "tfidf"; }

inline TextMode parse_text_mode(std::string_view s) {
  if (s == "count") return TextMode::Count;
  if (s == "tfidf") return TextMode::TfIdf;
  throw Error(ErrorCode::BadHyperparameter, "text mode '" + std::string(s) + "'");
}

/// Built-in English stop-word list; contraction fragments (re, ll, ...) are
/// included because tokenization splits on apostrophes.
inline const StopWords& default_stopwords() {
  static const StopWords words = {
      "a",       "about",   "above",  "after",  "again",  "against", "all",     "am",
      "an",      "and",     "any",    "are",    "as",     "at",      "be",      "because",
      "been",    "before",  "being",  "below",  "between", "both",   "but",     "by",
      "can",     "could",   "d",      "did",    "do",     "does",    "doing",   "don",
      "down",    "during",  "each",   "few",    "for",    "from",    "further", "had",
      "has",     "have",    "having", "he",     "her",    "here",    "hers",    "herself",
      "him",     "himself", "his",    "how",    "i",      "if",      "in",      "into",
      "is",      "it",      "its",    "itself", "just",   "ll",      "m",       "me",
      "more",    "most",    "my",     "myself", "no",     "nor",     "not",     "now",
      "o",       "of",      "off",    "on",     "once",   "only",    "or",      "other",
      "our",     "ours",    "ourselves", "out", "over",   "own",     "re",      "s",
      "same",    "she",     "should", "so",     "some",   "such",    "t",       "than",
      "that",    "the",     "their",  "theirs", "them",   "themselves", "then", "there",
      "these",   "they",    "this",   "those",  "through", "to",     "too",     "under",
      "until",   "up",      "ve",     "very",   "was",    "we",      "were",    "what",
      "when",    "where",   "which",  "while",  "who",    "whom",    "why",     "will",
      "with",    "would",   "y",      "you",    "your",   "yours",   "yourself", "yourselves",
  };
  return words;
}

/// One lowercase token per non-empty line; blank and `#` lines are skipped.
inline StopWords load_stopwords(const std::filesystem::path& path) {
  StopWords words;
  for (const auto& line : text_io::lines(text_io::read_file(path))) {
    const auto t = text_io::trim(line);
    if (t.empty() || t.front() == '#') continue;
    std::string w(t);
    for (auto& ch : w) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    words.insert(std::move(w));
  }
  return words;
}

/// Splits on every non-ASCII-letter byte, lowercases, drops stop-words.
inline TokenizedDoc normalize_and_tokenize(std::string_view raw, const StopWords& stopwords) {
  TokenizedDoc tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty() && !stopwords.contains(current)) tokens.push_back(current);
    current.clear();
  };
  for (char ch : raw) {
    const auto u = static_cast<unsigned char>(ch);
    if ((u >= 'a' && u <= 'z') || (u >= 'A' && u <= 'Z')) {
      current.push_back(static_cast<char>(std::tolower(u)));
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

class Vocabulary {
 public:
  Vocabulary() = default;

  /// Fits on training documents only; document frequencies count documents.
  static Vocabulary build(const std::vector<TokenizedDoc>& train_docs) {
    if (train_docs.empty()) throw Error(ErrorCode::EmptyCorpus, "no training documents");
    std::map<std::string, std::size_t> df;
    for (const auto& doc : train_docs) {
      const std::set<std::string> unique(doc.begin(), doc.end());
      for (const auto& t : unique) ++df[t];
    }
    Vocabulary v;
    v.documents_ = train_docs.size();
    for (const auto& [token, count] : df) {
      v.index_.emplace(token, v.tokens_.size());
      v.tokens_.push_back(token);
      v.doc_freq_.push_back(count);
    }
    return v;
  }

  std::size_t size() const noexcept { return tokens_.size(); }
  std::size_t documents() const noexcept { return documents_; }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  std::size_t doc_freq(std::size_t i) const { return doc_freq_.at(i); }

  std::optional<std::size_t> index_of(const std::string& token) const {
    auto it = index_.find(token);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  double idf(std::size_t i) const {
    return std::log(static_cast<double>(documents_) / static_cast<double>(doc_freq_.at(i)));
  }

  /// `# documents=N` line, then `token,index,doc_freq` rows.
  std::string dump() const {
    std::string out = "# documents=" + std::to_string(documents_) + "\ntoken,index,doc_freq\n";
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
      out += tokens_[i] + ',' + std::to_string(i) + ',' + std::to_string(doc_freq_[i]) + '\n';
    }
    return out;
  }

  static Vocabulary parse(std::string_view text) {
    Vocabulary v;
    bool have_n = false, have_header = false;
    for (const auto& raw : text_io::lines(text)) {
      const auto line = text_io::trim(raw);
      if (line.empty()) continue;
      if (line.starts_with("# documents=")) {
        const auto n = text_io::parse_int(line.substr(12));
        if (!n || *n <= 0) throw Error(ErrorCode::BadFeatureFile, "bad document count line");
        v.documents_ = static_cast<std::size_t>(*n);
        have_n = true;
        continue;
      }
      if (!have_header) {
        if (line != "token,index,doc_freq") {
          throw Error(ErrorCode::BadFeatureFile, "vocabulary header missing");
        }
        have_header = true;
        continue;
      }
      const auto f = text_io::split(line);
      const auto idx = f.size() == 3 ? text_io::parse_int(f[1]) : std::nullopt;
      const auto df = f.size() == 3 ? text_io::parse_int(f[2]) : std::nullopt;
      if (!idx || !df || static_cast<std::size_t>(*idx) != v.tokens_.size() || *df <= 0) {
        throw Error(ErrorCode::BadFeatureFile, "bad vocabulary row '" + std::string(line) + "'");
      }
      v.index_.emplace(std::string(f[0]), v.tokens_.size());
      v.tokens_.emplace_back(f[0]);
      v.doc_freq_.push_back(static_cast<std::size_t>(*df));
    }
    if (!have_n || !have_header) throw Error(ErrorCode::BadFeatureFile, "incomplete vocabulary");
    return v;
  }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.documents_ == b.documents_ && a.tokens_ == b.tokens_ && a.doc_freq_ == b.doc_freq_;
  }

 private:
  std::size_t documents_ = 0;
  std::vector<std::string> tokens_;
  std::vector<std::size_t> doc_freq_;
  std::unordered_map<std::string, std::size_t> index_;
};

inline Vocabulary build_vocabulary(const std::vector<TokenizedDoc>& train_docs) {
  return Vocabulary::build(train_docs);
}

/// Occurrence count of each vocabulary token; OOV tokens are ignored.
inline std::vector<double> count_vectorize(const TokenizedDoc& doc, const Vocabulary& vocab) {
  std::vector<double> out(vocab.size(), 0.0);
  for (const auto& t : doc) {
    if (auto i = vocab.index_of(t)) out[*i] += 1.0;
  }
  return out;
}

/// (count / doc length) * ln(N / n_t). The length includes OOV tokens.
inline std::vector<double> tfidf_vectorize(const TokenizedDoc& doc, const Vocabulary& vocab) {
  auto out = count_vectorize(doc, vocab);
  if (doc.empty()) return out;
  const double len = static_cast<double>(doc.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] != 0.0) out[i] = (out[i] / len) * vocab.idf(i);
  }
  return out;
}

inline std::vector<double> vectorize(const TokenizedDoc& doc, const Vocabulary& vocab,
                                     TextMode mode) {
  return mode == TextMode::Count ? count_vectorize(doc, vocab) : tfidf_vectorize(doc, vocab);
}

inline std::vector<std::string> text_feature_names(const Vocabulary& vocab) {
  std::vector<std::string> names;
  names.reserve(vocab.size());
  for (const auto& t : vocab.tokens()) names.push_back("w_" + t);
  return names;
}

}  // namespace modhate
