#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace modhate {

enum class ErrorCode {
  // ingest
  MissingColumn,
  DuplicateId,
  BadLabel,
  UnreadableFile,
  NotWav,
  UnsupportedEncoding,
  EmptyAudio,
  NotPgm,
  CorruptHeader,
  TooFewSamples,
  BadSplit,
  // features
  BadSubframeCount,
  LengthMismatch,
  BadFraction,
  NoFrames,
  EmptyCorpus,
  // selection / models
  EmptyMatrix,
  BadTargetCount,
  DimensionMismatch,
  SingleClassTrainingSet,
  EvenK,
  KTooLarge,
  BadHyperparameter,
  BadModelFile,
  // evaluation / pipeline
  IncompleteResults,
  MixedAlgorithms,
  IoFailure,
  BadFeatureFile,
  Internal,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::BadLabel: return "BadLabel";
    case ErrorCode::UnreadableFile: return "UnreadableFile";
    case ErrorCode::NotWav: return "NotWav";
    case ErrorCode::UnsupportedEncoding: return "UnsupportedEncoding";
    case ErrorCode::EmptyAudio: return "EmptyAudio";
    case ErrorCode::NotPgm: return "NotPgm";
    case ErrorCode::CorruptHeader: return "CorruptHeader";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::BadSplit: return "BadSplit";
    case ErrorCode::BadSubframeCount: return "BadSubframeCount";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::BadFraction: return "BadFraction";
    case ErrorCode::NoFrames: return "NoFrames";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::EmptyMatrix: return "EmptyMatrix";
    case ErrorCode::BadTargetCount: return "BadTargetCount";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SingleClassTrainingSet: return "SingleClassTrainingSet";
    case ErrorCode::EvenK: return "EvenK";
    case ErrorCode::KTooLarge: return "KTooLarge";
    case ErrorCode::BadHyperparameter: return "BadHyperparameter";
    case ErrorCode::BadModelFile: return "BadModelFile";
    case ErrorCode::IncompleteResults: return "IncompleteResults";
    case ErrorCode::MixedAlgorithms: return "MixedAlgorithms";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::BadFeatureFile: return "BadFeatureFile";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

/// Exception carrying a machine-checkable error code. All library failures
/// surface as this type; `std::logic_error` is reserved for broken invariants.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace modhate
