#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace surpmark {

enum class Errc {
  EmptyInput,
  TooFewDistinctValues,
  NonFiniteValue,
  StateOutOfRange,
  DimensionMismatch,
  NoTransitions,
  Reducible,
  NotStochastic,
  SingularSolve,
  SequenceTooShort,
  RecordTooShort,
  EmptyCorpus,
  InvalidSpec,
  EmptyClass,
  Io,
  VersionMismatch,
  Corrupt,
  Parse,
  Config,
};

constexpr std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::TooFewDistinctValues: return "TooFewDistinctValues";
    case Errc::NonFiniteValue: return "NonFiniteValue";
    case Errc::StateOutOfRange: return "StateOutOfRange";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::NoTransitions: return "NoTransitions";
    case Errc::Reducible: return "Reducible";
    case Errc::NotStochastic: return "NotStochastic";
    case Errc::SingularSolve: return "SingularSolve";
    case Errc::SequenceTooShort: return "SequenceTooShort";
    case Errc::RecordTooShort: return "RecordTooShort";
    case Errc::EmptyCorpus: return "EmptyCorpus";
    case Errc::InvalidSpec: return "InvalidSpec";
    case Errc::EmptyClass: return "EmptyClass";
    case Errc::Io: return "Io";
    case Errc::VersionMismatch: return "VersionMismatch";
    case Errc::Corrupt: return "Corrupt";
    case Errc::Parse: return "Parse";
    case Errc::Config: return "Config";
  }
  return "Unknown";
}

// All library failures are reported through this type; code() identifies the
// contract violation, what() carries the human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace surpmark
