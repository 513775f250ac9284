#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace trajfda {

enum class Errc {
  // validation
  NonFiniteValue,
  GridMismatch,
  DuplicateId,
  TooFewCurves,
  UnknownId,
  InvalidGrid,
  NonUniformGrid,
  TooShort,
  AllCurvesFlagged,
  AllZeroWo,
  InvalidConfig,
  InvalidCrossParams,
  NoCommonInterval,
  MalformedRow,
  NonMonotoneTime,
  EmptyInput,
  Io,
  // numerical
  DegenerateSection,
  SingularSubsetCov,
  NotPositiveDefinite,
  IllConditionedFit,
};

constexpr std::string_view errc_name(Errc e) {
  switch (e) {
    case Errc::NonFiniteValue: return "NonFiniteValue";
    case Errc::GridMismatch: return "GridMismatch";
    case Errc::DuplicateId: return "DuplicateId";
    case Errc::TooFewCurves: return "TooFewCurves";
    case Errc::UnknownId: return "UnknownId";
    case Errc::InvalidGrid: return "InvalidGrid";
    case Errc::NonUniformGrid: return "NonUniformGrid";
    case Errc::TooShort: return "TooShort";
    case Errc::AllCurvesFlagged: return "AllCurvesFlagged";
    case Errc::AllZeroWo: return "AllZeroWo";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::InvalidCrossParams: return "InvalidCrossParams";
    case Errc::NoCommonInterval: return "NoCommonInterval";
    case Errc::MalformedRow: return "MalformedRow";
    case Errc::NonMonotoneTime: return "NonMonotoneTime";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::Io: return "Io";
    case Errc::DegenerateSection: return "DegenerateSection";
    case Errc::SingularSubsetCov: return "SingularSubsetCov";
    case Errc::NotPositiveDefinite: return "NotPositiveDefinite";
    case Errc::IllConditionedFit: return "IllConditionedFit";
  }
  return "Unknown";
}

/// True for failures of a numerical procedure on otherwise valid input.
constexpr bool is_numerical(Errc e) {
  return e == Errc::DegenerateSection || e == Errc::SingularSubsetCov ||
         e == Errc::NotPositiveDefinite || e == Errc::IllConditionedFit;
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail)
      : std::runtime_error(std::string(errc_name(code)) + ": " + detail), code_(code) {}

  Errc code() const noexcept { return code_; }
  bool numerical() const noexcept { return is_numerical(code_); }

 private:
  Errc code_;
};

}  // namespace trajfda
