#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tmpfc {

enum class ErrorCode {
  MissingField,
  BadFps,
  EmptyFrames,
  UnknownTerritory,
  IoError,
  FormatError,
  DimensionMismatch,
  ParseError,
  DuplicateCase,
  BandTooWide,
  InvalidParams,
  EmptyInput,
  LengthMismatch,
  TooFew,
  ZeroVariance,
  SingleClass,
  TooFewGroups,
  EmptyGroup,
  InvalidPhases,
  PeakTooLarge,
  MissingColumn,
};

/// Stable upper-snake name used in reports and CLI messages (e.g. "BAD_FPS").
std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tmpfc
