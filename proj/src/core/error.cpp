#include "tmpfc/error.hpp"

namespace tmpfc {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingField: return "MISSING_FIELD";
    case ErrorCode::BadFps: return "BAD_FPS";
    case ErrorCode::EmptyFrames: return "EMPTY_FRAMES";
    case ErrorCode::UnknownTerritory: return "UNKNOWN_TERRITORY";
    case ErrorCode::IoError: return "IO_ERROR";
    case ErrorCode::FormatError: return "FORMAT_ERROR";
    case ErrorCode::DimensionMismatch: return "DIMENSION_MISMATCH";
    case ErrorCode::ParseError: return "PARSE_ERROR";
    case ErrorCode::DuplicateCase: return "DUPLICATE_CASE";
    case ErrorCode::BandTooWide: return "BAND_TOO_WIDE";
    case ErrorCode::InvalidParams: return "INVALID_PARAMS";
    case ErrorCode::EmptyInput: return "EMPTY_INPUT";
    case ErrorCode::LengthMismatch: return "LENGTH_MISMATCH";
    case ErrorCode::TooFew: return "TOO_FEW";
    case ErrorCode::ZeroVariance: return "ZERO_VARIANCE";
    case ErrorCode::SingleClass: return "SINGLE_CLASS";
    case ErrorCode::TooFewGroups: return "TOO_FEW_GROUPS";
    case ErrorCode::EmptyGroup: return "EMPTY_GROUP";
    case ErrorCode::InvalidPhases: return "INVALID_PHASES";
    case ErrorCode::PeakTooLarge: return "PEAK_TOO_LARGE";
    case ErrorCode::MissingColumn: return "MISSING_COLUMN";
  }
  return "UNKNOWN";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace tmpfc
