#include "trackx/error.hpp"

namespace trackx {

std::string_view code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInterval: return "InvalidInterval";
    case ErrorCode::OverlapError: return "OverlapError";
    case ErrorCode::UnsortedStream: return "UnsortedStream";
    case ErrorCode::OverlappingPredictions: return "OverlappingPredictions";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::UnexpectedColumn: return "UnexpectedColumn";
    case ErrorCode::BadTimestamp: return "BadTimestamp";
    case ErrorCode::BadValue: return "BadValue";
    case ErrorCode::ProtocolDuplicateLabel: return "ProtocolDuplicateLabel";
    case ErrorCode::NotAClassifierTrack: return "NotAClassifierTrack";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::NoPredecessorVersion: return "NoPredecessorVersion";
    case ErrorCode::DegenerateTruth: return "DegenerateTruth";
    case ErrorCode::UnknownOperator: return "UnknownOperator";
    case ErrorCode::ArityError: return "ArityError";
    case ErrorCode::FilterSyntaxError: return "FilterSyntaxError";
    case ErrorCode::NoMatch: return "NoMatch";
    case ErrorCode::AmbiguousRef: return "AmbiguousRef";
    case ErrorCode::TypeMismatch: return "TypeMismatch";
    case ErrorCode::NoCursor: return "NoCursor";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::DecodeError: return "DecodeError";
    case ErrorCode::SchemaVersionUnsupported: return "SchemaVersionUnsupported";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::BadVersionString: return "BadVersionString";
    case ErrorCode::BadTrackId: return "BadTrackId";
    case ErrorCode::DuplicateTrack: return "DuplicateTrack";
    case ErrorCode::UnknownTrack: return "UnknownTrack";
    case ErrorCode::UnknownSession: return "UnknownSession";
    case ErrorCode::NoVideoBound: return "NoVideoBound";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

namespace {

std::string join_candidates(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& item : items) {
    if (!out.empty()) out += ", ";
    out += item;
  }
  return out;
}

}  // namespace

AmbiguousRefError::AmbiguousRefError(const std::string& ref,
                                     std::vector<std::string> candidates)
    : Error(ErrorCode::AmbiguousRef,
            "ambiguous track reference '" + ref + "': " + join_candidates(candidates)),
      candidates_(std::move(candidates)) {}

FilterSyntaxError::FilterSyntaxError(std::size_t position, const std::string& what)
    : Error(ErrorCode::FilterSyntaxError,
            "filter syntax error at " + std::to_string(position) + ": " + what),
      position_(position) {}

BadTimestampError::BadTimestampError(std::size_t row, const std::string& text)
    : Error(ErrorCode::BadTimestamp,
            "bad timestamp '" + text + "' in row " + std::to_string(row)),
      row_(row) {}

}  // namespace trackx
