#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace trackx {

enum class ErrorCode {
  InvalidInterval,
  OverlapError,
  UnsortedStream,
  OverlappingPredictions,
  MissingColumn,
  UnexpectedColumn,
  BadTimestamp,
  BadValue,
  ProtocolDuplicateLabel,
  NotAClassifierTrack,
  OutOfDomain,
  NoPredecessorVersion,
  DegenerateTruth,
  UnknownOperator,
  ArityError,
  FilterSyntaxError,
  NoMatch,
  AmbiguousRef,
  TypeMismatch,
  NoCursor,
  BadMagic,
  DecodeError,
  SchemaVersionUnsupported,
  SchemaError,
  InvariantViolation,
  BadVersionString,
  BadTrackId,
  DuplicateTrack,
  UnknownTrack,
  UnknownSession,
  NoVideoBound,
  InvalidArgument,
};

std::string_view code_name(ErrorCode code);

// Base of every error raised by the engine. `code()` is the machine-readable
// part surfaced over the API; what() carries the human message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class AmbiguousRefError : public Error {
 public:
  AmbiguousRefError(const std::string& ref, std::vector<std::string> candidates);
  const std::vector<std::string>& candidates() const noexcept { return candidates_; }

 private:
  std::vector<std::string> candidates_;
};

class FilterSyntaxError : public Error {
 public:
  FilterSyntaxError(std::size_t position, const std::string& what);
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

class BadTimestampError : public Error {
 public:
  BadTimestampError(std::size_t row, const std::string& text);
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

}  // namespace trackx
