#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace evsynth {

/// Base class of every error thrown by this library.
class EvsError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration values (probabilities, counts, ranges).
class ConfigError : public EvsError {
public:
  using EvsError::EvsError;
};

/// Singular or otherwise unusable projective maps.
class GeometryError : public EvsError {
public:
  using EvsError::EvsError;
};

/// Malformed or inconsistent input data (events, landmarks, labels).
class DataError : public EvsError {
public:
  using EvsError::EvsError;
};

/// Simulator state/input mismatch (dimensions, time ordering).
class StateError : public EvsError {
public:
  using EvsError::EvsError;
};

/// Filesystem and codec failures.
class IoError : public EvsError {
public:
  using EvsError::EvsError;
};

/// Line-oriented text parse failure. Lines are 1-based.
class ParseError : public EvsError {
public:
  ParseError(std::size_t line, const std::string& what)
      : EvsError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

/// A point mapped to w' = 0 under a homography.
class PointAtInfinityError : public GeometryError {
public:
  explicit PointAtInfinityError(std::size_t index)
      : GeometryError("point " + std::to_string(index) +
                      " maps to infinity (w' = 0)"),
        index_(index) {}

  std::size_t index() const noexcept { return index_; }

private:
  std::size_t index_;
};

/// A value that is not on the representable grid of an encoded frame.
class CorruptionError : public DataError {
public:
  using DataError::DataError;
};

/// Prediction/ground-truth set mismatch during evaluation.
class EvaluationError : public EvsError {
public:
  using EvsError::EvsError;
};

/// Specific failure modes of the binary event stream codec.
enum class FormatErrorCode {
  bad_magic,
  bad_dimensions,
  truncated_header,
  truncated_record,
  trailing_bytes,
  coordinate_out_of_bounds,
  bad_polarity,
  nonmonotonic_timestamp,
  unsorted_stream,
};

const char* format_error_name(FormatErrorCode code) noexcept;

/// Binary stream serialization/deserialization failure. Carries the
/// machine-checkable failure code and the byte offset where it was detected.
class FormatError : public EvsError {
public:
  FormatError(FormatErrorCode code, std::size_t byte_offset,
              const std::string& what)
      : EvsError(std::string(format_error_name(code)) + " at byte " +
                 std::to_string(byte_offset) + ": " + what),
        code_(code),
        byte_offset_(byte_offset) {}

  FormatErrorCode code() const noexcept { return code_; }
  std::size_t byte_offset() const noexcept { return byte_offset_; }

private:
  FormatErrorCode code_;
  std::size_t byte_offset_;
};

}  // namespace evsynth
