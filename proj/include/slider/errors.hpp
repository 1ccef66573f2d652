#pragma once

#include <stdexcept>
#include <string>

namespace slider {

enum class ErrorCode {
  InvalidDomain,
  TooCoarse,
  OutOfDomain,
  BoxOutsideDomain,
  BoxUnresolved,
  UnsupportedShape,
  InvalidShape,
  NonPositiveClearance,
  InvalidArgument,
  NoConvergence,
  BracketFailure,
  InadmissibleShape,
  TooLarge,
  NoSolution,
  ParseError,
  ValidationError,
  Io,
};

const char* to_string(ErrorCode code);

/// Base class for every error raised by the library. The code selects the
/// CLI exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::string path, const std::string& what)
      : Error(ErrorCode::ParseError, what), line_(line), path_(std::move(path)) {}

  /// 1-based line of the offending token; 0 when not applicable.
  std::size_t line() const noexcept { return line_; }
  const std::string& path() const noexcept { return path_; }

 private:
  std::size_t line_;
  std::string path_;
};

class ValidationError : public Error {
 public:
  ValidationError(std::string path, std::string constraint)
      : Error(ErrorCode::ValidationError, path + ": " + constraint),
        path_(std::move(path)),
        constraint_(std::move(constraint)) {}

  const std::string& path() const noexcept { return path_; }
  const std::string& constraint() const noexcept { return constraint_; }

 private:
  std::string path_;
  std::string constraint_;
};

}  // namespace slider
