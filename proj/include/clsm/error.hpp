#pragma once

#include <stdexcept>
#include <string>

namespace clsm {

enum class ErrorKind {
  EmptySentence,
  ParseError,
  DuplicateArticleId,
  InsufficientNegatives,
  DimensionMismatch,
  ZeroVector,
  NonFiniteLoss,
  UnknownCategory,
  MissingGold,
  ConfigError,
  IoError,
};

const char* to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` distinguishes failure modes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

/// Parse failure carrying the offending file and 1-based line number.
class ParseError : public Error {
 public:
  ParseError(std::string file, std::size_t line, const std::string& what)
      : Error(ErrorKind::ParseError,
              file + ":" + std::to_string(line) + ": " + what),
        file_(std::move(file)),
        line_(line) {}

  const std::string& file() const { return file_; }
  std::size_t line() const { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

}  // namespace clsm
