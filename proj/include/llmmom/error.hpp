#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace llmmom {

/// Base class for every error raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input file violates its documented format or the panel invariants.
/// `line` is 1-based and counts the header; 0 when the error is not tied to a row.
class DataError : public Error {
 public:
  DataError(const std::string& file, std::size_t line, const std::string& what)
      : Error(file + (line ? ":" + std::to_string(line) : std::string{}) + ": " + what),
        file_(file),
        line_(line) {}

  const std::string& file() const { return file_; }
  std::size_t line() const { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

/// Caller violated an operation's precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Scoring backend failed permanently for a key.
class ScoringError : public Error {
 public:
  using Error::Error;
};

}  // namespace llmmom
