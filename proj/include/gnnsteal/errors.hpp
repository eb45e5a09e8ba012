#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gnnsteal {

/// Root of every exception thrown by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (shape, range, configuration value).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A configuration document failed validation.
class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class LoadErrorKind {
  missing_file,
  node_out_of_range,
  label_out_of_range,
  bad_number,
  malformed,
};

const char* to_string(LoadErrorKind kind);

/// Dataset ingestion failure. Carries the offending file and 1-based line (0 when not line-specific).
class LoadError : public Error {
 public:
  LoadError(LoadErrorKind kind, std::string file, std::size_t line, const std::string& detail);

  LoadErrorKind kind() const { return kind_; }
  const std::string& file() const { return file_; }
  std::size_t line() const { return line_; }

 private:
  LoadErrorKind kind_;
  std::string file_;
  std::size_t line_;
};

/// The oracle refused a request because it would exceed the distinct-node budget.
class BudgetExceeded : public Error {
 public:
  BudgetExceeded(std::size_t remaining, std::size_t requested);

  std::size_t remaining() const { return remaining_; }
  std::size_t requested() const { return requested_; }

 private:
  std::size_t remaining_;
  std::size_t requested_;
};

/// A remote oracle answered with a structured error reply.
class RemoteError : public Error {
 public:
  RemoteError(int code, const std::string& message) : Error(message), code_(code) {}
  int code() const { return code_; }

 private:
  int code_;
};

}  // namespace gnnsteal
