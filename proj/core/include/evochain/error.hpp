#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace evochain {

/// Error categories. The command line tool maps these onto exit codes.
enum class ErrorKind {
  parameter,    // precondition on an argument violated
  config,       // pipeline configuration invalid or stale
  parse,        // malformed input file
  integrity,    // inconsistent data between stages
  resource,     // a configured cap was exceeded
  convergence,  // an iterative method hit its iteration cap
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ParameterError : public Error {
 public:
  explicit ParameterError(const std::string& message)
      : Error(ErrorKind::parameter, message) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message)
      : Error(ErrorKind::config, message) {}
};

/// Raised while reading input files. `line()` is 1-based; 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message);

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IntegrityError : public Error {
 public:
  explicit IntegrityError(const std::string& message)
      : Error(ErrorKind::integrity, message) {}
};

class ResourceError : public Error {
 public:
  explicit ResourceError(const std::string& message)
      : Error(ErrorKind::resource, message) {}
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& message, double residual);

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace evochain
