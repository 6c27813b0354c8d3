#include "evochain/error.hpp"

namespace evochain {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::parameter: return "parameter";
    case ErrorKind::config: return "config";
    case ErrorKind::parse: return "parse";
    case ErrorKind::integrity: return "integrity";
    case ErrorKind::resource: return "resource";
    case ErrorKind::convergence: return "convergence";
  }
  return "unknown";
}

ParseError::ParseError(std::size_t line, const std::string& message)
    : Error(ErrorKind::parse,
            line == 0 ? message : "line " + std::to_string(line) + ": " + message),
      line_(line) {}

ConvergenceError::ConvergenceError(const std::string& message, double residual)
    : Error(ErrorKind::convergence,
            message + " (last residual " + std::to_string(residual) + ")"),
      residual_(residual) {}

}  // namespace evochain
