#pragma once

#include <charconv>
#include <string>

namespace evochain::detail {

/// Shortest decimal that round-trips to the same double.
inline std::string format_number(double value) {
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, ptr);
}

}  // namespace evochain::detail
