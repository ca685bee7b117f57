#pragma once

#include <charconv>
#include <string>
#include <string_view>
#include <system_error>

#include "fvgp/error.hpp"

namespace fvgp {

/// Shortest decimal text that parses back to exactly the same double.
inline std::string to_exact_string(double value) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) throw std::logic_error("to_chars failed");
  return std::string(buf, end);
}

inline double parse_double(std::string_view text) {
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) throw InputError("invalid number '" + std::string(text) + "'");
  return value;
}

}  // namespace fvgp
