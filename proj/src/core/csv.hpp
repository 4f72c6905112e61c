#pragma once

#include <charconv>
#include <string>
#include <system_error>

namespace ecp {

// Locale-independent shortest round-trip representation.
inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

}  // namespace ecp

