#pragma once

#include <charconv>
#include <string>

namespace cayley {

// Shortest representation that round-trips.
inline std::string format_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace cayley
