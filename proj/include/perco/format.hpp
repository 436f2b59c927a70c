#pragma once

#include <charconv>
#include <string>

namespace perco {

/// Shortest decimal string that round-trips to the same double.
inline std::string shortest(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace perco
