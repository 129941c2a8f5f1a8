#pragma once

#include <charconv>
#include <string>
#include <system_error>

namespace logicdepth {

/// Shortest decimal text that parses back to exactly `v`.
inline std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, end);
}

/// RFC 4180 quoting when the field needs it.
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace logicdepth
