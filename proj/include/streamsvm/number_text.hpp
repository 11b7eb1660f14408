#pragma once

// Text form of reals shared by every file format: 17 significant digits on
// output, exact round trip on input.

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>

namespace streamsvm {

inline std::string format_real(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

// Finite value parsed from the whole of `tok`, or nullopt. Accepts a leading '+'.
inline std::optional<double> parse_real(std::string_view tok) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  if (tok.empty() || tok.front() == '+' || tok.front() == ' ') return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ptr != tok.data() + tok.size()) return std::nullopt;
  if (ec == std::errc::result_out_of_range) {
    // libstdc++ reports subnormals as out of range; strtod still rounds them correctly.
    const std::string copy(tok);
    char* end = nullptr;
    v = std::strtod(copy.c_str(), &end);
    if (end != copy.c_str() + copy.size() || !std::isfinite(v)) return std::nullopt;
    return v;
  }
  if (ec != std::errc() || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace streamsvm
