#ifndef PBANDIT_FORMAT_HPP
#define PBANDIT_FORMAT_HPP

#include <charconv>
#include <string>
#include <string_view>
#include <system_error>

namespace pbandit {

/// Shortest decimal representation that parses back to the same double.
inline std::string format_double(double v)
{
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

inline double parse_double(std::string_view s)
{
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument("cannot parse number '" + std::string(s) + "'");
  }
  return v;
}

} // namespace pbandit

#endif // PBANDIT_FORMAT_HPP
