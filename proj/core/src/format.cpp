#include "dateiv/format.hpp"

#include <charconv>
#include <system_error>

namespace dateiv {

namespace {

std::string to_chars_string(double v, std::chars_format fmt, int precision) {
  char buf[64];
  std::to_chars_result res =
      precision < 0 ? std::to_chars(buf, buf + sizeof buf, v, fmt)
                    : std::to_chars(buf, buf + sizeof buf, v, fmt, precision);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_fixed(double v, int precision) {
  return to_chars_string(v, std::chars_format::fixed, precision);
}

std::string format_scientific(double v, int precision) {
  return to_chars_string(v, std::chars_format::scientific, precision);
}

}  // namespace dateiv
