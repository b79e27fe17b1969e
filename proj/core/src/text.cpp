#include "aloha2/text.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace aloha2 {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_real(std::string_view text) {
  const auto parse_part = [](std::string_view s) {
    double value{};
    const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
      throw std::invalid_argument("not a number: '" + std::string(s) + "'");
    }
    return value;
  };
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return parse_part(text);
  const double numerator = parse_part(text.substr(0, slash));
  const double denominator = parse_part(text.substr(slash + 1));
  if (denominator == 0) {
    throw std::invalid_argument("zero denominator in fraction");
  }
  return numerator / denominator;
}

}  // namespace aloha2
