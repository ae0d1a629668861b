#include "rattlesim/format.hpp"

#include <charconv>
#include <cmath>
#include <limits>

namespace rattlesim {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  std::string out(buf, res.ptr);
  // Plain notation spells out large integral values in full, e.g.
  // 669560349287637888; switch to exponent form past 17 significant digits.
  const auto first = out.find_first_of("123456789");
  const auto last = out.find_last_of("123456789");
  std::size_t digits = 0;
  if (first != std::string::npos) {
    for (std::size_t i = first; i <= last; ++i) digits += out[i] != '.';
  }
  if (digits > 17 || out.size() > 24) {
    const auto sci = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::scientific);
    out.assign(buf, sci.ptr);
  }
  return out;
}

std::optional<double> parse_number(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.empty()) return std::nullopt;
  if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace rattlesim
