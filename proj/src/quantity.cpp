#include "synthgrid/quantity.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <limits>

#include "synthgrid/errors.hpp"
#include "synthgrid/types.hpp"

namespace synthgrid {
namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Validates the strict decimal grammar and returns the position of '.', or npos.
std::size_t check_decimal(std::string_view t) {
  std::size_t i = 0;
  if (i < t.size() && (t[i] == '-' || t[i] == '+')) ++i;
  const std::size_t int_start = i;
  while (i < t.size() && is_digit(t[i])) ++i;
  if (i == int_start) throw ParseError("not a number: '" + std::string(t) + "'");
  if (i == t.size()) return std::string_view::npos;
  if (t[i] != '.') throw ParseError("not a number: '" + std::string(t) + "'");
  const std::size_t dot = i++;
  const std::size_t frac_start = i;
  while (i < t.size() && is_digit(t[i])) ++i;
  if (i != t.size() || i == frac_start) throw ParseError("not a number: '" + std::string(t) + "'");
  if (i - frac_start > kMaxFractionDigits) {
    throw ParseError("more than " + std::to_string(kMaxFractionDigits) + " fractional digits: '" + std::string(t) + "'");
  }
  return dot;
}

}  // namespace

KilowattHours KilowattHours::parse(std::string_view text) {
  const auto t = trim(text);
  const auto dot = check_decimal(t);
  bool negative = false;
  std::size_t i = 0;
  if (t[0] == '-' || t[0] == '+') {
    negative = t[0] == '-';
    i = 1;
  }
  const auto int_part = t.substr(i, (dot == std::string_view::npos ? t.size() : dot) - i);
  if (int_part.size() > 12) throw ParseError("kWh value out of range: '" + std::string(t) + "'");
  std::int64_t micro = 0;
  for (char c : int_part) micro = micro * 10 + (c - '0');
  std::int64_t frac = 0;
  int digits = 0;
  if (dot != std::string_view::npos) {
    for (char c : t.substr(dot + 1)) {
      frac = frac * 10 + (c - '0');
      ++digits;
    }
  }
  for (; digits < kMaxFractionDigits; ++digits) frac *= 10;
  micro = micro * 1'000'000 + frac;
  return KilowattHours(negative ? -micro : micro);
}

std::string KilowattHours::to_string() const {
  const std::int64_t mag = micro_ < 0 ? -micro_ : micro_;
  std::string out = micro_ < 0 ? "-" : "";
  out += std::to_string(mag / 1'000'000);
  std::int64_t frac = mag % 1'000'000;
  if (frac != 0) {
    std::string digits = std::to_string(frac);
    digits.insert(0, static_cast<std::size_t>(kMaxFractionDigits) - digits.size(), '0');
    while (digits.back() == '0') digits.pop_back();
    out += "." + digits;
  }
  return out;
}

std::string Measure::text() const { return literal.empty() ? format_double(value) : literal; }

Measure parse_decimal(std::string_view text) {
  const auto t = trim(text);
  check_decimal(t);
  const auto body = (!t.empty() && t[0] == '+') ? t.substr(1) : t;
  double v = 0;
  const auto res = std::from_chars(body.data(), body.data() + body.size(), v);
  if (res.ec != std::errc{} || res.ptr != body.data() + body.size()) {
    throw ParseError("not a number: '" + std::string(t) + "'");
  }
  return Measure(v, std::string(t));
}

double parse_double(std::string_view text) {
  auto t = trim(text);
  if (!t.empty() && t[0] == '+') t.remove_prefix(1);
  double v = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc{} || res.ptr != t.data() + t.size() || !std::isfinite(v)) {
    throw ParseError("not a number: '" + std::string(text) + "'");
  }
  return v;
}

int parse_int(std::string_view text) {
  const auto t = trim(text);
  int v = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || !is_digit(t[0]) || res.ec != std::errc{} || res.ptr != t.data() + t.size()) {
    throw ParseError("not an integer: '" + std::string(text) + "'");
  }
  return v;
}

std::string format_double(double v) {
  if (v == 0.0) return "0";  // also folds -0
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

}  // namespace synthgrid
