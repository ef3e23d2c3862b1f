#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace synthgrid {

/// Largest number of fractional digits accepted in model output.
inline constexpr int kMaxFractionDigits = 6;

/// Energy in kWh, held as an exact count of micro-kWh so that hourly totals
/// are exact sums of the parsed member and HVAC values.
class KilowattHours {
 public:
  constexpr KilowattHours() = default;
  static constexpr KilowattHours from_micro(std::int64_t micro) { return KilowattHours(micro); }

  /// Parses "-?digits(.digits{1,6})?"; throws ParseError otherwise.
  static KilowattHours parse(std::string_view text);

  constexpr std::int64_t micro() const { return micro_; }
  double value() const { return static_cast<double>(micro_) / 1e6; }
  /// Shortest decimal form: 0.34, 1, 0.02.
  std::string to_string() const;

  constexpr KilowattHours& operator+=(KilowattHours o) {
    micro_ += o.micro_;
    return *this;
  }
  friend constexpr KilowattHours operator+(KilowattHours a, KilowattHours b) { return a += b; }
  friend constexpr auto operator<=>(KilowattHours, KilowattHours) = default;

 private:
  constexpr explicit KilowattHours(std::int64_t micro) : micro_(micro) {}
  std::int64_t micro_ = 0;
};

/// A numeric reading that remembers how it was written, so values echoed
/// back into prompts and CSVs keep the model's own formatting ("-5.0").
struct Measure {
  double value = 0.0;
  std::string literal;

  Measure() = default;
  Measure(double v) : value(v) {}  // NOLINT(google-explicit-constructor)
  Measure(double v, std::string lit) : value(v), literal(std::move(lit)) {}

  std::string text() const;

  friend bool operator==(const Measure& a, const Measure& b) { return a.value == b.value; }
};

/// Strict decimal used for model output: optional sign, digits, at most six
/// fractional digits, no exponent. Throws ParseError.
Measure parse_decimal(std::string_view text);

/// Any finite floating-point number (CSV and service payloads). Throws ParseError.
double parse_double(std::string_view text);

/// Non-negative integer without sign. Throws ParseError.
int parse_int(std::string_view text);

/// Shortest representation that round-trips.
std::string format_double(double v);

}  // namespace synthgrid
