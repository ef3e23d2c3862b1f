#pragma once

#include <array>
#include <string>
#include <vector>

#include "synthgrid/quantity.hpp"
#include "synthgrid/types.hpp"

namespace synthgrid {

struct FamilyStructure {
  std::string country;
  std::string family_type;
  std::vector<std::string> members;

  friend bool operator==(const FamilyStructure&, const FamilyStructure&) = default;
};

struct Range {
  Measure min;
  Measure max;

  friend bool operator==(const Range&, const Range&) = default;
};

/// Min/max per (parameter, season) for one country.
struct SeasonalWeatherRanges {
  std::string country;
  std::array<std::array<Range, 4>, 5> ranges{};

  const Range& at(WeatherParam p, Season s) const { return ranges[index_of(p)][index_of(s)]; }
  Range& at(WeatherParam p, Season s) { return ranges[index_of(p)][index_of(s)]; }

  friend bool operator==(const SeasonalWeatherRanges&, const SeasonalWeatherRanges&) = default;
};

struct WeatherReading {
  std::string label;
  Measure value;

  friend bool operator==(const WeatherReading&, const WeatherReading&) = default;
};

/// One representative day: 24 labelled readings for each parameter, index = hour.
struct HourlyWeatherDay {
  std::string country;
  Season season = Season::Winter;
  std::array<std::array<WeatherReading, kHoursPerDay>, 5> series{};

  const WeatherReading& at(WeatherParam p, std::size_t hour) const { return series[index_of(p)][hour]; }
  WeatherReading& at(WeatherParam p, std::size_t hour) { return series[index_of(p)][hour]; }
  double value(WeatherParam p, std::size_t hour) const { return at(p, hour).value.value; }

  friend bool operator==(const HourlyWeatherDay&, const HourlyWeatherDay&) = default;
};

struct Activity {
  std::string action;
  KilowattHours kwh;

  friend bool operator==(const Activity&, const Activity&) = default;
};

using DailySeries = std::array<Activity, kHoursPerDay>;

struct MemberSeries {
  std::string member;
  DailySeries hours;

  friend bool operator==(const MemberSeries&, const MemberSeries&) = default;
};

/// Stage-4 output: member and HVAC activities for one (family, season, day type).
struct DailyConsumptionProfile {
  std::string country;
  std::string family_type;
  Season season = Season::Winter;
  DayType day_type = DayType::Weekday;
  std::vector<MemberSeries> members;  // in family member order
  DailySeries heating;
  DailySeries cooling;
  std::array<KilowattHours, kHoursPerDay> totals{};

  /// totals[h] = sum of member kWh + heating + cooling at h.
  void recompute_totals();
  /// True when the stored totals equal the recomputed sums exactly.
  bool totals_consistent() const;

  friend bool operator==(const DailyConsumptionProfile&, const DailyConsumptionProfile&) = default;
};

}  // namespace synthgrid
