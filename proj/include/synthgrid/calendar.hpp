#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "synthgrid/config.hpp"
#include "synthgrid/quantity.hpp"
#include "synthgrid/records.hpp"

namespace synthgrid {

using Date = std::chrono::year_month_day;

struct CountryCalendar {
  std::string country;
  int year = 2024;
  std::set<int> weekend_days{5, 6};  // Monday = 0
  std::map<Date, std::string> holidays;
  Hemisphere hemisphere = Hemisphere::North;

  bool is_holiday(const Date& d) const { return holidays.count(d) != 0; }
};

/// Monday = 0 ... Sunday = 6.
int weekday_index(const Date& d);

/// Built-in national days for the six default countries (empty for others).
std::map<Date, std::string> builtin_holidays(const std::string& country, int year);

/// `YYYY-MM-DD,label` lines; dates outside year are dropped. Throws ConfigError.
std::map<Date, std::string> parse_holiday_file(std::string_view text, int year);

/// holiday_file may be a single file (applies to every country) or a
/// directory holding `<Country>.csv`; otherwise the built-in table is used.
CountryCalendar build_calendar(const std::string& country, int year,
                               const std::optional<std::filesystem::path>& holiday_file = std::nullopt,
                               std::vector<int> weekend_days = {5, 6}, Hemisphere hemisphere = Hemisphere::North);

CountryCalendar build_calendar(const RunConfig& config, const std::string& country);

DayType effective_day_type(const Date& date, const CountryCalendar& cal);

struct YearlyRow {
  std::chrono::sys_days date;
  int hour = 0;
  Season season = Season::Winter;
  DayType day_type = DayType::Weekday;
  bool is_holiday = false;
  KilowattHours total;
  KilowattHours heating;
  KilowattHours cooling;
  std::vector<KilowattHours> members;
  double outdoor_temp_c = 0;
};

struct YearlyProfile {
  std::string country;
  std::string family_type;
  std::vector<std::string> members;
  std::vector<YearlyRow> rows;
};

using DailyProfiles = std::map<std::pair<Season, DayType>, DailyConsumptionProfile>;

/// One row per local-standard hour of cal.year. Throws AssemblyError listing
/// every missing (season, day type) profile or season of weather.
YearlyProfile assemble_year(const FamilyStructure& family, const DailyProfiles& daily, const CountryCalendar& cal,
                            const std::map<Season, HourlyWeatherDay>& weather);

std::string yearly_csv(const YearlyProfile& profile);
YearlyProfile parse_yearly_csv(std::string_view text);

}  // namespace synthgrid
