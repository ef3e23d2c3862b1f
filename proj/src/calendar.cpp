#include "synthgrid/calendar.hpp"

#include <cstdio>

#include "synthgrid/errors.hpp"
#include "synthgrid/io.hpp"
#include "synthgrid/weather.hpp"

namespace synthgrid {
namespace chr = std::chrono;

int weekday_index(const Date& d) {
  return static_cast<int>(chr::weekday(chr::sys_days(d)).iso_encoding()) - 1;
}

namespace {

Date ymd(int y, unsigned m, unsigned d) { return Date{chr::year(y), chr::month(m), chr::day(d)}; }

Date nth(int y, unsigned m, chr::weekday wd, unsigned n) {
  return Date(chr::sys_days(chr::year_month_weekday{chr::year(y), chr::month(m), wd[n]}));
}

Date last(int y, unsigned m, chr::weekday wd) {
  return Date(chr::sys_days(chr::year_month_weekday_last{chr::year(y), chr::month(m), wd[chr::last]}));
}

std::string two(unsigned v) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "%02u", v);
  return buf;
}

std::string iso_date(const Date& d) {
  return std::to_string(static_cast<int>(d.year())) + "-" + two(static_cast<unsigned>(d.month())) + "-" +
         two(static_cast<unsigned>(d.day()));
}

std::optional<Date> parse_iso_date(std::string_view s) {
  s = trim(s);
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  try {
    const Date d = ymd(parse_int(s.substr(0, 4)), static_cast<unsigned>(parse_int(s.substr(5, 2))),
                       static_cast<unsigned>(parse_int(s.substr(8, 2))));
    if (!d.ok()) return std::nullopt;
    return d;
  } catch (const ParseError&) {
    return std::nullopt;
  }
}

}  // namespace

std::map<Date, std::string> builtin_holidays(const std::string& country, int y) {
  using chr::Monday;
  using chr::Thursday;
  std::map<Date, std::string> h;
  if (country == "USA") {
    h[ymd(y, 1, 1)] = "New Year's Day";
    h[nth(y, 1, Monday, 3)] = "Martin Luther King Jr. Day";
    h[nth(y, 2, Monday, 3)] = "Presidents' Day";
    h[last(y, 5, Monday)] = "Memorial Day";
    h[ymd(y, 6, 19)] = "Juneteenth";
    h[ymd(y, 7, 4)] = "Independence Day";
    h[nth(y, 9, Monday, 1)] = "Labor Day";
    h[nth(y, 10, Monday, 2)] = "Columbus Day";
    h[ymd(y, 11, 11)] = "Veterans Day";
    h[nth(y, 11, Thursday, 4)] = "Thanksgiving";
    h[ymd(y, 12, 25)] = "Christmas Day";
  } else if (country == "Japan") {
    h[ymd(y, 1, 1)] = "New Year's Day";
    h[ymd(y, 2, 11)] = "National Foundation Day";
    h[ymd(y, 2, 23)] = "Emperor's Birthday";
    h[ymd(y, 4, 29)] = "Showa Day";
    h[ymd(y, 5, 3)] = "Constitution Memorial Day";
    h[ymd(y, 5, 4)] = "Greenery Day";
    h[ymd(y, 5, 5)] = "Children's Day";
    h[ymd(y, 11, 3)] = "Culture Day";
    h[ymd(y, 11, 23)] = "Labor Thanksgiving Day";
  } else if (country == "India") {
    h[ymd(y, 1, 26)] = "Republic Day";
    h[ymd(y, 8, 15)] = "Independence Day";
    h[ymd(y, 10, 2)] = "Gandhi Jayanti";
  } else if (country == "Sweden") {
    h[ymd(y, 1, 1)] = "New Year's Day";
    h[ymd(y, 1, 6)] = "Epiphany";
    h[ymd(y, 5, 1)] = "May Day";
    h[ymd(y, 6, 6)] = "National Day";
    h[ymd(y, 12, 25)] = "Christmas Day";
    h[ymd(y, 12, 26)] = "Boxing Day";
  } else if (country == "UAE") {
    h[ymd(y, 1, 1)] = "New Year's Day";
    h[ymd(y, 12, 2)] = "National Day";
    h[ymd(y, 12, 3)] = "National Day";
  } else if (country == "Brazil") {
    h[ymd(y, 1, 1)] = "New Year's Day";
    h[ymd(y, 4, 21)] = "Tiradentes";
    h[ymd(y, 5, 1)] = "Labour Day";
    h[ymd(y, 9, 7)] = "Independence Day";
    h[ymd(y, 10, 12)] = "Our Lady of Aparecida";
    h[ymd(y, 11, 2)] = "All Souls' Day";
    h[ymd(y, 11, 15)] = "Republic Proclamation Day";
    h[ymd(y, 12, 25)] = "Christmas Day";
  }
  return h;
}

std::map<Date, std::string> parse_holiday_file(std::string_view text, int year) {
  std::map<Date, std::string> out;
  int lineno = 0;
  for (const auto& raw : split(text, '\n')) {
    ++lineno;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto comma = line.find(',');
    const auto date_text = line.substr(0, comma);
    const auto d = parse_iso_date(date_text);
    if (!d) throw ConfigError("holiday file line " + std::to_string(lineno) + ": invalid date '" + std::string(date_text) + "'");
    if (static_cast<int>(d->year()) != year) continue;
    out[*d] = comma == std::string_view::npos ? std::string("holiday") : std::string(trim(line.substr(comma + 1)));
  }
  return out;
}

CountryCalendar build_calendar(const std::string& country, int year,
                               const std::optional<std::filesystem::path>& holiday_file, std::vector<int> weekend_days,
                               Hemisphere hemisphere) {
  CountryCalendar cal;
  cal.country = country;
  cal.year = year;
  cal.hemisphere = hemisphere;
  cal.weekend_days = {weekend_days.begin(), weekend_days.end()};
  if (cal.weekend_days.empty() || cal.weekend_days.size() > 3) throw ConfigError("weekend must have 1 to 3 days");
  for (int d : cal.weekend_days) {
    if (d < 0 || d > 6) throw ConfigError("weekend day index out of range: " + std::to_string(d));
  }
  std::optional<std::filesystem::path> file;
  if (holiday_file) {
    if (std::filesystem::is_directory(*holiday_file)) {
      const auto candidate = *holiday_file / (country + ".csv");
      if (std::filesystem::exists(candidate)) file = candidate;
    } else {
      file = *holiday_file;
    }
  }
  cal.holidays = file ? parse_holiday_file(read_text_file(*file), year) : builtin_holidays(country, year);
  return cal;
}

CountryCalendar build_calendar(const RunConfig& config, const std::string& country) {
  std::vector<int> weekend{5, 6};
  if (auto it = config.weekend_days.find(country); it != config.weekend_days.end()) weekend = it->second;
  return build_calendar(country, config.year, config.holiday_file, weekend, config.hemisphere_of(country));
}

DayType effective_day_type(const Date& date, const CountryCalendar& cal) {
  if (cal.weekend_days.count(weekday_index(date)) || cal.is_holiday(date)) return DayType::Weekend;
  return DayType::Weekday;
}

YearlyProfile assemble_year(const FamilyStructure& family, const DailyProfiles& daily, const CountryCalendar& cal,
                            const std::map<Season, HourlyWeatherDay>& weather) {
  std::string gaps;
  for (Season s : kAllSeasons) {
    for (DayType d : kAllDayTypes) {
      const auto it = daily.find({s, d});
      if (it == daily.end()) {
        gaps += " " + std::string(to_string(s)) + "/" + std::string(to_string(d));
        continue;
      }
      std::vector<std::string> names;
      for (const auto& m : it->second.members) names.push_back(m.member);
      if (names != family.members) {
        throw AssemblyError(family.family_type + " " + std::string(to_string(s)) + "/" + std::string(to_string(d)) +
                            " profile members do not match the family");
      }
    }
    if (!weather.count(s)) gaps += " weather:" + std::string(to_string(s));
  }
  if (!gaps.empty()) throw AssemblyError(family.country + " " + family.family_type + " is missing" + gaps);

  YearlyProfile y;
  y.country = family.country;
  y.family_type = family.family_type;
  y.members = family.members;
  const chr::sys_days first{chr::year(cal.year) / chr::January / 1};
  const chr::sys_days end{chr::year(cal.year + 1) / chr::January / 1};
  y.rows.reserve(static_cast<std::size_t>((end - first).count()) * kHoursPerDay);
  for (auto day = first; day < end; day += chr::days(1)) {
    const Date date(day);
    const Season season = season_of(static_cast<unsigned>(date.month()), cal.hemisphere);
    const DayType type = effective_day_type(date, cal);
    const auto& profile = daily.at({season, type});
    const auto& wx = weather.at(season);
    for (std::size_t h = 0; h < kHoursPerDay; ++h) {
      YearlyRow r;
      r.date = day;
      r.hour = static_cast<int>(h);
      r.season = season;
      r.day_type = type;
      r.is_holiday = cal.is_holiday(date);
      r.total = profile.totals[h];
      r.heating = profile.heating[h].kwh;
      r.cooling = profile.cooling[h].kwh;
      for (const auto& m : profile.members) r.members.push_back(m.hours[h].kwh);
      r.outdoor_temp_c = wx.value(WeatherParam::Temperature, h);
      y.rows.push_back(std::move(r));
    }
  }
  return y;
}

std::string yearly_csv(const YearlyProfile& p) {
  std::string out =
      "timestamp_iso8601,country,family_type,season,day_type,is_holiday,hour_of_day,total_kwh,heating_kwh,cooling_kwh";
  for (const auto& m : p.members) out += "," + csv_field(hyphenate(m) + "_kwh");
  out += ",outdoor_temp_c\n";
  const std::string prefix = "," + csv_field(p.country) + "," + csv_field(p.family_type) + ",";
  for (const auto& r : p.rows) {
    out += iso_date(Date(r.date)) + "T" + two(static_cast<unsigned>(r.hour)) + ":00:00" + prefix;
    out += std::string(to_string(r.season)) + "," + std::string(to_string(r.day_type)) + "," +
           (r.is_holiday ? "1" : "0") + "," + std::to_string(r.hour) + "," + r.total.to_string() + "," +
           r.heating.to_string() + "," + r.cooling.to_string();
    for (const auto& k : r.members) out += "," + k.to_string();
    out += "," + format_double(r.outdoor_temp_c) + "\n";
  }
  return out;
}

YearlyProfile parse_yearly_csv(std::string_view text) {
  YearlyProfile p;
  std::size_t width = 0;
  bool header = true;
  for (const auto& line : split(text, '\n')) {
    if (trim(line).empty()) continue;
    const auto f = split_csv_line(line);
    if (header) {
      if (f.size() < 11 || f[0] != "timestamp_iso8601" || f.back() != "outdoor_temp_c") {
        throw ParseError("not a yearly profile CSV");
      }
      for (std::size_t i = 10; i + 1 < f.size(); ++i) {
        const auto& c = f[i];
        if (c.size() < 5 || c.substr(c.size() - 4) != "_kwh") throw ParseError("bad member column " + c);
        p.members.push_back(c.substr(0, c.size() - 4));
      }
      width = f.size();
      header = false;
      continue;
    }
    if (f.size() != width) throw ParseError("yearly CSV row has the wrong width");
    const auto d = parse_iso_date(std::string_view(f[0]).substr(0, 10));
    if (!d) throw ParseError("bad timestamp " + f[0]);
    if (p.rows.empty()) {
      p.country = f[1];
      p.family_type = f[2];
    }
    YearlyRow r;
    r.date = chr::sys_days(*d);
    r.season = parse_season(f[3]);
    r.day_type = parse_day_type(f[4]);
    r.is_holiday = f[5] == "1";
    r.hour = parse_int(f[6]);
    r.total = KilowattHours::parse(f[7]);
    r.heating = KilowattHours::parse(f[8]);
    r.cooling = KilowattHours::parse(f[9]);
    for (std::size_t i = 10; i + 1 < f.size(); ++i) r.members.push_back(KilowattHours::parse(f[i]));
    r.outdoor_temp_c = parse_double(f.back());
    p.rows.push_back(std::move(r));
  }
  if (header) throw ParseError("empty yearly CSV");
  return p;
}

}  // namespace synthgrid
