#include "synthgrid/weather.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <set>

#include "json.hpp"
#include "synthgrid/errors.hpp"
#include "synthgrid/io.hpp"
#include "synthgrid/parser.hpp"
#include "synthgrid/prompts.hpp"

namespace synthgrid {
using nlohmann::json;

std::string_view to_string(WeatherViolation::Kind k) {
  using K = WeatherViolation::Kind;
  switch (k) {
    case K::SolarSumExceedsCap: return "SolarSumExceedsCap";
    case K::DiffuseNotBelowDirect: return "DiffuseNotBelowDirect";
    case K::TempPeakOutsideWindow: return "TempPeakOutsideWindow";
    case K::SolarPeakOutsideWindow: return "SolarPeakOutsideWindow";
    case K::RangeExceeded: return "RangeExceeded";
    case K::NegativeValue: return "NegativeValue";
  }
  return "?";
}

std::string describe(const std::vector<WeatherViolation>& violations) {
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty()) out += "; ";
    out += std::string(to_string(v.kind));
    if (v.hour) out += "@" + std::to_string(*v.hour);
    out += ": " + v.detail;
  }
  return out;
}

namespace {

using K = WeatherViolation::Kind;

bool non_negative_param(WeatherParam p) { return p != WeatherParam::Temperature; }
bool is_solar(WeatherParam p) { return p == WeatherParam::SolRadDiffuse || p == WeatherParam::SolRadDirect; }

std::string pname(WeatherParam p) { return std::string(to_string(p)); }

/// True when some hour attaining the maximum lies in [lo, hi].
std::optional<int> peak_outside(const HourlyWeatherDay& day, WeatherParam p, int lo, int hi) {
  double best = day.value(p, 0);
  for (std::size_t h = 1; h < kHoursPerDay; ++h) best = std::max(best, day.value(p, h));
  std::optional<int> first;
  for (std::size_t h = 0; h < kHoursPerDay; ++h) {
    if (day.value(p, h) != best) continue;
    if (static_cast<int>(h) >= lo && static_cast<int>(h) <= hi) return std::nullopt;
    if (!first) first = static_cast<int>(h);
  }
  return first;
}

}  // namespace

std::vector<WeatherViolation> validate_ranges(const SeasonalWeatherRanges& ranges) {
  std::vector<WeatherViolation> out;
  for (Season s : kAllSeasons) {
    const std::string season(to_string(s));
    for (WeatherParam p : kAllWeatherParams) {
      const auto& r = ranges.at(p, s);
      if (r.min.value > r.max.value) {
        out.push_back({K::RangeExceeded, std::nullopt, pname(p) + " " + season + " min above max", Severity::Error});
      }
      if (non_negative_param(p) && r.min.value < 0) {
        out.push_back({K::NegativeValue, std::nullopt, pname(p) + " " + season + " min " + r.min.text(),
                       Severity::Error});
      }
    }
    const double humidity_max = ranges.at(WeatherParam::Humidity, s).max.value;
    if (humidity_max > 100) {
      out.push_back({K::RangeExceeded, std::nullopt, "Humidity " + season + " max above 100", Severity::Error});
    }
    const double solar = ranges.at(WeatherParam::SolRadDiffuse, s).max.value +
                         ranges.at(WeatherParam::SolRadDirect, s).max.value;
    if (solar > kSolarCapWm2) {
      out.push_back({K::SolarSumExceedsCap, std::nullopt, season + " diffuse+direct max " + format_double(solar),
                     Severity::Error});
    }
  }
  return out;
}

std::vector<WeatherViolation> validate_hourly(const HourlyWeatherDay& day, const SeasonalWeatherRanges* ranges) {
  std::vector<WeatherViolation> out;
  for (std::size_t h = 0; h < kHoursPerDay; ++h) {
    const int hour = static_cast<int>(h);
    for (WeatherParam p : kAllWeatherParams) {
      const auto& m = day.at(p, h).value;
      if (non_negative_param(p) && m.value < 0) {
        out.push_back({K::NegativeValue, hour, pname(p) + " " + m.text(), Severity::Error});
      }
      if (ranges != nullptr && !(is_solar(p) && m.value == 0)) {
        const auto& r = ranges->at(p, day.season);
        if (m.value < r.min.value || m.value > r.max.value) {
          out.push_back({K::RangeExceeded, hour,
                         pname(p) + " " + m.text() + " outside [" + r.min.text() + ", " + r.max.text() + "]",
                         Severity::Error});
        }
      }
    }
    if (day.value(WeatherParam::Humidity, h) > 100) {
      out.push_back({K::RangeExceeded, hour, "Humidity above 100", Severity::Error});
    }
    const double diffuse = day.value(WeatherParam::SolRadDiffuse, h);
    const double direct = day.value(WeatherParam::SolRadDirect, h);
    if (diffuse + direct > kSolarCapWm2) {
      out.push_back({K::SolarSumExceedsCap, hour, "diffuse+direct " + format_double(diffuse + direct),
                     Severity::Error});
    }
    if (direct > kSunnyDirectWm2 && diffuse >= direct) {
      out.push_back({K::DiffuseNotBelowDirect, hour,
                     "diffuse " + format_double(diffuse) + " >= direct " + format_double(direct), Severity::Error});
    }
  }
  if (auto h = peak_outside(day, WeatherParam::Temperature, 14, 16)) {
    out.push_back({K::TempPeakOutsideWindow, *h, "temperature peaks outside 14-16", Severity::Warning});
  }
  if (auto h = peak_outside(day, WeatherParam::SolRadDirect, 12, 15)) {
    out.push_back({K::SolarPeakOutsideWindow, *h, "direct solar peaks outside 12-15", Severity::Warning});
  }
  return out;
}

// ---- TMY -------------------------------------------------------------------------

TmySeries parse_pvgis_tmy(std::string_view payload, const GeoLocation& location) {
  json doc;
  try {
    doc = json::parse(payload);
  } catch (const json::exception& e) {
    throw ParseError(std::string("TMY payload: ") + e.what());
  }
  std::vector<TmyRecord> utc;
  try {
    const auto& hourly = doc.at("outputs").at("tmy_hourly");
    if (!hourly.is_array()) throw ParseError("tmy_hourly is not an array");
    utc.reserve(hourly.size());
    for (const auto& row : hourly) {
      const auto stamp = row.at("time(UTC)").get<std::string>();
      // YYYYMMDD:HHMM
      if (stamp.size() != 13 || stamp[8] != ':') throw ParseError("bad TMY timestamp '" + stamp + "'");
      TmyRecord r;
      r.month = static_cast<unsigned>(parse_int(stamp.substr(4, 2)));
      r.day = static_cast<unsigned>(parse_int(stamp.substr(6, 2)));
      r.hour = static_cast<unsigned>(parse_int(stamp.substr(9, 2)));
      if (r.month < 1 || r.month > 12 || r.day < 1 || r.day > 31 || r.hour > 23) {
        throw ParseError("bad TMY timestamp '" + stamp + "'");
      }
      r.temperature_c = row.at("T2m").get<double>();
      r.humidity_pct = row.at("RH").get<double>();
      r.direct_normal_wm2 = row.at("Gb(n)").get<double>();
      r.diffuse_horizontal_wm2 = row.at("Gd(h)").get<double>();
      r.wind_ms = row.at("WS10m").get<double>();
      if (r.humidity_pct < 0 || r.humidity_pct > 100) throw ParseError("TMY humidity out of [0,100] at " + stamp);
      if (r.direct_normal_wm2 < 0 || r.diffuse_horizontal_wm2 < 0) throw ParseError("negative irradiance at " + stamp);
      utc.push_back(r);
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("TMY payload: ") + e.what());
  }
  if (utc.size() != kTmyHours) {
    throw ParseError("TMY payload has " + std::to_string(utc.size()) + " hourly records, expected 8760");
  }

  // Local standard time: the value at local index i is the UTC value offset hours earlier.
  const long n = static_cast<long>(kTmyHours);
  const long offset = std::lround(location.utc_offset_hours);
  TmySeries series{location, utc};
  for (long i = 0; i < n; ++i) {
    const auto& src = utc[static_cast<std::size_t>(((i - offset) % n + n) % n)];
    auto& dst = series.records[static_cast<std::size_t>(i)];
    dst.temperature_c = src.temperature_c;
    dst.humidity_pct = src.humidity_pct;
    dst.direct_normal_wm2 = src.direct_normal_wm2;
    dst.diffuse_horizontal_wm2 = src.diffuse_horizontal_wm2;
    dst.wind_ms = src.wind_ms;
  }
  return series;
}

std::string tmy_cache_name(const GeoLocation& location) {
  return "tmy_" + format_double(location.latitude) + "_" + format_double(location.longitude) + ".json";
}

TmySeries fetch_tmy(const GeoLocation& location, Transport* transport, const std::filesystem::path& cache_dir,
                    const std::string& base_url) {
  if (!std::isfinite(location.latitude) || !std::isfinite(location.longitude) ||
      std::abs(location.latitude) > 90 || std::abs(location.longitude) > 180) {
    throw CoordError("invalid coordinates (" + format_double(location.latitude) + ", " +
                     format_double(location.longitude) + ")");
  }
  const auto cached = cache_dir / tmy_cache_name(location);
  if (std::filesystem::exists(cached)) return parse_pvgis_tmy(read_text_file(cached), location);
  if (transport == nullptr) throw TransportError("no TMY cache at " + cached.string() + " and no network transport");

  HttpRequest req;
  req.url = base_url + "?lat=" + format_double(location.latitude) + "&lon=" + format_double(location.longitude) +
            "&outputformat=json";
  const auto resp = transport->send(req);
  if (resp.status != 200) throw TransportError("TMY service returned " + std::to_string(resp.status), resp.status);
  auto series = parse_pvgis_tmy(resp.body, location);
  publish_once(cached, resp.body);
  return series;
}

Season season_of(unsigned month, Hemisphere hemisphere) {
  if (month < 1 || month > 12) throw Error("month out of range: " + std::to_string(month));
  if (hemisphere == Hemisphere::South) month = (month + 5) % 12 + 1;
  switch (month) {
    case 12:
    case 1:
    case 2: return Season::Winter;
    case 3:
    case 4:
    case 5: return Season::Spring;
    case 6:
    case 7:
    case 8: return Season::Summer;
    default: return Season::Autumn;
  }
}

std::map<Season, HourlyWeatherDay> aggregate_tmy_to_season(const TmySeries& series, std::string_view country,
                                                           Hemisphere hemisphere) {
  struct Acc {
    std::array<std::array<double, kHoursPerDay>, 5> sum{};
    std::array<std::size_t, kHoursPerDay> count{};
  };
  std::map<Season, Acc> acc;
  for (const auto& r : series.records) {
    auto& a = acc[season_of(r.month, hemisphere)];
    const std::array<double, 5> v{r.temperature_c, r.humidity_pct, r.diffuse_horizontal_wm2, r.direct_normal_wm2,
                                  r.wind_ms};
    for (WeatherParam p : kAllWeatherParams) a.sum[index_of(p)][r.hour] += v[index_of(p)];
    ++a.count[r.hour];
  }
  std::map<Season, HourlyWeatherDay> out;
  for (const auto& [season, a] : acc) {
    HourlyWeatherDay day;
    day.country = std::string(country);
    day.season = season;
    for (WeatherParam p : kAllWeatherParams) {
      for (std::size_t h = 0; h < kHoursPerDay; ++h) {
        const double mean = a.count[h] ? a.sum[index_of(p)][h] / static_cast<double>(a.count[h]) : 0.0;
        day.at(p, h) = {"TMY-mean", Measure(mean)};
      }
    }
    out.emplace(season, std::move(day));
  }
  return out;
}

// ---- persistence ------------------------------------------------------------------

namespace {
constexpr std::string_view kWeatherHeader =
    "country,season,hour,temp_label,temp_c,humidity_label,humidity_pct,diffuse_label,diffuse_wm2,direct_label,"
    "direct_wm2,wind_label,wind_ms";
}

std::string weather_csv(const std::vector<HourlyWeatherDay>& days) {
  std::string out(kWeatherHeader);
  out += "\n";
  for (const auto& d : days) {
    for (std::size_t h = 0; h < kHoursPerDay; ++h) {
      out += csv_field(d.country) + "," + std::string(to_string(d.season)) + "," + std::to_string(h);
      for (WeatherParam p : kAllWeatherParams) {
        const auto& r = d.at(p, h);
        out += "," + csv_field(r.label) + "," + r.value.text();
      }
      out += "\n";
    }
  }
  return out;
}

std::vector<HourlyWeatherDay> parse_weather_csv(std::string_view text) {
  std::vector<HourlyWeatherDay> days;
  std::vector<std::set<int>> hours_seen;
  bool header = true;
  for (const auto& line : split(text, '\n')) {
    if (trim(line).empty()) continue;
    if (header) {
      if (trim(line) != kWeatherHeader) throw ParseError("unexpected weather CSV header");
      header = false;
      continue;
    }
    const auto f = split_csv_line(line);
    if (f.size() != 13) throw ParseError("weather CSV row has " + std::to_string(f.size()) + " fields");
    const Season season = parse_season(f[1]);
    const int hour = parse_int(f[2]);
    if (hour > 23) throw ParseError("weather CSV hour out of range");
    std::size_t idx = days.size();
    for (std::size_t i = 0; i < days.size(); ++i) {
      if (days[i].country == f[0] && days[i].season == season) idx = i;
    }
    if (idx == days.size()) {
      days.emplace_back();
      days.back().country = f[0];
      days.back().season = season;
      hours_seen.emplace_back();
    }
    if (!hours_seen[idx].insert(hour).second) throw ParseError("duplicate hour in weather CSV");
    for (WeatherParam p : kAllWeatherParams) {
      const std::size_t col = 3 + 2 * index_of(p);
      days[idx].at(p, static_cast<std::size_t>(hour)) = {f[col], parse_decimal(f[col + 1])};
    }
  }
  for (std::size_t i = 0; i < days.size(); ++i) {
    if (hours_seen[i].size() != kHoursPerDay) throw ShapeError(days[i].country, hours_seen[i].size(), "weather CSV");
  }
  return days;
}

// ---- stage runners ----------------------------------------------------------------

namespace {

std::filesystem::path weather_path(const StageContext& ctx, const std::string& country, Season s,
                                   std::string_view ext) {
  return ctx.out_dir() / "weather" / (slugify(country) + "_" + std::string(to_string(s)) + std::string(ext));
}

void warn_all(StageContext& ctx, const std::string& item, const std::vector<WeatherViolation>& v) {
  if (!v.empty()) ctx.warn(item + ": " + describe(v));
}

}  // namespace

SeasonalWeatherRanges synthesize_ranges(StageContext& ctx, const std::string& country) {
  const auto path = ctx.out_dir() / "ranges" / (slugify(country) + ".txt");
  if (std::filesystem::exists(path)) return parse_weather_ranges(extract_envelope(read_text_file(path)), country);

  const auto messages = single_turn(StageId::WeatherRanges, range_bindings(country, ctx.config.year));
  auto ranges = run_with_retries(ctx, messages, StageId::WeatherRanges, country, [&](const std::string& raw) {
    auto r = parse_weather_ranges(extract_envelope(raw), country);
    const auto v = validate_ranges(r);
    if (has_errors(v)) throw ValidationRejected(describe(v));
    return r;
  });
  write_text_file(path, serialize_weather_ranges(ranges));
  return ranges;
}

namespace {

// TMY means are kept to two decimals once they leave memory.
void round_for_output(HourlyWeatherDay& day) {
  for (WeatherParam p : kAllWeatherParams) {
    for (std::size_t h = 0; h < kHoursPerDay; ++h) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.2f", day.value(p, h));
      std::string text = buf;
      if (text == "-0.00") text = "0.00";
      day.at(p, h).value = parse_decimal(text);
    }
  }
}

}  // namespace

std::map<Season, HourlyWeatherDay> synthesize_weather(StageContext& ctx, const std::string& country,
                                                      const SeasonalWeatherRanges* ranges) {
  std::map<Season, HourlyWeatherDay> out;
  const auto& seasons = ctx.config.seasons;

  if (ctx.config.weather_source == WeatherSource::External) {
    const auto& cap = ctx.config.capital_of(country);
    const GeoLocation loc{cap.latitude, cap.longitude, cap.city, cap.utc_offset_hours};
    const auto series = fetch_tmy(loc, ctx.http, ctx.config.effective_tmy_cache(), ctx.config.tmy_base_url);
    auto by_season = aggregate_tmy_to_season(series, country, cap.hemisphere());
    for (Season s : seasons) {
      auto it = by_season.find(s);
      if (it == by_season.end()) throw Error("TMY series for " + country + " has no " + std::string(to_string(s)));
      round_for_output(it->second);
      warn_all(ctx, country + "/" + std::string(to_string(s)), validate_hourly(it->second, nullptr));
      write_text_file(weather_path(ctx, country, s, ".csv"), weather_csv({it->second}));
      out.emplace(s, std::move(it->second));
    }
    return out;
  }

  if (ranges == nullptr) throw Error("llm weather for " + country + " needs Stage-2 ranges");
  std::vector<Turn> prior;
  for (std::size_t k = 0; k < seasons.size(); ++k) {
    const Season season = seasons[k];
    const std::string item = country + "/" + std::string(to_string(season));
    const ChatMessage user =
        render(prompt_template(StageId::WeatherData, Role::User), hourly_bindings(country, ctx.config.year, season, *ranges));
    const auto raw_path = weather_path(ctx, country, season, ".response.txt");

    const auto accept = [&](const std::string& raw) {
      auto day = parse_hourly_weather(extract_envelope(raw), country, season);
      const auto v = validate_hourly(day, ranges);
      if (has_errors(v)) throw ValidationRejected(describe(v));
      warn_all(ctx, item, v);
      return day;
    };

    std::string raw;
    HourlyWeatherDay day;
    if (std::filesystem::exists(raw_path)) {
      raw = read_text_file(raw_path);
      day = accept(raw);
    } else {
      const auto messages = build_stage3_conversation(country, seasons, k, prior, user);
      std::tie(day, raw) = run_with_retries(ctx, messages, StageId::WeatherData, item, [&](const std::string& r) {
        return std::pair{accept(r), r};
      });
      write_text_file(raw_path, raw);
    }
    write_text_file(weather_path(ctx, country, season, ".csv"), weather_csv({day}));
    prior.push_back({user, {Role::Assistant, raw}});
    out.emplace(season, std::move(day));
  }
  return out;
}

}  // namespace synthgrid
