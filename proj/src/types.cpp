#include "synthgrid/types.hpp"

#include <algorithm>
#include <cctype>

#include "synthgrid/errors.hpp"

namespace synthgrid {

MemberMismatch::MemberMismatch(std::vector<std::string> missing_, std::vector<std::string> extra_)
    : OutputError([&] {
        std::string msg = "member mismatch; missing:";
        for (const auto& m : missing_) msg += " " + m;
        msg += "; extra:";
        for (const auto& e : extra_) msg += " " + e;
        return msg;
      }()),
      missing(std::move(missing_)),
      extra(std::move(extra_)) {}

namespace {

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view text, const std::array<Enum, N>& values, const char* what) {
  const auto t = trim(text);
  for (Enum v : values) {
    if (iequals(t, to_string(v))) return v;
  }
  throw ParseError(std::string("unknown ") + what + ": '" + std::string(t) + "'");
}

}  // namespace

std::string_view to_string(Season s) {
  switch (s) {
    case Season::Winter: return "Winter";
    case Season::Spring: return "Spring";
    case Season::Summer: return "Summer";
    case Season::Autumn: return "Autumn";
  }
  return "?";
}

std::string_view to_string(DayType d) { return d == DayType::Weekday ? "Weekday" : "Weekend"; }

std::string_view to_string(StageId s) {
  switch (s) {
    case StageId::FamilyTypes: return "FamilyTypes";
    case StageId::WeatherRanges: return "WeatherRanges";
    case StageId::WeatherData: return "WeatherData";
    case StageId::EnergyPatterns: return "EnergyPatterns";
  }
  return "?";
}

std::string_view to_string(WeatherParam p) {
  switch (p) {
    case WeatherParam::Temperature: return "Temperature";
    case WeatherParam::Humidity: return "Humidity";
    case WeatherParam::SolRadDiffuse: return "SolRad-Diffuse";
    case WeatherParam::SolRadDirect: return "SolRad-Direct";
    case WeatherParam::WindSpeed: return "Wind-Speed";
  }
  return "?";
}

std::string_view to_string(Severity s) { return s == Severity::Error ? "error" : "warning"; }

std::string_view to_string(Role r) {
  switch (r) {
    case Role::System: return "system";
    case Role::User: return "user";
    case Role::Assistant: return "assistant";
  }
  return "?";
}

Season parse_season(std::string_view text) { return parse_enum(text, kAllSeasons, "season"); }
DayType parse_day_type(std::string_view text) { return parse_enum(text, kAllDayTypes, "day type"); }
StageId parse_stage(std::string_view text) { return parse_enum(text, kAllStages, "stage"); }
WeatherParam parse_weather_param(std::string_view text) {
  return parse_enum(text, kAllWeatherParams, "weather parameter");
}
Role parse_role(std::string_view text) {
  return parse_enum(text, std::array{Role::System, Role::User, Role::Assistant}, "role");
}

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
         });
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(s.substr(start));
      return out;
    }
    out.emplace_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string hyphenate(std::string_view label) {
  const auto t = trim(label);
  std::string out;
  bool pending = false;
  for (char c : t) {
    const bool sep = std::isspace(static_cast<unsigned char>(c)) || c == '_' || c == '\'' || c == '"';
    if (sep) {
      pending = true;
      continue;
    }
    if (pending && !out.empty()) out.push_back('-');
    pending = false;
    out.push_back(c);
  }
  return out;
}

std::string slugify(std::string_view label) {
  std::string out;
  for (char c : hyphenate(label)) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    out.push_back(ok ? c : '-');
  }
  if (out.empty()) out = "unnamed";
  return out;
}

}  // namespace synthgrid
