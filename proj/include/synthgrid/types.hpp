#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace synthgrid {

enum class Season { Winter, Spring, Summer, Autumn };
enum class DayType { Weekday, Weekend };
enum class StageId { FamilyTypes, WeatherRanges, WeatherData, EnergyPatterns };
enum class Hemisphere { North, South };

/// The five weather parameters, in the order the prompts list them.
enum class WeatherParam { Temperature, Humidity, SolRadDiffuse, SolRadDirect, WindSpeed };

inline constexpr std::array<Season, 4> kAllSeasons{Season::Winter, Season::Spring, Season::Summer, Season::Autumn};
inline constexpr std::array<DayType, 2> kAllDayTypes{DayType::Weekday, DayType::Weekend};
inline constexpr std::array<StageId, 4> kAllStages{StageId::FamilyTypes, StageId::WeatherRanges,
                                                   StageId::WeatherData, StageId::EnergyPatterns};
inline constexpr std::array<WeatherParam, 5> kAllWeatherParams{
    WeatherParam::Temperature, WeatherParam::Humidity, WeatherParam::SolRadDiffuse, WeatherParam::SolRadDirect,
    WeatherParam::WindSpeed};

inline constexpr std::size_t kHoursPerDay = 24;

constexpr std::size_t index_of(Season s) { return static_cast<std::size_t>(s); }
constexpr std::size_t index_of(DayType d) { return static_cast<std::size_t>(d); }
constexpr std::size_t index_of(WeatherParam p) { return static_cast<std::size_t>(p); }
constexpr std::size_t index_of(StageId s) { return static_cast<std::size_t>(s); }

std::string_view to_string(Season s);
std::string_view to_string(DayType d);
std::string_view to_string(StageId s);
/// Section name used by the weather grammars, e.g. "SolRad-Diffuse".
std::string_view to_string(WeatherParam p);

/// Case-insensitive parses; throw ParseError on unknown names.
Season parse_season(std::string_view text);
DayType parse_day_type(std::string_view text);
StageId parse_stage(std::string_view text);
WeatherParam parse_weather_param(std::string_view text);

enum class Severity { Error, Warning };
std::string_view to_string(Severity s);

enum class Role { System, User, Assistant };
std::string_view to_string(Role r);
Role parse_role(std::string_view text);

struct ChatMessage {
  Role role = Role::User;
  std::string content;

  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

// Small string helpers shared across modules.
std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);
bool iequals(std::string_view a, std::string_view b);
std::vector<std::string> split(std::string_view s, char sep);

/// Trims and replaces every run of whitespace, underscores or quotes with a
/// single hyphen ("Domestic Worker" -> "Domestic-Worker").
std::string hyphenate(std::string_view label);

/// Filesystem-safe slug: hyphenated label restricted to [A-Za-z0-9-_.].
std::string slugify(std::string_view label);

}  // namespace synthgrid
