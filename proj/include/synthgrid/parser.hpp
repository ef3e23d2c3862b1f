#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "synthgrid/records.hpp"

namespace synthgrid {

inline constexpr std::string_view kMessageStart = "$$MESSAGE_START$$";
inline constexpr std::string_view kMessageEnd = "$$MESSAGE_END$$";

/// Text strictly between the first start delimiter and the next end
/// delimiter, trimmed. Anything outside (reasoning, quotes) is dropped.
struct Envelope {
  std::string inner_text;
};

Envelope extract_envelope(std::string_view raw);

/// Stage 1: JSON array of {"Country", "Families": [{"Family Type", "Members"}]}.
std::vector<FamilyStructure> parse_family_structures(const Envelope& env, std::string_view expected_country,
                                                     std::size_t expected_count);

/// Stage 2: five `#Param#[(Season,min,max) x4]` sections in any order.
SeasonalWeatherRanges parse_weather_ranges(const Envelope& env, std::string_view country);

/// Stage 3: five sections of 24 `(hour, label, value)` tuples.
HourlyWeatherDay parse_hourly_weather(const Envelope& env, std::string_view country, Season season);

/// Stage 4: `>>>MEMBERS>>>` member sections then `>>>HVAC>>>` Heating/Cooling.
DailyConsumptionProfile parse_consumption(const Envelope& env, const FamilyStructure& family, Season season,
                                          DayType day_type);

/// Removes characters the family prompt forbids in labels.
std::string sanitize_label(std::string_view label);

// Serializers emit the same grammars wrapped in the envelope; parsing their
// output yields an equal value.
std::string serialize_family_structures(std::string_view country, const std::vector<FamilyStructure>& families);
std::string serialize_weather_ranges(const SeasonalWeatherRanges& ranges);
std::string serialize_hourly_weather(const HourlyWeatherDay& day);
std::string serialize_consumption(const DailyConsumptionProfile& profile);

}  // namespace synthgrid
