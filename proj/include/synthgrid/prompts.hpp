#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "synthgrid/records.hpp"
#include "synthgrid/types.hpp"

namespace synthgrid {

/// A stage prompt exactly as shipped. Placeholders are `$NAME$` tokens; the
/// bracketed form `[$NAME$]` is replaced including its brackets.
struct PromptTemplate {
  StageId stage;
  Role role;
  std::string_view body;
  std::set<std::string> placeholders;
};

const PromptTemplate& prompt_template(StageId stage, Role role);
const std::vector<PromptTemplate>& all_prompt_templates();

/// Names of the `$NAME$` tokens in text. `$$DELIMITER$$` markers are not placeholders.
std::set<std::string> placeholders_in(std::string_view text);

using Bindings = std::map<std::string, std::string>;

/// Literal substitution, no re-expansion. Throws MissingPlaceholder.
ChatMessage render(const PromptTemplate& tmpl, const Bindings& bindings);

/// Bindings that name no placeholder of the template (callers log these).
std::vector<std::string> unused_bindings(const PromptTemplate& tmpl, const Bindings& bindings);

Bindings family_bindings(std::string_view country);
Bindings range_bindings(std::string_view country, int year);
Bindings hourly_bindings(std::string_view country, int year, Season season, const SeasonalWeatherRanges& ranges);

/// Hour, Temperature, Humidity, SolarRadiationDirect, SolarRadiationDiffuse and
/// WindSpeed as comma-separated 24-value lists. Throws ShapeError if the day
/// does not cover 24 hours.
Bindings bind_stage4_weather(const HourlyWeatherDay& day);

/// Same, for raw per-parameter value lists (used to reject short days).
Bindings bind_stage4_weather(const std::map<WeatherParam, std::vector<Measure>>& values);

Bindings consumption_bindings(const FamilyStructure& family, int year, Season season, DayType day_type,
                              const HourlyWeatherDay& weather);

/// [system, user] for the stateless stages.
std::vector<ChatMessage> single_turn(StageId stage, const Bindings& bindings);

using Turn = std::pair<ChatMessage, ChatMessage>;  // (user, assistant)

/// [system, user_1, assistant_1, ..., user_k] for season index k of a
/// country. prior must hold exactly season_index turns for this country in
/// season order. Throws HistoryError.
std::vector<ChatMessage> build_stage3_conversation(std::string_view country, const std::vector<Season>& seasons,
                                                   std::size_t season_index, const std::vector<Turn>& prior,
                                                   const ChatMessage& current_user);

/// Writes every template to `<dir>/<stage>_<role>.txt`.
void dump_prompts(const std::filesystem::path& dir);

}  // namespace synthgrid
