#include "synthgrid/prompts.hpp"

#include <algorithm>

#include "synthgrid/errors.hpp"
#include "synthgrid/io.hpp"

namespace synthgrid {
namespace {

#include "prompt_templates.inc"

bool is_name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_name_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_' || c == '-'; }

struct Token {
  std::size_t begin;  // index of the opening '$'
  std::size_t end;    // one past the closing '$'
  std::string name;
};

std::vector<Token> scan_placeholders(std::string_view text) {
  std::vector<Token> out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '$') continue;
    if (i > 0 && text[i - 1] == '$') continue;
    if (i + 1 >= text.size() || !is_name_start(text[i + 1])) continue;
    std::size_t j = i + 1;
    while (j < text.size() && is_name_char(text[j])) ++j;
    if (j >= text.size() || text[j] != '$') continue;
    if (j + 1 < text.size() && text[j + 1] == '$') continue;
    out.push_back({i, j + 1, std::string(text.substr(i + 1, j - i - 1))});
    i = j;
  }
  return out;
}

PromptTemplate make(StageId stage, Role role, std::string_view body) {
  std::set<std::string> names;
  for (const auto& t : scan_placeholders(body)) names.insert(t.name);
  return {stage, role, body, std::move(names)};
}

std::string join_values(const std::vector<std::string>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) out += (i ? "," : "") + values[i];
  return out;
}

}  // namespace

const std::vector<PromptTemplate>& all_prompt_templates() {
  static const std::vector<PromptTemplate> templates{
      make(StageId::FamilyTypes, Role::System, k_family_system),
      make(StageId::FamilyTypes, Role::User, k_family_user),
      make(StageId::WeatherRanges, Role::System, k_ranges_system),
      make(StageId::WeatherRanges, Role::User, k_ranges_user),
      make(StageId::WeatherData, Role::System, k_hourly_system),
      make(StageId::WeatherData, Role::User, k_hourly_user),
      make(StageId::EnergyPatterns, Role::System, k_consumption_system),
      make(StageId::EnergyPatterns, Role::User, k_consumption_user),
  };
  return templates;
}

const PromptTemplate& prompt_template(StageId stage, Role role) {
  for (const auto& t : all_prompt_templates()) {
    if (t.stage == stage && t.role == role) return t;
  }
  throw Error("no " + std::string(to_string(role)) + " template for stage " + std::string(to_string(stage)));
}

std::set<std::string> placeholders_in(std::string_view text) {
  std::set<std::string> names;
  for (const auto& t : scan_placeholders(text)) names.insert(t.name);
  return names;
}

ChatMessage render(const PromptTemplate& tmpl, const Bindings& bindings) {
  const std::string_view body = tmpl.body;
  std::string out;
  out.reserve(body.size() + 256);
  std::size_t pos = 0;
  for (const auto& tok : scan_placeholders(body)) {
    const auto it = bindings.find(tok.name);
    if (it == bindings.end()) throw MissingPlaceholder(tok.name);
    std::size_t begin = tok.begin;
    std::size_t end = tok.end;
    if (begin > 0 && body[begin - 1] == '[' && end < body.size() && body[end] == ']' && begin - 1 >= pos) {
      --begin;
      ++end;
    }
    out.append(body.substr(pos, begin - pos));
    out.append(it->second);
    pos = end;
  }
  out.append(body.substr(pos));
  return {tmpl.role, std::move(out)};
}

std::vector<std::string> unused_bindings(const PromptTemplate& tmpl, const Bindings& bindings) {
  std::vector<std::string> out;
  for (const auto& [name, _] : bindings) {
    if (!tmpl.placeholders.count(name)) out.push_back(name);
  }
  return out;
}

Bindings family_bindings(std::string_view country) { return {{"COUNTRY", std::string(country)}}; }

Bindings range_bindings(std::string_view country, int year) {
  return {{"Country", std::string(country)}, {"Year", std::to_string(year)}};
}

Bindings hourly_bindings(std::string_view country, int year, Season season, const SeasonalWeatherRanges& ranges) {
  Bindings b{{"Country", std::string(country)},
             {"Year", std::to_string(year)},
             {"Season", std::string(to_string(season))}};
  for (WeatherParam p : kAllWeatherParams) {
    const auto& r = ranges.at(p, season);
    b[std::string(to_string(p)) + "_Min"] = r.min.text();
    b[std::string(to_string(p)) + "_Max"] = r.max.text();
  }
  return b;
}

Bindings bind_stage4_weather(const std::map<WeatherParam, std::vector<Measure>>& values) {
  static const std::vector<std::pair<WeatherParam, const char*>> names{
      {WeatherParam::Temperature, "Temperature"},
      {WeatherParam::Humidity, "Humidity"},
      {WeatherParam::SolRadDirect, "SolarRadiationDirect"},
      {WeatherParam::SolRadDiffuse, "SolarRadiationDiffuse"},
      {WeatherParam::WindSpeed, "WindSpeed"},
  };
  Bindings b;
  std::vector<std::string> hours;
  for (std::size_t h = 0; h < kHoursPerDay; ++h) hours.push_back(std::to_string(h));
  b["Hour"] = join_values(hours);
  for (const auto& [param, name] : names) {
    const auto it = values.find(param);
    const std::size_t n = it == values.end() ? 0 : it->second.size();
    if (n != kHoursPerDay) throw ShapeError(std::string(to_string(param)), n, "expected 24 hourly values");
    std::vector<std::string> texts;
    for (const auto& m : it->second) texts.push_back(m.text());
    b[name] = join_values(texts);
  }
  return b;
}

Bindings bind_stage4_weather(const HourlyWeatherDay& day) {
  std::map<WeatherParam, std::vector<Measure>> values;
  for (WeatherParam p : kAllWeatherParams) {
    for (std::size_t h = 0; h < kHoursPerDay; ++h) values[p].push_back(day.at(p, h).value);
  }
  return bind_stage4_weather(values);
}

Bindings consumption_bindings(const FamilyStructure& family, int year, Season season, DayType day_type,
                              const HourlyWeatherDay& weather) {
  Bindings b = bind_stage4_weather(weather);
  std::string members;
  for (std::size_t i = 0; i < family.members.size(); ++i) members += (i ? ", " : "") + family.members[i];
  b["Country"] = family.country;
  b["Year"] = std::to_string(year);
  b["Pattern"] = std::string(to_string(day_type));
  b["Season"] = std::string(to_string(season));
  b["FamilyType"] = family.family_type;
  b["Members"] = members;
  b["MembersNum"] = std::to_string(family.members.size());
  return b;
}

std::vector<ChatMessage> single_turn(StageId stage, const Bindings& bindings) {
  return {render(prompt_template(stage, Role::System), {}), render(prompt_template(stage, Role::User), bindings)};
}

namespace {

void check_stage3_user(const ChatMessage& msg, std::string_view country, Season season, std::size_t index) {
  const std::string prefix = "For the country of " + std::string(country) + " in the year of ";
  const std::string season_marker = "during the " + std::string(to_string(season)) + " season";
  if (msg.role != Role::User || msg.content.rfind(prefix, 0) != 0 ||
      msg.content.find(season_marker) == std::string::npos) {
    throw HistoryError("turn " + std::to_string(index) + " is not the " + std::string(to_string(season)) +
                       " request for " + std::string(country));
  }
}

}  // namespace

std::vector<ChatMessage> build_stage3_conversation(std::string_view country, const std::vector<Season>& seasons,
                                                   std::size_t season_index, const std::vector<Turn>& prior,
                                                   const ChatMessage& current_user) {
  if (season_index >= seasons.size()) throw HistoryError("season index out of range");
  if (prior.size() != season_index) {
    throw HistoryError("expected " + std::to_string(season_index) + " prior turns, got " +
                       std::to_string(prior.size()));
  }
  std::vector<ChatMessage> out{render(prompt_template(StageId::WeatherData, Role::System), {})};
  for (std::size_t i = 0; i < prior.size(); ++i) {
    check_stage3_user(prior[i].first, country, seasons[i], i);
    if (prior[i].second.role != Role::Assistant || prior[i].second.content.empty()) {
      throw HistoryError("turn " + std::to_string(i) + " has no assistant reply");
    }
    out.push_back(prior[i].first);
    out.push_back(prior[i].second);
  }
  check_stage3_user(current_user, country, seasons[season_index], season_index);
  out.push_back(current_user);
  return out;
}

void dump_prompts(const std::filesystem::path& dir) {
  for (const auto& t : all_prompt_templates()) {
    write_text_file(dir / (std::string(to_string(t.stage)) + "_" + std::string(to_string(t.role)) + ".txt"), t.body);
  }
}

}  // namespace synthgrid
