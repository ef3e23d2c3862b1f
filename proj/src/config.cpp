#include "synthgrid/config.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

#include "json.hpp"
#include "synthgrid/errors.hpp"
#include "synthgrid/io.hpp"

namespace synthgrid {
namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(WeatherSource w) { return w == WeatherSource::Llm ? "llm" : "external"; }

const std::map<std::string, Capital>& builtin_capitals() {
  static const std::map<std::string, Capital> capitals{
      {"USA", {"Washington D.C.", 38.9072, -77.0369, -5}},
      {"Japan", {"Tokyo", 35.6762, 139.6503, 9}},
      {"India", {"New Delhi", 28.6139, 77.2090, 5.5}},
      {"Sweden", {"Stockholm", 59.3293, 18.0686, 1}},
      {"UAE", {"Abu Dhabi", 24.45, 54.38, 4}},
      {"Brazil", {"Brasilia", -15.7939, -47.8828, -3}},
  };
  return capitals;
}

const Capital& RunConfig::capital_of(const std::string& country) const {
  const auto it = capitals.find(country);
  if (it == capitals.end()) throw ConfigError("no capital registered for " + country);
  return it->second;
}

std::string canonical_country(std::string_view name, const std::map<std::string, Capital>& capitals) {
  static const std::map<std::string, std::string> aliases{
      {"united arab emirates", "UAE"}, {"the united arab emirates", "UAE"}, {"emirates", "UAE"},
      {"united states", "USA"},        {"united states of america", "USA"}, {"us", "USA"},
      {"the usa", "USA"},
  };
  const auto t = trim(name);
  for (const auto& [key, _] : capitals) {
    if (iequals(key, t)) return key;
  }
  if (const auto it = aliases.find(to_lower(t)); it != aliases.end() && capitals.count(it->second)) {
    return it->second;
  }
  std::string supported;
  for (const auto& [key, _] : capitals) supported += (supported.empty() ? "" : ", ") + key;
  throw ConfigError("unknown country '" + std::string(t) + "'; supported: " + supported);
}

namespace {

template <typename T>
T get_as(const json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("bad value for '" + key + "': " + e.what());
  }
}

std::vector<std::string> string_list(const json& v, const std::string& key) {
  if (v.is_string()) {
    std::vector<std::string> out;
    for (auto& s : split(v.get<std::string>(), ',')) {
      if (!trim(s).empty()) out.emplace_back(trim(s));
    }
    return out;
  }
  return get_as<std::vector<std::string>>(v, key);
}

std::optional<fs::path> optional_path(const json& v, const std::string& key) {
  if (v.is_null()) return std::nullopt;
  const auto s = get_as<std::string>(v, key);
  if (s.empty()) return std::nullopt;
  return fs::path(s);
}

Capital capital_from_json(const json& v, const std::string& key) {
  if (!v.is_object()) throw ConfigError("capital entry for '" + key + "' must be an object");
  Capital c;
  c.city = get_as<std::string>(v.value("city", json("")), key + ".city");
  c.latitude = get_as<double>(v.at("latitude"), key + ".latitude");
  c.longitude = get_as<double>(v.at("longitude"), key + ".longitude");
  c.utc_offset_hours = get_as<double>(v.value("utc_offset_hours", json(0.0)), key + ".utc_offset_hours");
  return c;
}

using Setter = std::function<void(RunConfig&, const json&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table{
      {"countries", [](RunConfig& c, const json& v) { c.countries = string_list(v, "countries"); }},
      {"year", [](RunConfig& c, const json& v) { c.year = get_as<int>(v, "year"); }},
      {"families_per_country",
       [](RunConfig& c, const json& v) { c.families_per_country = get_as<int>(v, "families_per_country"); }},
      {"seasons",
       [](RunConfig& c, const json& v) {
         c.seasons.clear();
         for (const auto& s : string_list(v, "seasons")) {
           try {
             c.seasons.push_back(parse_season(s));
           } catch (const ParseError& e) {
             throw ConfigError(e.what());
           }
         }
       }},
      {"weather_source",
       [](RunConfig& c, const json& v) {
         const auto s = to_lower(get_as<std::string>(v, "weather_source"));
         if (s == "llm") c.weather_source = WeatherSource::Llm;
         else if (s == "external") c.weather_source = WeatherSource::External;
         else throw ConfigError("weather_source must be 'llm' or 'external', got '" + s + "'");
       }},
      {"model_id", [](RunConfig& c, const json& v) { c.model_id = get_as<std::string>(v, "model_id"); }},
      {"endpoint_url", [](RunConfig& c, const json& v) { c.endpoint_url = get_as<std::string>(v, "endpoint_url"); }},
      {"api_key_ref", [](RunConfig& c, const json& v) { c.api_key_ref = get_as<std::string>(v, "api_key_ref"); }},
      {"temperature", [](RunConfig& c, const json& v) { c.temperature = get_as<double>(v, "temperature"); }},
      {"max_tokens", [](RunConfig& c, const json& v) { c.max_tokens = get_as<int>(v, "max_tokens"); }},
      {"request_timeout_s",
       [](RunConfig& c, const json& v) { c.request_timeout_s = get_as<double>(v, "request_timeout_s"); }},
      {"max_retries", [](RunConfig& c, const json& v) { c.max_retries = get_as<int>(v, "max_retries"); }},
      {"retry_base_delay_s",
       [](RunConfig& c, const json& v) { c.retry_base_delay_s = get_as<double>(v, "retry_base_delay_s"); }},
      {"parallelism", [](RunConfig& c, const json& v) { c.parallelism = get_as<int>(v, "parallelism"); }},
      {"output_dir", [](RunConfig& c, const json& v) { c.output_dir = get_as<std::string>(v, "output_dir"); }},
      {"fixture_dir", [](RunConfig& c, const json& v) { c.fixture_dir = optional_path(v, "fixture_dir"); }},
      {"record_dir", [](RunConfig& c, const json& v) { c.record_dir = optional_path(v, "record_dir"); }},
      {"holiday_file", [](RunConfig& c, const json& v) { c.holiday_file = optional_path(v, "holiday_file"); }},
      {"tmy_base_url", [](RunConfig& c, const json& v) { c.tmy_base_url = get_as<std::string>(v, "tmy_base_url"); }},
      {"tmy_cache_dir", [](RunConfig& c, const json& v) { c.tmy_cache_dir = optional_path(v, "tmy_cache_dir"); }},
      {"capitals",
       [](RunConfig& c, const json& v) {
         if (!v.is_object()) throw ConfigError("'capitals' must be an object");
         for (const auto& [name, entry] : v.items()) c.capitals[name] = capital_from_json(entry, name);
       }},
      {"weekend_days",
       [](RunConfig& c, const json& v) {
         if (!v.is_object()) throw ConfigError("'weekend_days' must be an object");
         for (const auto& [name, days] : v.items()) c.weekend_days[name] = get_as<std::vector<int>>(days, name);
       }},
      {"balance_point_c", [](RunConfig& c, const json& v) { c.balance_point_c = get_as<double>(v, "balance_point_c"); }},
      {"bin_width_c", [](RunConfig& c, const json& v) { c.bin_width_c = get_as<double>(v, "bin_width_c"); }},
  };
  return table;
}

void apply_json(RunConfig& config, const json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  // Capitals first so that country validation sees custom registry entries.
  if (doc.contains("capitals")) setters().at("capitals")(config, doc.at("capitals"));
  for (const auto& [key, value] : doc.items()) {
    if (key == "capitals") continue;
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError("unknown config key '" + key + "'");
    it->second(config, value);
  }
}

std::string line_context(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t line_start = 0;
  for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      line_start = i + 1;
    }
  }
  auto end = text.find('\n', line_start);
  if (end == std::string::npos) end = text.size();
  return "line " + std::to_string(line) + ": " + text.substr(line_start, end - line_start);
}

void canonicalize_countries(RunConfig& config) {
  for (auto& c : config.countries) c = canonical_country(c, config.capitals);
  std::map<std::string, std::vector<int>> weekends;
  for (auto& [name, days] : config.weekend_days) weekends[canonical_country(name, config.capitals)] = days;
  config.weekend_days = std::move(weekends);
}

}  // namespace

void apply_overrides(RunConfig& config, const ConfigOverrides& overrides) {
  json doc = json::object();
  for (const auto& [key, raw] : overrides) {
    json value;
    try {
      value = json::parse(raw);
    } catch (const json::exception&) {
      value = raw;
    }
    doc[key] = value;
  }
  apply_json(config, doc);
  canonicalize_countries(config);
  validate_config(config);
}

void validate_config(const RunConfig& config) {
  if (config.countries.empty()) throw ConfigError("at least one country is required");
  for (const auto& c : config.countries) canonical_country(c, config.capitals);
  if (std::set<std::string>(config.countries.begin(), config.countries.end()).size() != config.countries.size()) {
    throw ConfigError("countries contain duplicates");
  }
  if (config.families_per_country < 1 || config.families_per_country > 5) {
    throw ConfigError("families_per_country must be between 1 and 5 (the family prompt asks for 5)");
  }
  if (config.parallelism < 1) throw ConfigError("parallelism must be >= 1");
  if (config.max_retries < 0) throw ConfigError("max_retries must be >= 0");
  if (config.year < 1 || config.year > 9999) throw ConfigError("year out of range");
  std::vector<Season> sorted = config.seasons;
  std::sort(sorted.begin(), sorted.end());
  if (sorted != std::vector<Season>(kAllSeasons.begin(), kAllSeasons.end())) {
    throw ConfigError("seasons must be a permutation of Winter, Spring, Summer, Autumn");
  }
  for (const auto& [country, cap] : config.capitals) {
    if (std::abs(cap.latitude) > 90 || std::abs(cap.longitude) > 180) {
      throw ConfigError("capital coordinates out of range for " + country);
    }
  }
  for (const auto& [country, days] : config.weekend_days) {
    if (days.empty() || days.size() > 3) throw ConfigError("weekend for " + country + " must have 1 to 3 days");
    for (int d : days) {
      if (d < 0 || d > 6) throw ConfigError("weekend day index out of range for " + country);
    }
  }
  if (config.bin_width_c <= 0) throw ConfigError("bin_width_c must be positive");
}

RunConfig load_config(const fs::path& path, const ConfigOverrides& overrides) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
  RunConfig config;
  if (!trim(text).empty()) {
    json doc;
    try {
      doc = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError(path.string() + ": malformed config at " + line_context(text, e.byte) + " (" + e.what() + ")");
    }
    apply_json(config, doc);
  }
  canonicalize_countries(config);
  apply_overrides(config, overrides);
  return config;
}

RunConfig config_from_overrides(const ConfigOverrides& overrides) {
  RunConfig config;
  apply_overrides(config, overrides);
  return config;
}

std::string config_to_json(const RunConfig& c) {
  json doc;
  doc["countries"] = c.countries;
  doc["year"] = c.year;
  doc["families_per_country"] = c.families_per_country;
  std::vector<std::string> seasons;
  for (auto s : c.seasons) seasons.emplace_back(to_string(s));
  doc["seasons"] = seasons;
  doc["weather_source"] = std::string(to_string(c.weather_source));
  doc["model_id"] = c.model_id;
  doc["endpoint_url"] = c.endpoint_url;
  doc["api_key_ref"] = c.api_key_ref;
  doc["temperature"] = c.temperature;
  doc["max_tokens"] = c.max_tokens;
  doc["request_timeout_s"] = c.request_timeout_s;
  doc["max_retries"] = c.max_retries;
  doc["retry_base_delay_s"] = c.retry_base_delay_s;
  doc["parallelism"] = c.parallelism;
  doc["output_dir"] = c.output_dir.string();
  doc["fixture_dir"] = c.fixture_dir ? json(c.fixture_dir->string()) : json(nullptr);
  doc["record_dir"] = c.record_dir ? json(c.record_dir->string()) : json(nullptr);
  doc["holiday_file"] = c.holiday_file ? json(c.holiday_file->string()) : json(nullptr);
  doc["tmy_base_url"] = c.tmy_base_url;
  doc["tmy_cache_dir"] = c.tmy_cache_dir ? json(c.tmy_cache_dir->string()) : json(nullptr);
  json caps = json::object();
  for (const auto& [name, cap] : c.capitals) {
    caps[name] = {{"city", cap.city},
                  {"latitude", cap.latitude},
                  {"longitude", cap.longitude},
                  {"utc_offset_hours", cap.utc_offset_hours}};
  }
  doc["capitals"] = caps;
  doc["weekend_days"] = c.weekend_days;
  doc["balance_point_c"] = c.balance_point_c;
  doc["bin_width_c"] = c.bin_width_c;
  return doc.dump(2) + "\n";
}

}  // namespace synthgrid
