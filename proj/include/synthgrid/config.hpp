#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "synthgrid/types.hpp"

namespace synthgrid {

enum class WeatherSource { Llm, External };

std::string_view to_string(WeatherSource w);

/// Capital city used for the external weather source.
struct Capital {
  std::string city;
  double latitude = 0;
  double longitude = 0;
  double utc_offset_hours = 0;  // local standard time

  Hemisphere hemisphere() const { return latitude < 0 ? Hemisphere::South : Hemisphere::North; }
};

/// Built-in registry for the six default countries.
const std::map<std::string, Capital>& builtin_capitals();

struct RunConfig {
  std::vector<std::string> countries{"USA", "Japan", "India", "Sweden", "UAE", "Brazil"};
  int year = 2024;
  int families_per_country = 5;
  std::vector<Season> seasons{kAllSeasons.begin(), kAllSeasons.end()};
  WeatherSource weather_source = WeatherSource::Llm;

  std::string model_id = "meta-llama/Meta-Llama-3.1-405B-Instruct";
  std::string endpoint_url = "https://api.deepinfra.com/v1/openai";
  std::string api_key_ref = "SYNTHGRID_API_KEY";
  double temperature = 0.7;
  int max_tokens = 8192;
  double request_timeout_s = 600;
  int max_retries = 3;
  double retry_base_delay_s = 2.0;
  int parallelism = 4;

  std::filesystem::path output_dir = "synthgrid-out";
  std::optional<std::filesystem::path> fixture_dir;
  std::optional<std::filesystem::path> record_dir;
  std::optional<std::filesystem::path> holiday_file;

  std::string tmy_base_url = "https://re.jrc.ec.europa.eu/api/v5_2/tmy";
  std::optional<std::filesystem::path> tmy_cache_dir;

  std::map<std::string, Capital> capitals = builtin_capitals();
  /// Per-country weekend override, weekday indices with Monday = 0.
  std::map<std::string, std::vector<int>> weekend_days;

  double balance_point_c = 18.0;
  double bin_width_c = 1.0;

  bool replay() const { return fixture_dir.has_value(); }
  std::filesystem::path effective_tmy_cache() const { return tmy_cache_dir.value_or(output_dir / "tmy_cache"); }
  const Capital& capital_of(const std::string& country) const;
  Hemisphere hemisphere_of(const std::string& country) const { return capital_of(country).hemisphere(); }
};

using ConfigOverrides = std::vector<std::pair<std::string, std::string>>;

/// Defaults < file < overrides. Throws ConfigError on malformed input, unknown
/// keys, unsupported countries or invariant violations.
RunConfig load_config(const std::filesystem::path& path, const ConfigOverrides& overrides = {});

/// Same precedence without a file.
RunConfig config_from_overrides(const ConfigOverrides& overrides);

/// Applies "key=value" style overrides on top of an existing config.
void apply_overrides(RunConfig& config, const ConfigOverrides& overrides);

/// Throws ConfigError when an invariant does not hold.
void validate_config(const RunConfig& config);

/// Maps aliases ("United Arab Emirates", "usa") onto a registry name.
/// Throws ConfigError listing the supported names.
std::string canonical_country(std::string_view name, const std::map<std::string, Capital>& capitals);

/// Round-trippable JSON text of a resolved config.
std::string config_to_json(const RunConfig& config);

}  // namespace synthgrid
