#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "synthgrid/gateway.hpp"
#include "synthgrid/records.hpp"
#include "synthgrid/stage.hpp"

namespace synthgrid {

struct WeatherViolation {
  enum class Kind {
    SolarSumExceedsCap,
    DiffuseNotBelowDirect,
    TempPeakOutsideWindow,
    SolarPeakOutsideWindow,
    RangeExceeded,
    NegativeValue,
  };
  Kind kind;
  std::optional<int> hour;
  std::string detail;
  Severity severity = Severity::Error;
};

std::string_view to_string(WeatherViolation::Kind k);

inline constexpr double kSolarCapWm2 = 1000.0;
inline constexpr double kSunnyDirectWm2 = 50.0;

std::vector<WeatherViolation> validate_ranges(const SeasonalWeatherRanges& ranges);

/// Per-hour physics checks plus the whole-day peak warnings. ranges may be null.
std::vector<WeatherViolation> validate_hourly(const HourlyWeatherDay& day, const SeasonalWeatherRanges* ranges);

/// "Kind@hour: detail; ..." for logs and rejection messages.
std::string describe(const std::vector<WeatherViolation>& violations);

// ---- typical meteorological year --------------------------------------------

struct GeoLocation {
  double latitude = 0;
  double longitude = 0;
  std::string city;
  double utc_offset_hours = 0;
};

struct TmyRecord {
  unsigned month = 1;
  unsigned day = 1;
  unsigned hour = 0;
  double temperature_c = 0;
  double humidity_pct = 0;
  double direct_normal_wm2 = 0;
  double diffuse_horizontal_wm2 = 0;
  double wind_ms = 0;
};

inline constexpr std::size_t kTmyHours = 8760;

struct TmySeries {
  GeoLocation location;
  std::vector<TmyRecord> records;  // kTmyHours entries, local standard time
};

/// Parses a PVGIS v5.2 TMY JSON payload (UTC) and shifts it to the
/// location's standard time. Throws ParseError.
TmySeries parse_pvgis_tmy(std::string_view payload, const GeoLocation& location);

/// "tmy_<lat>_<lon>.json"
std::string tmy_cache_name(const GeoLocation& location);

/// Cached payload if present, else one GET to the service; the verbatim
/// payload is cached create-once. Throws CoordError, TransportError, ParseError.
TmySeries fetch_tmy(const GeoLocation& location, Transport* transport, const std::filesystem::path& cache_dir,
                    const std::string& base_url);

/// Meteorological seasons; southern hemisphere shifted by six months.
Season season_of(unsigned month, Hemisphere hemisphere);

/// Per-season hour-of-day means, labelled "TMY-mean". Seasons without any
/// record are absent.
std::map<Season, HourlyWeatherDay> aggregate_tmy_to_season(const TmySeries& series, std::string_view country,
                                                           Hemisphere hemisphere);

// ---- persistence --------------------------------------------------------------

std::string weather_csv(const std::vector<HourlyWeatherDay>& days);
std::vector<HourlyWeatherDay> parse_weather_csv(std::string_view text);

// ---- stage runners ------------------------------------------------------------

/// Stage 2 for one country; persisted as ranges/<Country>.txt.
SeasonalWeatherRanges synthesize_ranges(StageContext& ctx, const std::string& country);

/// Stage 3 (llm mode, seasons chained in one conversation) or the TMY
/// aggregate (external mode). Persisted as weather/<Country>_<Season>.csv.
std::map<Season, HourlyWeatherDay> synthesize_weather(StageContext& ctx, const std::string& country,
                                                      const SeasonalWeatherRanges* ranges);

}  // namespace synthgrid
