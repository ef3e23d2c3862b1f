#pragma once

#include <array>
#include <atomic>
#include <filesystem>
#include <map>
#include <string>

#include "synthgrid/gateway.hpp"
#include "synthgrid/records.hpp"

namespace synthgrid::testing {

/// Deterministic stand-in for an OpenAI-compatible chat service. It reads the
/// stage from the system prompt and the subject (country, season, family)
/// from the user prompt, and answers with well-formed, validator-clean text.
class SyntheticModel final : public Transport {
 public:
  HttpResponse send(const HttpRequest& request) override;

  int requests(StageId s) const { return counts_[index_of(s)].load(); }
  int total_requests() const;

  static std::string family_response(const std::string& country);
  static std::string ranges_response();
  static std::string hourly_response(Season season);
  static std::string consumption_response(const std::vector<std::string>& members, Season season, DayType day);

  /// The fixed ranges the model reports for every country.
  static SeasonalWeatherRanges ranges(const std::string& country);
  static HourlyWeatherDay day(const std::string& country, Season season);

 private:
  std::array<std::atomic<int>, 4> counts_{};
};

/// Unique scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "t");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

/// Source-tree fixture directory.
std::filesystem::path fixture_path(const std::string& relative);

/// Reads every regular file under root into relative-path -> bytes.
std::map<std::string, std::string> snapshot(const std::filesystem::path& root);

}  // namespace synthgrid::testing
