#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "synthgrid/analytics.hpp"
#include "synthgrid/config.hpp"
#include "synthgrid/gateway.hpp"

namespace synthgrid {

struct StageReport {
  StageId stage = StageId::FamilyTypes;
  bool skipped = true;
  std::size_t items = 0;
  std::size_t succeeded = 0;
  std::vector<std::string> failures;  // "item: reason", sorted
};

struct RunReport {
  std::array<StageReport, 4> stages{};
  std::size_t yearly_files = 0;
  std::vector<std::string> assembly_failures;
  std::vector<StageSummary> summaries;
  std::size_t output_retries = 0;     // logged attempts beyond the first
  int transport_retries = 0;          // this process only
  std::vector<std::string> warnings;  // this process only, sorted

  const StageReport& stage(StageId s) const { return stages[index_of(s)]; }
  bool complete() const;
  /// 0 when every item succeeded, 2 otherwise.
  int exit_code() const { return complete() ? 0 : 2; }
};

/// Everything optional: absent pieces are built from the config (replay
/// backend + offline transport with fixture_dir, else live HTTP).
struct PipelineDeps {
  Transport* transport = nullptr;
  ChatBackend* backend = nullptr;
  Sleeper sleeper;
  std::function<void(const std::string&)> on_warning;
};

/// Runs every stage up to and including `through`, persisting as it goes and
/// skipping items whose outputs already exist. After a full run the yearly
/// files are assembled too. Item failures are reported, not thrown; IoError
/// and ConfigError abort.
RunReport run_pipeline(const RunConfig& config, StageId through, PipelineDeps deps = {});

/// Builds yearly/<Country>/<family>.csv from stored profiles and weather.
/// Returns the number written; gaps are appended to failures.
std::size_t assemble_years(const RunConfig& config, std::vector<std::string>* failures = nullptr);

/// Re-reads every artifact in a run directory and re-applies the validators.
/// Returns one line per problem (empty = clean).
std::vector<std::string> validate_run_dir(const std::filesystem::path& dir);

std::string run_report_json(const RunReport& report);

/// Calls fn(i) for i in [0, n) on up to `workers` threads.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

}  // namespace synthgrid
