#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "synthgrid/calendar.hpp"
#include "synthgrid/gateway.hpp"
#include "synthgrid/records.hpp"

namespace synthgrid {

struct SignaturePoint {
  double temp_c = 0;
  double kwh = 0;
};

struct SignatureBin {
  double center = 0;
  double mean = 0;
  std::size_t count = 0;
};

struct EnergySignature {
  std::string family_id;
  std::vector<SignaturePoint> points;
  std::vector<SignatureBin> bins;  // ascending centers
  /// OLS slope of kWh on temperature below balance_point; empty when fewer
  /// than two distinct temperatures lie below it.
  std::optional<double> cold_slope;
  double balance_point = 18.0;
  double bin_width = 1.0;
};

/// Bin index of a temperature: bins are centred on multiples of width.
long bin_index(double temp_c, double width);

std::optional<double> ols_slope(const std::vector<SignaturePoint>& points);

EnergySignature compute_signature(std::vector<SignaturePoint> points, double balance_point = 18.0,
                                  double bin_width = 1.0, std::string family_id = {});

/// Hourly (outdoor temperature, total kWh) pairs of a yearly profile.
EnergySignature compute_signature(const YearlyProfile& yearly, double balance_point = 18.0, double bin_width = 1.0);

struct BinDifference {
  double center = 0;
  double mean_a = 0;
  double mean_b = 0;
  double difference = 0;  // a - b
};

struct SignatureComparison {
  std::vector<BinDifference> aligned;
  std::vector<double> only_in_a;
  std::vector<double> only_in_b;
  std::optional<double> slope_difference;  // a - b
};

/// Throws ComparisonError when the bin widths differ.
SignatureComparison compare_signatures(const EnergySignature& a, const EnergySignature& b);

/// Generic `timestamp,temp_c,total_kwh` reference data. Throws ParseError.
std::vector<SignaturePoint> parse_reference_csv(std::string_view text);

std::string signature_json(const EnergySignature& sig);
std::string comparison_json(const SignatureComparison& cmp);

struct StageSummary {
  StageId stage = StageId::FamilyTypes;
  std::size_t n_responses = 0;
  std::chrono::milliseconds avg_time{0};
  std::chrono::milliseconds total_duration{0};
  std::int64_t total_prompt_tokens = 0;
  std::int64_t total_completion_tokens = 0;
};

/// One summary per stage present in the log, in stage order.
std::vector<StageSummary> summarize_run(const std::vector<LoggedExchange>& log);

/// H:MM:SS, truncated to whole seconds.
std::string format_duration(std::chrono::milliseconds d);

/// Plain-text table in the shape of the run summary tables.
std::string summary_table(const std::vector<StageSummary>& summaries);

/// Long-format `series,x,y` CSV. Throws IoError.
void emit_plot_data(const DailyConsumptionProfile& profile, const std::filesystem::path& path);
void emit_plot_data(const EnergySignature& sig, const std::filesystem::path& path);

std::string plot_csv(const DailyConsumptionProfile& profile);
std::string plot_csv(const EnergySignature& sig);

}  // namespace synthgrid
