#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "synthgrid/records.hpp"
#include "synthgrid/stage.hpp"

namespace synthgrid {

enum class ActionClass { Sleep, Away, Home };
std::string_view to_string(ActionClass c);

/// Keyword classification of an action label; unknown labels are Home.
ActionClass classify_action(std::string_view label);

/// Away labels that name a school or work obligation.
bool is_obligation(std::string_view label);

struct BehaviorViolation {
  enum class Kind {
    SleepTooLong,
    ActionRepeatTooLong,
    AwayWithConsumption,
    MemberSeriesShape,
    NegativeConsumption,
    WeekendObligation,
    SharedActionValue,
    HvacImplausible,
  };
  Kind kind;
  std::string member;
  int first_hour = 0;  // inclusive; a sleep span may wrap (last_hour < first_hour)
  int last_hour = 0;
  std::string detail;
  Severity severity = Severity::Error;
};

std::string_view to_string(BehaviorViolation::Kind k);
std::string describe(const std::vector<BehaviorViolation>& violations);

inline constexpr int kMaxSleepHours = 8;
inline constexpr int kMaxRepeatHours = 3;
inline constexpr double kHeatingImplausibleAboveC = 28.0;
inline constexpr double kCoolingImplausibleBelowC = 10.0;

/// weather (optional) enables the HVAC plausibility warnings.
std::vector<BehaviorViolation> validate_behavior(const DailyConsumptionProfile& profile, DayType day_type,
                                                 const HourlyWeatherDay* weather = nullptr);

// ---- persistence --------------------------------------------------------------

/// hour,total_kwh,{member}_action,{member}_kwh,...,heating_action,heating_kwh,cooling_action,cooling_kwh
std::string profile_csv(const DailyConsumptionProfile& profile);

/// Reads a profile CSV back for the given family; totals are re-checked
/// against the member and HVAC columns. Throws IoError / ParseError.
DailyConsumptionProfile parse_profile_csv(std::string_view text, const FamilyStructure& family, Season season,
                                          DayType day_type);

std::string family_json(const std::string& country, const std::vector<FamilyStructure>& families);

std::filesystem::path families_path(const std::filesystem::path& out_dir, const std::string& country);
std::filesystem::path profile_path(const std::filesystem::path& out_dir, const FamilyStructure& family, Season season,
                                   DayType day_type);

/// Stored families for a country (families/<Country>.json).
std::vector<FamilyStructure> load_families(const std::filesystem::path& out_dir, const std::string& country);

// ---- stage runners --------------------------------------------------------------

/// Stage 1. The prompt always asks for five family types; the first
/// families_per_country are kept.
std::vector<FamilyStructure> synthesize_families(StageContext& ctx, const std::string& country);

/// Stage 4 for one (family, season, day type).
DailyConsumptionProfile synthesize_consumption(StageContext& ctx, const FamilyStructure& family, Season season,
                                               DayType day_type, const HourlyWeatherDay& weather);

}  // namespace synthgrid
