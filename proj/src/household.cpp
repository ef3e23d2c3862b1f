#include "synthgrid/household.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "json.hpp"
#include "synthgrid/errors.hpp"
#include "synthgrid/io.hpp"
#include "synthgrid/parser.hpp"
#include "synthgrid/prompts.hpp"

namespace synthgrid {

std::string_view to_string(ActionClass c) {
  switch (c) {
    case ActionClass::Sleep: return "Sleep";
    case ActionClass::Away: return "Away";
    case ActionClass::Home: return "Home";
  }
  return "?";
}

std::string_view to_string(BehaviorViolation::Kind k) {
  using K = BehaviorViolation::Kind;
  switch (k) {
    case K::SleepTooLong: return "SleepTooLong";
    case K::ActionRepeatTooLong: return "ActionRepeatTooLong";
    case K::AwayWithConsumption: return "AwayWithConsumption";
    case K::MemberSeriesShape: return "MemberSeriesShape";
    case K::NegativeConsumption: return "NegativeConsumption";
    case K::WeekendObligation: return "WeekendObligation";
    case K::SharedActionValue: return "SharedActionValue";
    case K::HvacImplausible: return "HvacImplausible";
  }
  return "?";
}

std::string describe(const std::vector<BehaviorViolation>& violations) {
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty()) out += "; ";
    out += std::string(to_string(v.kind)) + " " + v.member + "@" + std::to_string(v.first_hour);
    if (v.last_hour != v.first_hour) out += "-" + std::to_string(v.last_hour);
    out += ": " + v.detail;
  }
  return out;
}

namespace {

std::vector<std::string> tokens(std::string_view label) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : label) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

bool starts_with(std::string_view s, std::string_view prefix) { return s.substr(0, prefix.size()) == prefix; }

const std::set<std::string, std::less<>> kAwayLead{"school", "work",  "working",    "office", "outside",
                                                   "away",   "out",   "university", "college"};
const std::set<std::string, std::less<>> kLeadFiller{"at", "in", "to", "going", "go"};
const std::set<std::string, std::less<>> kObligation{"school", "work", "working", "office", "university", "college"};
const std::set<std::string, std::less<>> kInteraction{"with", "help", "helping", "together", "family"};

bool is_interaction(std::string_view label) {
  for (const auto& t : tokens(label)) {
    if (kInteraction.count(t)) return true;
  }
  return false;
}

}  // namespace

ActionClass classify_action(std::string_view label) {
  const auto t = tokens(label);
  bool home = false;
  for (const auto& tok : t) {
    if (starts_with(tok, "sleep") || tok == "asleep") return ActionClass::Sleep;
    home = home || tok == "home";
  }
  for (const auto& tok : t) {
    if (starts_with(tok, "commut")) return ActionClass::Away;
  }
  std::size_t i = 0;
  while (i < t.size() && kLeadFiller.count(t[i])) ++i;
  if (i < t.size() && kAwayLead.count(t[i]) && !home) return ActionClass::Away;
  return ActionClass::Home;
}

bool is_obligation(std::string_view label) {
  if (classify_action(label) != ActionClass::Away) return false;
  for (const auto& tok : tokens(label)) {
    if (kObligation.count(tok)) return true;
  }
  return false;
}

std::vector<BehaviorViolation> validate_behavior(const DailyConsumptionProfile& profile, DayType day_type,
                                                 const HourlyWeatherDay* weather) {
  using K = BehaviorViolation::Kind;
  std::vector<BehaviorViolation> out;
  const KilowattHours zero{};

  std::set<std::string> names;
  for (const auto& m : profile.members) {
    if (!names.insert(hyphenate(m.member)).second) {
      out.push_back({K::MemberSeriesShape, m.member, 0, 23, "member listed twice"});
    }
  }
  if (!profile.totals_consistent()) {
    out.push_back({K::MemberSeriesShape, "Total", 0, 23, "totals differ from member and HVAC sums"});
  }

  const auto check_negative = [&](const std::string& who, const DailySeries& s) {
    for (std::size_t h = 0; h < kHoursPerDay; ++h) {
      if (s[h].kwh < zero) {
        const int hour = static_cast<int>(h);
        out.push_back({K::NegativeConsumption, who, hour, hour, s[h].kwh.to_string() + " kWh"});
      }
    }
  };

  for (const auto& m : profile.members) {
    const auto& s = m.hours;
    check_negative(m.member, s);

    std::array<bool, kHoursPerDay> sleep{};
    for (std::size_t h = 0; h < kHoursPerDay; ++h) sleep[h] = classify_action(s[h].action) == ActionClass::Sleep;
    if (std::all_of(sleep.begin(), sleep.end(), [](bool b) { return b; })) {
      out.push_back({K::SleepTooLong, m.member, 0, 23, "asleep all day"});
    } else {
      // circular runs: start wherever the previous hour is awake
      for (std::size_t start = 0; start < kHoursPerDay; ++start) {
        if (!sleep[start] || sleep[(start + kHoursPerDay - 1) % kHoursPerDay]) continue;
        int len = 0;
        while (sleep[(start + static_cast<std::size_t>(len)) % kHoursPerDay]) ++len;
        if (len > kMaxSleepHours) {
          out.push_back({K::SleepTooLong, m.member, static_cast<int>(start),
                         static_cast<int>((start + static_cast<std::size_t>(len) - 1) % kHoursPerDay),
                         std::to_string(len) + " h of sleep"});
        }
      }
    }

    for (std::size_t h = 0; h < kHoursPerDay;) {
      std::size_t end = h + 1;
      while (end < kHoursPerDay && iequals(s[end].action, s[h].action)) ++end;
      if (!sleep[h] && end - h > static_cast<std::size_t>(kMaxRepeatHours)) {
        out.push_back({K::ActionRepeatTooLong, m.member, static_cast<int>(h), static_cast<int>(end - 1),
                       s[h].action + " for " + std::to_string(end - h) + " h"});
      }
      h = end;
    }

    for (std::size_t h = 0; h < kHoursPerDay; ++h) {
      const int hour = static_cast<int>(h);
      if (classify_action(s[h].action) == ActionClass::Away && s[h].kwh > zero) {
        out.push_back({K::AwayWithConsumption, m.member, hour, hour, s[h].action + " uses " + s[h].kwh.to_string()});
      }
      if (day_type == DayType::Weekend && is_obligation(s[h].action)) {
        out.push_back({K::WeekendObligation, m.member, hour, hour, s[h].action + " on a weekend"});
      }
    }
  }

  for (std::size_t h = 0; h < kHoursPerDay; ++h) {
    for (std::size_t i = 0; i < profile.members.size(); ++i) {
      for (std::size_t j = i + 1; j < profile.members.size(); ++j) {
        const auto& a = profile.members[i].hours[h];
        const auto& b = profile.members[j].hours[h];
        if (iequals(a.action, b.action) && is_interaction(a.action) && a.kwh != b.kwh) {
          const int hour = static_cast<int>(h);
          out.push_back({K::SharedActionValue, profile.members[i].member + "+" + profile.members[j].member, hour, hour,
                         a.action + " " + a.kwh.to_string() + " vs " + b.kwh.to_string(), Severity::Warning});
        }
      }
    }
  }

  check_negative("Heating", profile.heating);
  check_negative("Cooling", profile.cooling);
  if (weather != nullptr) {
    for (std::size_t h = 0; h < kHoursPerDay; ++h) {
      const double t = weather->value(WeatherParam::Temperature, h);
      const int hour = static_cast<int>(h);
      if (profile.heating[h].kwh > zero && t > kHeatingImplausibleAboveC) {
        out.push_back({K::HvacImplausible, "Heating", hour, hour, "heating at " + format_double(t) + " C",
                       Severity::Warning});
      }
      if (profile.cooling[h].kwh > zero && t < kCoolingImplausibleBelowC) {
        out.push_back({K::HvacImplausible, "Cooling", hour, hour, "cooling at " + format_double(t) + " C",
                       Severity::Warning});
      }
    }
  }
  return out;
}

// ---- persistence ---------------------------------------------------------------------

std::string profile_csv(const DailyConsumptionProfile& p) {
  std::string out = "hour,total_kwh";
  for (const auto& m : p.members) {
    const auto name = hyphenate(m.member);
    out += "," + csv_field(name + "_action") + "," + csv_field(name + "_kwh");
  }
  out += ",heating_action,heating_kwh,cooling_action,cooling_kwh\n";
  for (std::size_t h = 0; h < kHoursPerDay; ++h) {
    out += std::to_string(h) + "," + p.totals[h].to_string();
    for (const auto& m : p.members) out += "," + csv_field(m.hours[h].action) + "," + m.hours[h].kwh.to_string();
    out += "," + csv_field(p.heating[h].action) + "," + p.heating[h].kwh.to_string();
    out += "," + csv_field(p.cooling[h].action) + "," + p.cooling[h].kwh.to_string() + "\n";
  }
  return out;
}

DailyConsumptionProfile parse_profile_csv(std::string_view text, const FamilyStructure& family, Season season,
                                          DayType day_type) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& line : split(text, '\n')) {
    if (!trim(line).empty()) rows.push_back(split_csv_line(line));
  }
  if (rows.size() != kHoursPerDay + 1) {
    throw ParseError("profile CSV has " + std::to_string(rows.empty() ? 0 : rows.size() - 1) + " hour rows");
  }
  const auto& header = rows[0];
  const std::size_t width = 2 + 2 * family.members.size() + 4;
  if (header.size() != width || header[0] != "hour" || header[1] != "total_kwh") {
    throw ParseError("profile CSV header does not match the family");
  }
  for (std::size_t i = 0; i < family.members.size(); ++i) {
    if (header[2 + 2 * i] != hyphenate(family.members[i]) + "_action") {
      throw ParseError("profile CSV column " + header[2 + 2 * i] + " does not match member " + family.members[i]);
    }
  }

  DailyConsumptionProfile p;
  p.country = family.country;
  p.family_type = family.family_type;
  p.season = season;
  p.day_type = day_type;
  p.members.resize(family.members.size());
  for (std::size_t i = 0; i < family.members.size(); ++i) p.members[i].member = family.members[i];
  std::array<KilowattHours, kHoursPerDay> stored{};
  for (std::size_t h = 0; h < kHoursPerDay; ++h) {
    const auto& r = rows[h + 1];
    if (r.size() != width) throw ParseError("profile CSV row " + std::to_string(h) + " has the wrong width");
    if (parse_int(r[0]) != static_cast<int>(h)) throw ParseError("profile CSV hours out of order");
    stored[h] = KilowattHours::parse(r[1]);
    for (std::size_t i = 0; i < family.members.size(); ++i) {
      p.members[i].hours[h] = {r[2 + 2 * i], KilowattHours::parse(r[3 + 2 * i])};
    }
    const std::size_t hv = 2 + 2 * family.members.size();
    p.heating[h] = {r[hv], KilowattHours::parse(r[hv + 1])};
    p.cooling[h] = {r[hv + 2], KilowattHours::parse(r[hv + 3])};
  }
  p.recompute_totals();
  if (p.totals != stored) throw IoError("profile CSV totals do not match member and HVAC columns");
  return p;
}

std::string family_json(const std::string& country, const std::vector<FamilyStructure>& families) {
  nlohmann::json fams = nlohmann::json::array();
  for (const auto& f : families) fams.push_back({{"Family Type", f.family_type}, {"Members", f.members}});
  return nlohmann::json::array({{{"Country", country}, {"Families", fams}}}).dump(4) + "\n";
}

std::filesystem::path families_path(const std::filesystem::path& out_dir, const std::string& country) {
  return out_dir / "families" / (slugify(country) + ".json");
}

std::filesystem::path profile_path(const std::filesystem::path& out_dir, const FamilyStructure& family, Season season,
                                   DayType day_type) {
  return out_dir / "profiles" / slugify(family.country) / slugify(family.family_type) /
         (std::string(to_string(season)) + "_" + std::string(to_string(day_type)) + ".csv");
}

std::vector<FamilyStructure> load_families(const std::filesystem::path& out_dir, const std::string& country) {
  const auto path = families_path(out_dir, country);
  const auto text = read_text_file(path);
  // count is whatever was stored
  const auto doc = nlohmann::json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_array() || doc.empty() || !doc[0].contains("Families")) {
    throw ParseError("malformed family file " + path.string());
  }
  return parse_family_structures(Envelope{text}, country, doc[0]["Families"].size());
}

// ---- stage runners -----------------------------------------------------------------

std::vector<FamilyStructure> synthesize_families(StageContext& ctx, const std::string& country) {
  const auto path = families_path(ctx.out_dir(), country);
  if (std::filesystem::exists(path)) return load_families(ctx.out_dir(), country);

  const auto messages = single_turn(StageId::FamilyTypes, family_bindings(country));
  auto families = run_with_retries(ctx, messages, StageId::FamilyTypes, country, [&](const std::string& raw) {
    return parse_family_structures(extract_envelope(raw), country, 5);
  });
  families.resize(static_cast<std::size_t>(ctx.config.families_per_country));
  write_text_file(path, family_json(country, families));
  return families;
}

DailyConsumptionProfile synthesize_consumption(StageContext& ctx, const FamilyStructure& family, Season season,
                                               DayType day_type, const HourlyWeatherDay& weather) {
  const auto path = profile_path(ctx.out_dir(), family, season, day_type);
  if (std::filesystem::exists(path)) return parse_profile_csv(read_text_file(path), family, season, day_type);

  const std::string item = family.country + "/" + family.family_type + "/" + std::string(to_string(season)) + "/" +
                           std::string(to_string(day_type));
  const auto messages =
      single_turn(StageId::EnergyPatterns, consumption_bindings(family, ctx.config.year, season, day_type, weather));
  auto profile = run_with_retries(ctx, messages, StageId::EnergyPatterns, item, [&](const std::string& raw) {
    auto p = parse_consumption(extract_envelope(raw), family, season, day_type);
    const auto v = validate_behavior(p, day_type, &weather);
    if (has_errors(v)) throw ValidationRejected(describe(v));
    if (!v.empty()) ctx.warn(item + ": " + describe(v));
    return p;
  });
  write_text_file(path, profile_csv(profile));
  return profile;
}

}  // namespace synthgrid
