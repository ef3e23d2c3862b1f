#include "synthgrid/parser.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>

#include "json.hpp"
#include "synthgrid/config.hpp"
#include "synthgrid/errors.hpp"

namespace synthgrid {
using nlohmann::json;

void DailyConsumptionProfile::recompute_totals() {
  for (std::size_t h = 0; h < kHoursPerDay; ++h) {
    KilowattHours sum = heating[h].kwh + cooling[h].kwh;
    for (const auto& m : members) sum += m.hours[h].kwh;
    totals[h] = sum;
  }
}

bool DailyConsumptionProfile::totals_consistent() const {
  DailyConsumptionProfile copy = *this;
  copy.recompute_totals();
  return copy.totals == totals;
}

namespace {

// ---- envelope ----------------------------------------------------------------

bool strip_edge_escape(std::string_view& s, bool front) {
  static constexpr std::string_view kEscapes[] = {"\\n", "\\t", "\\r"};
  for (auto esc : kEscapes) {
    if (front && s.substr(0, 2) == esc) {
      s.remove_prefix(2);
      return true;
    }
    if (!front && s.size() >= 2 && s.substr(s.size() - 2) == esc) {
      s.remove_suffix(2);
      return true;
    }
  }
  if (front && !s.empty() && s.front() == '\\') {
    s.remove_prefix(1);
    return true;
  }
  if (!front && !s.empty() && s.back() == '\\') {
    s.remove_suffix(1);
    return true;
  }
  return false;
}

std::string_view trim_envelope(std::string_view s) {
  while (true) {
    const auto before = s.size();
    s = trim(s);
    while (strip_edge_escape(s, true)) {
    }
    while (strip_edge_escape(s, false)) {
    }
    if (s.size() == before) return s;
  }
}

// ---- tuple grammar ---------------------------------------------------------------

struct Section {
  std::string name;
  std::vector<std::vector<std::string>> tuples;
};

/// Literal "\n", "\t", "\r" escapes and backslash-newline continuations are
/// separators, same as real whitespace.
std::string normalize_separators(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\\' && i + 1 < text.size()) {
      const char next = text[i + 1];
      if (next == 'n' || next == 't' || next == 'r' || next == '\n') {
        out.push_back(' ');
        ++i;
        continue;
      }
    }
    out.push_back(text[i]);
  }
  return out;
}

bool is_ws(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string excerpt(std::string_view text, std::size_t pos) {
  auto s = text.substr(pos, 24);
  std::string out;
  for (char c : s) out.push_back(std::isprint(static_cast<unsigned char>(c)) ? c : '?');
  return "'" + out + "'";
}

std::vector<Section> parse_sections(std::string_view text) {
  std::vector<Section> sections;
  std::size_t pos = 0;
  const auto skip_ws = [&] {
    while (pos < text.size() && is_ws(text[pos])) ++pos;
  };
  while (true) {
    skip_ws();
    if (pos >= text.size()) break;
    if (text[pos] != '#') throw ParseError("expected '#Section#' at " + excerpt(text, pos));
    const auto name_end = text.find('#', pos + 1);
    if (name_end == std::string_view::npos) throw ParseError("unterminated section name at " + excerpt(text, pos));
    Section sec;
    sec.name = std::string(trim(text.substr(pos + 1, name_end - pos - 1)));
    if (sec.name.empty() || sec.name.find_first_of("[]()>") != std::string::npos) {
      throw ParseError("bad section name at " + excerpt(text, pos));
    }
    pos = name_end + 1;
    skip_ws();
    if (pos >= text.size() || text[pos] != '[') throw ParseError("section " + sec.name + " has no '[' list");
    ++pos;
    while (true) {
      while (pos < text.size() && (is_ws(text[pos]) || text[pos] == ',')) ++pos;
      if (pos >= text.size()) throw ParseError("section " + sec.name + " is not closed with ']'");
      if (text[pos] == ']') {
        ++pos;
        break;
      }
      if (text[pos] != '(') throw ParseError("unexpected " + excerpt(text, pos) + " in section " + sec.name);
      const auto close = text.find_first_of("()[]#", pos + 1);
      if (close == std::string_view::npos || text[close] != ')') {
        throw ParseError("malformed tuple in section " + sec.name + " at " + excerpt(text, pos));
      }
      std::vector<std::string> fields;
      for (auto& f : split(text.substr(pos + 1, close - pos - 1), ',')) fields.emplace_back(trim(f));
      sec.tuples.push_back(std::move(fields));
      pos = close + 1;
    }
    sections.push_back(std::move(sec));
  }
  return sections;
}

void check_label(std::string_view label, const std::string& context) {
  if (label.empty()) throw ParseError("empty label in " + context);
  for (char c : label) {
    const auto u = static_cast<unsigned char>(c);
    if (u < 0x20 || u == 0x7f || c == '\'' || c == '"' || c == '{' || c == '}' || c == '&' || c == '*' ||
        c == '\\') {
      throw ParseError("forbidden character in label '" + std::string(label) + "' in " + context);
    }
  }
}

void expect_arity(const std::vector<std::string>& tuple, std::size_t n, const std::string& context) {
  if (tuple.size() != n) {
    throw ParseError("tuple in " + context + " has " + std::to_string(tuple.size()) + " fields, expected " +
                     std::to_string(n));
  }
}

/// Checks the hour column of a 24-tuple series and returns tuples in hour order.
void check_hours(const Section& sec, const std::string& series_name) {
  std::set<int> seen;
  std::vector<int> hours;
  for (const auto& t : sec.tuples) {
    expect_arity(t, 3, series_name);
    const int h = parse_int(t[0]);
    if (h < 0 || h > 23) throw ShapeError(series_name, sec.tuples.size(), "hour " + std::to_string(h) + " out of range");
    if (!seen.insert(h).second) throw ShapeError(series_name, sec.tuples.size(), "duplicate hour " + std::to_string(h));
    hours.push_back(h);
  }
  if (sec.tuples.size() != kHoursPerDay) throw ShapeError(series_name, sec.tuples.size());
  for (std::size_t i = 0; i < hours.size(); ++i) {
    if (hours[i] != static_cast<int>(i)) throw ShapeError(series_name, sec.tuples.size(), "hours not ascending");
  }
}

DailySeries parse_activity_series(const Section& sec, const std::string& series_name) {
  for (const auto& t : sec.tuples) {
    expect_arity(t, 3, series_name);
    check_label(t[1], series_name);
  }
  check_hours(sec, series_name);
  DailySeries out;
  for (std::size_t h = 0; h < kHoursPerDay; ++h) {
    const auto kwh = KilowattHours::parse(sec.tuples[h][2]);
    if (kwh < KilowattHours{}) {
      throw ValueError("negative consumption " + sec.tuples[h][2] + " for " + series_name + " at hour " +
                       std::to_string(h));
    }
    out[h] = {sec.tuples[h][1], kwh};
  }
  return out;
}

std::string country_key(std::string_view name) {
  try {
    return canonical_country(name, builtin_capitals());
  } catch (const ConfigError&) {
    return to_lower(trim(name));
  }
}

std::string json_string(const json& v, const char* what) {
  if (!v.is_string()) throw ParseError(std::string(what) + " must be a string");
  return v.get<std::string>();
}

}  // namespace

// ---- public ---------------------------------------------------------------------

Envelope extract_envelope(std::string_view raw) {
  const auto start = raw.find(kMessageStart);
  if (start == std::string_view::npos) {
    throw EnvelopeError(EnvelopeError::Kind::MissingStart, "response has no " + std::string(kMessageStart));
  }
  const auto body_start = start + kMessageStart.size();
  const auto end = raw.find(kMessageEnd, body_start);
  if (end == std::string_view::npos) {
    if (raw.substr(0, start).find(kMessageEnd) != std::string_view::npos) {
      throw EnvelopeError(EnvelopeError::Kind::EndBeforeStart, "end delimiter precedes start delimiter");
    }
    throw EnvelopeError(EnvelopeError::Kind::MissingEnd, "response has no " + std::string(kMessageEnd));
  }
  const auto inner = trim_envelope(raw.substr(body_start, end - body_start));
  if (inner.empty()) throw EnvelopeError(EnvelopeError::Kind::Empty, "envelope is empty");
  return {std::string(inner)};
}

std::string sanitize_label(std::string_view label) {
  std::string out;
  for (char c : trim(label)) {
    if (c == '\'' || c == '"' || c == '\\') continue;
    const bool bad = c == '{' || c == '}' || c == '&' || c == '*' || c == '\n' || c == '\t' || c == '\r' ||
                     c == '#' || c == '[' || c == ']' || c == '(' || c == ')' || c == ',';
    out.push_back(bad ? '-' : c);
  }
  // collapse runs of hyphens introduced above
  std::string collapsed;
  for (char c : out) {
    if (c == '-' && !collapsed.empty() && collapsed.back() == '-') continue;
    collapsed.push_back(c);
  }
  std::string_view v = trim(collapsed);
  while (!v.empty() && v.front() == '-') v.remove_prefix(1);
  while (!v.empty() && v.back() == '-') v.remove_suffix(1);
  return std::string(trim(v));
}

std::vector<FamilyStructure> parse_family_structures(const Envelope& env, std::string_view expected_country,
                                                     std::size_t expected_count) {
  json doc;
  try {
    doc = json::parse(env.inner_text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("family JSON: ") + e.what());
  }
  if (doc.is_object()) doc = json::array({doc});
  if (!doc.is_array()) throw ParseError("family JSON must be an array");

  const auto want = country_key(expected_country);
  const json* entry = nullptr;
  std::vector<std::string> seen_countries;
  for (const auto& item : doc) {
    if (!item.is_object() || !item.contains("Country")) throw ParseError("country entry without \"Country\"");
    const auto name = json_string(item.at("Country"), "Country");
    seen_countries.push_back(name);
    if (country_key(name) == want) {
      if (entry != nullptr) throw ContentError("country " + name + " listed twice");
      entry = &item;
    }
  }
  if (entry == nullptr) {
    std::string got;
    for (const auto& c : seen_countries) got += (got.empty() ? "" : ", ") + c;
    throw ContentError("expected families for " + std::string(expected_country) + ", got: " + got);
  }
  if (!entry->contains("Families") || !entry->at("Families").is_array()) {
    throw ParseError("\"Families\" must be an array");
  }

  std::vector<FamilyStructure> out;
  std::set<std::string> types;
  for (const auto& fam : entry->at("Families")) {
    if (!fam.is_object() || !fam.contains("Family Type") || !fam.contains("Members")) {
      throw ParseError("family entry needs \"Family Type\" and \"Members\"");
    }
    FamilyStructure fs;
    fs.country = std::string(expected_country);
    fs.family_type = sanitize_label(json_string(fam.at("Family Type"), "Family Type"));
    if (fs.family_type.empty()) throw ContentError("empty family type");
    if (!types.insert(to_lower(fs.family_type)).second) {
      throw ContentError("duplicate family type '" + fs.family_type + "'");
    }
    if (!fam.at("Members").is_array()) throw ParseError("\"Members\" must be an array");
    std::set<std::string> member_keys;
    for (const auto& m : fam.at("Members")) {
      auto label = sanitize_label(json_string(m, "member"));
      if (label.empty()) throw ContentError("empty member label in " + fs.family_type);
      if (!member_keys.insert(hyphenate(label)).second) {
        throw ContentError("duplicate member '" + label + "' in " + fs.family_type);
      }
      fs.members.push_back(std::move(label));
    }
    if (fs.members.empty()) throw ContentError("family " + fs.family_type + " has no members");
    out.push_back(std::move(fs));
  }
  if (out.size() != expected_count) {
    throw ContentError("expected " + std::to_string(expected_count) + " families, got " + std::to_string(out.size()));
  }
  return out;
}

SeasonalWeatherRanges parse_weather_ranges(const Envelope& env, std::string_view country) {
  const auto sections = parse_sections(normalize_separators(env.inner_text));
  SeasonalWeatherRanges out;
  out.country = std::string(country);
  std::set<WeatherParam> seen_params;
  for (const auto& sec : sections) {
    const WeatherParam param = parse_weather_param(sec.name);
    if (!seen_params.insert(param).second) throw ParseError("duplicate section #" + sec.name + "#");
    std::set<Season> seen_seasons;
    for (const auto& t : sec.tuples) {
      expect_arity(t, 3, sec.name);
      const Season season = parse_season(t[0]);
      if (!seen_seasons.insert(season).second) {
        throw ParseError("season " + std::string(to_string(season)) + " repeated in " + sec.name);
      }
      Range r{parse_decimal(t[1]), parse_decimal(t[2])};
      if (r.min.value > r.max.value) throw RangeError(sec.name, std::string(to_string(season)));
      out.at(param, season) = std::move(r);
    }
    if (seen_seasons.size() != kAllSeasons.size()) throw ParseError("section " + sec.name + " misses a season");
  }
  for (WeatherParam p : kAllWeatherParams) {
    if (!seen_params.count(p)) throw ParseError("missing section #" + std::string(to_string(p)) + "#");
  }
  return out;
}

HourlyWeatherDay parse_hourly_weather(const Envelope& env, std::string_view country, Season season) {
  const auto sections = parse_sections(normalize_separators(env.inner_text));
  HourlyWeatherDay day;
  day.country = std::string(country);
  day.season = season;
  std::set<WeatherParam> seen;
  for (const auto& sec : sections) {
    const WeatherParam param = parse_weather_param(sec.name);
    if (!seen.insert(param).second) throw ParseError("duplicate section #" + sec.name + "#");
    for (const auto& t : sec.tuples) {
      expect_arity(t, 3, sec.name);
      check_label(t[1], sec.name);
    }
    check_hours(sec, sec.name);
    for (std::size_t h = 0; h < kHoursPerDay; ++h) {
      day.at(param, h) = {sec.tuples[h][1], parse_decimal(sec.tuples[h][2])};
    }
  }
  for (WeatherParam p : kAllWeatherParams) {
    if (!seen.count(p)) throw ParseError("missing section #" + std::string(to_string(p)) + "#");
  }
  return day;
}

DailyConsumptionProfile parse_consumption(const Envelope& env, const FamilyStructure& family, Season season,
                                          DayType day_type) {
  static constexpr std::string_view kMembers = ">>>MEMBERS>>>";
  static constexpr std::string_view kHvac = ">>>HVAC>>>";
  const std::string text = normalize_separators(env.inner_text);
  const std::string_view body = trim(text);
  if (body.substr(0, kMembers.size()) != kMembers) throw ParseError("consumption output must start with >>>MEMBERS>>>");
  const auto hvac_pos = body.find(kHvac, kMembers.size());
  if (hvac_pos == std::string_view::npos) throw ParseError("consumption output has no >>>HVAC>>> block");
  const auto member_sections = parse_sections(body.substr(kMembers.size(), hvac_pos - kMembers.size()));
  const auto hvac_sections = parse_sections(body.substr(hvac_pos + kHvac.size()));

  // Match response labels onto the family's members.
  std::map<std::string, std::size_t> index_by_key;
  for (std::size_t i = 0; i < family.members.size(); ++i) index_by_key[hyphenate(family.members[i])] = i;
  std::vector<const Section*> by_member(family.members.size(), nullptr);
  std::vector<std::string> extra;
  for (const auto& sec : member_sections) {
    const auto it = index_by_key.find(hyphenate(sec.name));
    if (it == index_by_key.end()) {
      extra.push_back(sec.name);
      continue;
    }
    if (by_member[it->second] != nullptr) throw ParseError("member " + sec.name + " listed twice");
    by_member[it->second] = &sec;
  }
  std::vector<std::string> missing;
  for (std::size_t i = 0; i < family.members.size(); ++i) {
    if (by_member[i] == nullptr) missing.push_back(family.members[i]);
  }
  if (!missing.empty() || !extra.empty()) throw MemberMismatch(std::move(missing), std::move(extra));

  const Section* heating = nullptr;
  const Section* cooling = nullptr;
  for (const auto& sec : hvac_sections) {
    const Section** slot = iequals(sec.name, "Heating") ? &heating : iequals(sec.name, "Cooling") ? &cooling : nullptr;
    if (slot == nullptr) throw ParseError("unexpected HVAC section #" + sec.name + "#");
    if (*slot != nullptr) throw ParseError("HVAC section #" + sec.name + "# listed twice");
    *slot = &sec;
  }
  if (heating == nullptr || cooling == nullptr) throw ParseError("HVAC block needs #Heating# and #Cooling#");

  DailyConsumptionProfile p;
  p.country = family.country;
  p.family_type = family.family_type;
  p.season = season;
  p.day_type = day_type;
  for (std::size_t i = 0; i < family.members.size(); ++i) {
    p.members.push_back({family.members[i], parse_activity_series(*by_member[i], family.members[i])});
  }
  p.heating = parse_activity_series(*heating, "Heating");
  p.cooling = parse_activity_series(*cooling, "Cooling");
  p.recompute_totals();
  return p;
}

// ---- serializers -------------------------------------------------------------------

std::string serialize_family_structures(std::string_view country, const std::vector<FamilyStructure>& families) {
  json fams = json::array();
  for (const auto& f : families) fams.push_back({{"Family Type", f.family_type}, {"Members", f.members}});
  const json doc = json::array({{{"Country", std::string(country)}, {"Families", fams}}});
  return std::string(kMessageStart) + "\n" + doc.dump(4) + "\n" + std::string(kMessageEnd);
}

std::string serialize_weather_ranges(const SeasonalWeatherRanges& ranges) {
  std::string out(kMessageStart);
  for (WeatherParam p : kAllWeatherParams) {
    out += "#" + std::string(to_string(p)) + "#[";
    for (Season s : kAllSeasons) {
      const auto& r = ranges.at(p, s);
      out += (s == Season::Winter ? "(" : ",(") + std::string(to_string(s)) + "," + r.min.text() + "," +
             r.max.text() + ")";
    }
    out += "]";
  }
  return out + std::string(kMessageEnd);
}

std::string serialize_hourly_weather(const HourlyWeatherDay& day) {
  std::string out(kMessageStart);
  for (WeatherParam p : kAllWeatherParams) {
    out += "\n#" + std::string(to_string(p)) + "#[";
    for (std::size_t h = 0; h < kHoursPerDay; ++h) {
      const auto& r = day.at(p, h);
      out += (h ? ", (" : "(") + std::to_string(h) + ", " + r.label + ", " + r.value.text() + ")";
    }
    out += "]";
  }
  return out + "\n" + std::string(kMessageEnd);
}

namespace {

std::string serialize_series(std::string_view name, const DailySeries& s) {
  std::string out = "#" + std::string(name) + "#[";
  for (std::size_t h = 0; h < kHoursPerDay; ++h) {
    out += (h ? ",(" : "(") + std::to_string(h) + "," + s[h].action + "," + s[h].kwh.to_string() + ")";
  }
  return out + "]";
}

}  // namespace

std::string serialize_consumption(const DailyConsumptionProfile& profile) {
  std::string out = std::string(kMessageStart) + ">>>MEMBERS>>>";
  for (const auto& m : profile.members) out += serialize_series(hyphenate(m.member), m.hours);
  out += ">>>HVAC>>>" + serialize_series("Heating", profile.heating) + serialize_series("Cooling", profile.cooling);
  return out + std::string(kMessageEnd);
}

}  // namespace synthgrid
