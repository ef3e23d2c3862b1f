#include <random>

#include "doctest.h"
#include "synthgrid/errors.hpp"
#include "synthgrid/io.hpp"
#include "synthgrid/parser.hpp"
#include "synthetic_model.hpp"

using namespace synthgrid;
using testing::fixture_path;

namespace {

std::string fixture(const std::string& name) { return read_text_file(fixture_path(name)); }

EnvelopeError::Kind envelope_kind(const std::string& raw) {
  try {
    extract_envelope(raw);
  } catch (const EnvelopeError& e) {
    return e.kind;
  }
  FAIL("no envelope error for: " << raw);
  return EnvelopeError::Kind::Empty;
}

const FamilyStructure kSwedenFamily{"Sweden", "Single-Parent Family", {"Mother", "Son"}};

}  // namespace

TEST_CASE("envelope") {
  CHECK(extract_envelope("thinking... $$MESSAGE_START$$ body $$MESSAGE_END$$ bye").inner_text == "body");
  CHECK(extract_envelope("'$$MESSAGE_START$$\\nA\\n$$MESSAGE_END$$'").inner_text == "A");
  // first start, then the next end
  CHECK(extract_envelope("$$MESSAGE_START$$a$$MESSAGE_END$$b$$MESSAGE_END$$").inner_text == "a");

  CHECK(envelope_kind("no markers") == EnvelopeError::Kind::MissingStart);
  CHECK(envelope_kind("$$MESSAGE_START$$ half") == EnvelopeError::Kind::MissingEnd);
  CHECK(envelope_kind("$$MESSAGE_END$$ x $$MESSAGE_START$$") == EnvelopeError::Kind::EndBeforeStart);
  CHECK(envelope_kind("$$MESSAGE_START$$  \\n $$MESSAGE_END$$") == EnvelopeError::Kind::Empty);
  CHECK_THROWS_AS(extract_envelope(""), OutputError);
}

TEST_CASE("family sample") {
  const auto fams = parse_family_structures(extract_envelope(fixture("samples/family_sample_closed.txt")), "USA", 3);
  REQUIRE(fams.size() == 3);
  CHECK(fams[0] == FamilyStructure{"USA", "Nuclear Family", {"Father", "Mother", "Son", "Daughter"}});
  CHECK(fams[1].members == std::vector<std::string>{"Mother", "Son", "Daughter"});
  CHECK(fams[2].members.size() == 5);
  CHECK(fams[2].members[1] == "Step-Mother");

  CHECK_THROWS_AS(parse_family_structures(extract_envelope(fixture("samples/family_sample_closed.txt")), "USA", 5),
                  ContentError);
  CHECK_THROWS_AS(parse_family_structures(extract_envelope(fixture("samples/family_sample_closed.txt")), "Japan", 3),
                  ContentError);
}

TEST_CASE("family content rules") {
  const auto one = [](const std::string& families) {
    return "$$MESSAGE_START$$[{\"Country\":\"India\",\"Families\":" + families + "}]$$MESSAGE_END$$";
  };
  CHECK_THROWS_AS(parse_family_structures(extract_envelope(one(R"([{"Family Type":"A","Members":["X"]},{"Family Type":"A","Members":["Y"]}])")), "India", 2),
                  ContentError);
  CHECK_THROWS_AS(parse_family_structures(extract_envelope(one(R"([{"Family Type":"A","Members":[]}])")), "India", 1),
                  ContentError);
  CHECK_THROWS_AS(parse_family_structures(extract_envelope(one(R"([{"Family Type":"A","Members":["X","X"]}])")), "India", 1),
                  ContentError);
  CHECK_THROWS_AS(parse_family_structures(extract_envelope("$$MESSAGE_START$$[{]$$MESSAGE_END$$"), "India", 1),
                  ParseError);
  const auto fam = parse_family_structures(extract_envelope(one(R"([{"Family Type":"Joint \"Family\"","Members":["Grand*father"]}])")), "India", 1);
  CHECK(fam[0].family_type == "Joint Family");
  CHECK(fam[0].members[0] == "Grand-father");
  CHECK(sanitize_label("a{b}&c'd\\e") == "a-b-cde");
  CHECK(sanitize_label(" *Aunt* ") == "Aunt");
}

TEST_CASE("ranges sample") {
  const auto r = parse_weather_ranges(extract_envelope(fixture("samples/ranges_sample.txt")), "USA");
  CHECK(r.at(WeatherParam::Temperature, Season::Winter).min.value == -20);
  CHECK(r.at(WeatherParam::Temperature, Season::Winter).max.value == 10);
  CHECK(r.at(WeatherParam::SolRadDirect, Season::Summer).max.value == 700);
  CHECK(r.at(WeatherParam::WindSpeed, Season::Spring).max.value == 18);

  CHECK_THROWS_AS(parse_weather_ranges(extract_envelope(
                      "$$MESSAGE_START$$#Temperature#[(Winter,10,-20),(Spring,-5,25),(Summer,15,35),(Autumn,0,20)]"
                      "#Humidity#[(Winter,30,70),(Spring,40,80),(Summer,50,90),(Autumn,40,80)]"
                      "#SolRad-Diffuse#[(Winter,50,150),(Spring,100,250),(Summer,150,350),(Autumn,100,250)]"
                      "#SolRad-Direct#[(Winter,100,300),(Spring,200,500),(Summer,300,700),(Autumn,200,500)]"
                      "#Wind-Speed#[(Winter,0,15),(Spring,2,18),(Summer,2,15),(Autumn,2,18)]$$MESSAGE_END$$"),
                                       "USA"),
                  RangeError);
  CHECK_THROWS_AS(parse_weather_ranges(extract_envelope("$$MESSAGE_START$$#Temperature#[(Winter,1,2)]$$MESSAGE_END$$"), "USA"),
                  ParseError);
}

TEST_CASE("hourly sample") {
  const auto d = parse_hourly_weather(extract_envelope(fixture("samples/hourly_sample.txt")), "USA", Season::Winter);
  CHECK(d.value(WeatherParam::Temperature, 0) == -5.0);
  CHECK(d.at(WeatherParam::Temperature, 0).label == "Cold-clear");
  CHECK(d.at(WeatherParam::Temperature, 0).value.literal == "-5.0");
  CHECK(d.season == Season::Winter);

  // drop one tuple from the first section
  auto text = extract_envelope(fixture("samples/hourly_sample.txt")).inner_text;
  const auto first = text.find("(23,");
  REQUIRE(first != std::string::npos);
  const auto close = text.find(')', first);
  auto cut = text;
  cut.erase(first, close - first + 1);
  CHECK_THROWS_AS(parse_hourly_weather(Envelope{cut}, "USA", Season::Winter), OutputError);

  auto dup = text;
  dup.replace(first, 3, "(22");
  CHECK_THROWS_AS(parse_hourly_weather(Envelope{dup}, "USA", Season::Winter), ShapeError);
}

TEST_CASE("consumption sample") {
  const FamilyStructure fam{"USA", "Nuclear Family", {"Father", "Mother", "Son", "Daughter"}};
  const auto p = parse_consumption(extract_envelope(fixture("samples/consumption_sample.txt")), fam, Season::Winter,
                                   DayType::Weekday);
  REQUIRE(p.members.size() == 4);
  CHECK(p.members[0].hours[8] == Activity{"Commuting", KilowattHours::parse("0")});
  CHECK(p.members[0].hours[12].action == "Lunch-break");
  CHECK(p.members[0].hours[12].kwh == KilowattHours::parse("0.2"));
  CHECK(p.members[2].hours[8].action == "Commuting-to-school");
  CHECK(p.members[3].hours[8].kwh == KilowattHours::parse("0"));
  CHECK(p.totals_consistent());

  const FamilyStructure other{"USA", "Nuclear Family", {"Father", "Mother", "Son", "Grandmother"}};
  try {
    parse_consumption(extract_envelope(fixture("samples/consumption_sample.txt")), other, Season::Winter,
                      DayType::Weekday);
    FAIL("expected MemberMismatch");
  } catch (const MemberMismatch& e) {
    CHECK(e.missing == std::vector<std::string>{"Grandmother"});
    CHECK(e.extra == std::vector<std::string>{"Daughter"});
  }
}

TEST_CASE("consumption errors") {
  auto text = fixture("sweden_winter_weekday.txt");
  const auto parse = [](const std::string& t) {
    return parse_consumption(extract_envelope(t), kSwedenFamily, Season::Winter, DayType::Weekday);
  };
  auto neg = text;
  neg.replace(neg.find("(0,Sleeping,0.02)"), 17, "(0,Sleeping,-0.02)");
  CHECK_THROWS_AS(parse(neg), ValueError);

  auto no_hvac = text.substr(0, text.find(">>>HVAC>>>")) + "$$MESSAGE_END$$";
  CHECK_THROWS_AS(parse(no_hvac), OutputError);

  auto no_cooling = text.substr(0, text.find("#Cooling#")) + "$$MESSAGE_END$$";
  CHECK_THROWS_AS(parse(no_cooling), OutputError);

  auto reordered = text;
  reordered.replace(reordered.find("(0,Sleeping,0.02),(1,Sleeping,0.02)"), 35, "(1,Sleeping,0.02),(0,Sleeping,0.02)");
  CHECK_THROWS_AS(parse(reordered), ShapeError);
}

TEST_CASE("sweden weekday totals match the printed totals") {
  const auto p = parse_consumption(extract_envelope(fixture("sweden_winter_weekday.txt")), kSwedenFamily,
                                   Season::Winter, DayType::Weekday);
  CHECK(p.totals_consistent());
  const auto lines = read_lines(fixture_path("sweden_winter_weekday_totals.csv"));
  REQUIRE(lines.size() == 25);
  for (std::size_t h = 0; h < kHoursPerDay; ++h) {
    const auto cells = split_csv_line(lines[h + 1]);
    REQUIRE(cells.size() == 2);
    CHECK(std::stoul(cells[0]) == h);
    // independent sum over the parsed cells
    KilowattHours sum;
    for (const auto& m : p.members) sum = sum + m.hours[h].kwh;
    sum = sum + p.heating[h].kwh + p.cooling[h].kwh;
    CHECK(sum == KilowattHours::parse(cells[1]));
    CHECK(p.totals[h] == sum);
  }
}

TEST_CASE("serializers round-trip") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> micro(0, 3'000'000);

  const FamilyStructure fam{"Japan", "Extended Family", {"Grand Father", "Mother", "Son"}};
  for (int trial = 0; trial < 20; ++trial) {
    DailyConsumptionProfile p;
    p.country = fam.country;
    p.family_type = fam.family_type;
    p.season = Season::Autumn;
    p.day_type = DayType::Weekend;
    for (const auto& m : fam.members) {
      MemberSeries s{m, {}};
      for (std::size_t h = 0; h < kHoursPerDay; ++h) {
        s.hours[h] = {"Act-" + std::to_string(h % 5), KilowattHours::from_micro(micro(rng))};
      }
      p.members.push_back(s);
    }
    for (std::size_t h = 0; h < kHoursPerDay; ++h) {
      p.heating[h] = {"Heat", KilowattHours::from_micro(micro(rng))};
      p.cooling[h] = {"Cool", KilowattHours::from_micro(0)};
    }
    p.recompute_totals();
    const auto back = parse_consumption(extract_envelope(serialize_consumption(p)), fam, p.season, p.day_type);
    CHECK(back == p);
  }

  const auto ranges = testing::SyntheticModel::ranges("Japan");
  CHECK(parse_weather_ranges(extract_envelope(serialize_weather_ranges(ranges)), "Japan") == ranges);

  const auto day = testing::SyntheticModel::day("Japan", Season::Summer);
  CHECK(parse_hourly_weather(extract_envelope(serialize_hourly_weather(day)), "Japan", Season::Summer) == day);

  const std::vector<FamilyStructure> fams{fam, {"Japan", "Couple", {"Husband", "Wife"}}};
  CHECK(parse_family_structures(extract_envelope(serialize_family_structures("Japan", fams)), "Japan", 2) == fams);
}
