#include "doctest.h"
#include "synthgrid/errors.hpp"
#include "synthgrid/io.hpp"
#include "synthgrid/quantity.hpp"
#include "synthgrid/types.hpp"
#include "synthetic_model.hpp"

using namespace synthgrid;

TEST_CASE("kWh parsing is exact") {
  CHECK(KilowattHours::parse("0.34").micro() == 340000);
  CHECK(KilowattHours::parse("1").micro() == 1000000);
  CHECK(KilowattHours::parse("-0.5").micro() == -500000);
  CHECK(KilowattHours::parse("0.000001").micro() == 1);
  CHECK_THROWS_AS(KilowattHours::parse("0.0000001"), ParseError);
  CHECK_THROWS_AS(KilowattHours::parse("1e3"), ParseError);
  CHECK_THROWS_AS(KilowattHours::parse(""), ParseError);
  CHECK_THROWS_AS(KilowattHours::parse("abc"), ParseError);
  CHECK_THROWS_AS(KilowattHours::parse("1."), ParseError);
}

TEST_CASE("kWh prints its shortest form") {
  CHECK(KilowattHours::parse("0.340").to_string() == "0.34");
  CHECK(KilowattHours::parse("1.0").to_string() == "1");
  CHECK(KilowattHours::parse("0.02").to_string() == "0.02");
  CHECK(KilowattHours::parse("-1.25").to_string() == "-1.25");
  const auto sum = KilowattHours::parse("0.1") + KilowattHours::parse("0.2");
  CHECK(sum == KilowattHours::parse("0.3"));
}

TEST_CASE("measures keep the written lexeme") {
  const auto m = parse_decimal("-5.0");
  CHECK(m.value == -5.0);
  CHECK(m.text() == "-5.0");
  CHECK(Measure(12.5).text() == "12.5");
  CHECK(Measure(0.0).text() == "0");
  CHECK(parse_decimal("7") == Measure(7.0));
  CHECK_THROWS_AS(parse_decimal("1.2.3"), ParseError);
  CHECK_THROWS_AS(parse_decimal("nan"), ParseError);
  CHECK_THROWS_AS(parse_int("-3"), ParseError);
  CHECK(parse_int("23") == 23);
  CHECK(parse_double("1e2") == 100.0);
  CHECK_THROWS_AS(parse_double("inf"), ParseError);
}

TEST_CASE("enum names parse case-insensitively") {
  CHECK(parse_season("winter") == Season::Winter);
  CHECK(parse_season(" Autumn ") == Season::Autumn);
  CHECK(parse_day_type("WEEKEND") == DayType::Weekend);
  CHECK(parse_weather_param("SolRad-Diffuse") == WeatherParam::SolRadDiffuse);
  CHECK(parse_stage("EnergyPatterns") == StageId::EnergyPatterns);
  CHECK_THROWS_AS(parse_season("Fall"), ParseError);
  CHECK(to_string(WeatherParam::WindSpeed) == "Wind-Speed");
}

TEST_CASE("labels hyphenate and slugify") {
  CHECK(hyphenate("Domestic Worker") == "Domestic-Worker");
  CHECK(hyphenate("  Grand_mother  ") == "Grand-mother");
  CHECK(hyphenate("Nuclear   Family") == "Nuclear-Family");
  CHECK(slugify("Single-Parent Family") == "Single-Parent-Family");
  CHECK(slugify("a/b\\c") .find('/') == std::string::npos);
}

TEST_CASE("CSV fields quote and split back") {
  const std::vector<std::string> fields{"plain", "with,comma", "with \"quote\"", ""};
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) line += (i ? "," : "") + csv_field(fields[i]);
  CHECK(split_csv_line(line) == fields);
}

TEST_CASE("atomic writes create parents and publish_once keeps the first") {
  testing::TempDir dir;
  const auto p = dir.path() / "a" / "b" / "f.txt";
  write_text_file(p, "one");
  CHECK(read_text_file(p) == "one");
  write_text_file(p, "two");
  CHECK(read_text_file(p) == "two");
  const auto q = dir.path() / "once.txt";
  CHECK(publish_once(q, "first"));
  CHECK_FALSE(publish_once(q, "second"));
  CHECK(read_text_file(q) == "first");
  CHECK_THROWS_AS(read_text_file(dir.path() / "missing"), IoError);
}
