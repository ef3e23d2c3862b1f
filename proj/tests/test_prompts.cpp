#include "doctest.h"
#include "synthgrid/errors.hpp"
#include "synthgrid/gateway.hpp"
#include "synthgrid/io.hpp"
#include "synthgrid/parser.hpp"
#include "synthgrid/prompts.hpp"
#include "synthetic_model.hpp"

using namespace synthgrid;

TEST_CASE("shipped templates are pinned") {
  const std::vector<std::tuple<StageId, Role, const char*, std::size_t>> pinned{
      {StageId::FamilyTypes, Role::System, "7686b61a1fd03cd4de869c1f079204701d1a1d40d2719f650883ee216e5d9fb3", 2001},
      {StageId::FamilyTypes, Role::User, "145ea8f500a5c3da2338fdbd3d37c50eb5d6ee892fe7dc20e735b045b69b5654", 273},
      {StageId::WeatherRanges, Role::System, "93d11122bbc38e7db4c3ed9dd7e2e2667ef5f5a02b67b11e402b142663b017de", 3197},
      {StageId::WeatherRanges, Role::User, "05652b48e1913e307206b1ec177770d065f21f4b236992201b928040bdba5cb0", 256},
      {StageId::WeatherData, Role::System, "71cf5012978bd4b76ccd5bb1dba8d56b078aad79b176a1d02b3512946115732a", 3548},
      {StageId::WeatherData, Role::User, "f3d4624725ad9bb943cb60fe84804530f45f5a0a30c095676b60eb564f77ce5f", 1164},
      {StageId::EnergyPatterns, Role::System, "bea4ed194656816eed39822e5059a16426d0a1287887cda844ae45046a3c81dc", 6191},
      {StageId::EnergyPatterns, Role::User, "0546c2510863ed15dfe857bc7dd0034e847835835d75692acc327f197efcfae2", 840},
  };
  for (const auto& [stage, role, sha, size] : pinned) {
    const auto& t = prompt_template(stage, role);
    CAPTURE(to_string(stage));
    CAPTURE(to_string(role));
    CHECK(t.body.size() == size);
    CHECK(sha256_hex(t.body) == sha);
  }
  CHECK(all_prompt_templates().size() == 8);
}

TEST_CASE("placeholder sets") {
  CHECK(prompt_template(StageId::FamilyTypes, Role::User).placeholders == std::set<std::string>{"COUNTRY"});
  CHECK(prompt_template(StageId::WeatherRanges, Role::User).placeholders == std::set<std::string>{"Country", "Year"});
  CHECK(prompt_template(StageId::EnergyPatterns, Role::User).placeholders ==
        std::set<std::string>{"Country", "Year", "Pattern", "Season", "FamilyType", "Members", "MembersNum", "Hour",
                              "Temperature", "Humidity", "SolarRadiationDirect", "SolarRadiationDiffuse",
                              "WindSpeed"});
  CHECK(prompt_template(StageId::WeatherData, Role::User).placeholders.count("SolRad-Diffuse_Min") == 1);
  for (StageId s : kAllStages) CHECK(prompt_template(s, Role::System).placeholders.empty());
  CHECK(placeholders_in("$$MESSAGE_START$$ then $Name$ and $$MESSAGE_END$$") == std::set<std::string>{"Name"});
}

TEST_CASE("render substitutes literally and drops brackets") {
  const auto msg = render(prompt_template(StageId::WeatherRanges, Role::User), range_bindings("Sweden", 2024));
  CHECK(msg.role == Role::User);
  CHECK(msg.content.rfind("For the country of Sweden and in the year of 2024,", 0) == 0);
  CHECK(msg.content.find('$') == std::string::npos);
  CHECK(msg.content.find("[Sweden]") == std::string::npos);

  const auto fam = render(prompt_template(StageId::FamilyTypes, Role::User), family_bindings("Japan"));
  CHECK(fam.content.find("following country: Japan.") != std::string::npos);
  CHECK(fam.content.find("$$MESSAGE_START$$") != std::string::npos);

  // values that look like placeholders are not expanded again
  const auto tricky = render(prompt_template(StageId::FamilyTypes, Role::User), {{"COUNTRY", "$COUNTRY$"}});
  CHECK(tricky.content.find("following country: $COUNTRY$.") != std::string::npos);
}

TEST_CASE("missing and unused bindings") {
  const auto& t = prompt_template(StageId::WeatherRanges, Role::User);
  CHECK_THROWS_AS(render(t, {{"Country", "USA"}}), MissingPlaceholder);
  try {
    render(t, {{"Country", "USA"}});
  } catch (const MissingPlaceholder& e) {
    CHECK(e.name == "Year");
  }
  Bindings extra = range_bindings("USA", 2024);
  extra["Colour"] = "blue";
  CHECK(unused_bindings(t, extra) == std::vector<std::string>{"Colour"});
}

TEST_CASE("stage-4 weather arrays keep the model's numbers") {
  const auto raw = read_text_file(testing::fixture_path("samples/hourly_sample.txt"));
  const auto day = parse_hourly_weather(extract_envelope(raw), "USA", Season::Winter);
  const auto b = bind_stage4_weather(day);
  CHECK(b.at("Temperature").rfind("-5.0,-4.5,-4.0,", 0) == 0);
  CHECK(b.at("Hour") == "0,1,2,3,4,5,6,7,8,9,10,11,12,13,14,15,16,17,18,19,20,21,22,23");

  HourlyWeatherDay computed;
  for (WeatherParam p : kAllWeatherParams) {
    for (std::size_t h = 0; h < kHoursPerDay; ++h) computed.at(p, h) = {"x", Measure(static_cast<double>(h))};
  }
  CHECK(bind_stage4_weather(computed).at("WindSpeed") == "0,1,2,3,4,5,6,7,8,9,10,11,12,13,14,15,16,17,18,19,20,21,22,23");

  std::map<WeatherParam, std::vector<Measure>> short_day;
  for (WeatherParam p : kAllWeatherParams) short_day[p] = std::vector<Measure>(24, Measure(1.0));
  short_day[WeatherParam::Humidity].pop_back();
  CHECK_THROWS_AS(bind_stage4_weather(short_day), ShapeError);
}

TEST_CASE("consumption prompt binds the family") {
  const FamilyStructure fam{"USA", "Nuclear Family", {"Father", "Mother", "Son", "Daughter"}};
  const auto day = testing::SyntheticModel::day("USA", Season::Winter);
  const auto msgs = single_turn(StageId::EnergyPatterns, consumption_bindings(fam, 2024, Season::Winter, DayType::Weekday, day));
  REQUIRE(msgs.size() == 2);
  CHECK(msgs[0].role == Role::System);
  CHECK(msgs[0].content == prompt_template(StageId::EnergyPatterns, Role::System).body);
  const auto& u = msgs[1].content;
  CHECK(u.find("For a family in USA in the year of 2024") != std::string::npos);
  CHECK(u.find("pattern in the Weekday considering the season is Winter.") != std::string::npos);
  CHECK(u.find("members: Father, Mother, Son, Daughter total of 4.") != std::string::npos);
  CHECK(placeholders_in(u).empty());
}

TEST_CASE("stage-3 conversations chain seasons in order") {
  const std::vector<Season> seasons(kAllSeasons.begin(), kAllSeasons.end());
  const auto ranges = testing::SyntheticModel::ranges("Japan");
  const auto user = [&](Season s) {
    return render(prompt_template(StageId::WeatherData, Role::User), hourly_bindings("Japan", 2024, s, ranges));
  };
  std::vector<Turn> prior;
  for (std::size_t k = 0; k < seasons.size(); ++k) {
    const auto conv = build_stage3_conversation("Japan", seasons, k, prior, user(seasons[k]));
    REQUIRE(conv.size() == 2 + 2 * k);
    CHECK(conv.front().role == Role::System);
    for (std::size_t i = 0; i < k; ++i) {
      CHECK(conv[1 + 2 * i].role == Role::User);
      CHECK(conv[1 + 2 * i].content.find(std::string(to_string(seasons[i]))) != std::string::npos);
      CHECK(conv[2 + 2 * i].role == Role::Assistant);
    }
    CHECK(conv.back() == user(seasons[k]));
    prior.push_back({user(seasons[k]), {Role::Assistant, "answer " + std::to_string(k)}});
  }

  // wrong number of prior turns
  CHECK_THROWS_AS(build_stage3_conversation("Japan", seasons, 2, {prior[0]}, user(Season::Summer)), HistoryError);
  // prior turns out of season order
  CHECK_THROWS_AS(build_stage3_conversation("Japan", seasons, 2, {prior[1], prior[0]}, user(Season::Summer)),
                  HistoryError);
  // another country's turn
  const auto usa = render(prompt_template(StageId::WeatherData, Role::User), hourly_bindings("USA", 2024, Season::Winter, ranges));
  CHECK_THROWS_AS(build_stage3_conversation("Japan", seasons, 1, {{usa, {Role::Assistant, "x"}}}, user(Season::Spring)),
                  HistoryError);
  CHECK_THROWS_AS(build_stage3_conversation("Japan", seasons, 4, prior, user(Season::Winter)), HistoryError);
}

TEST_CASE("hourly prompt carries the season's ranges") {
  const auto ranges = testing::SyntheticModel::ranges("USA");
  const auto u = render(prompt_template(StageId::WeatherData, Role::User), hourly_bindings("USA", 2024, Season::Summer, ranges));
  CHECK(u.content.find("- Temperature: [18, 32] (°C)") != std::string::npos);
  CHECK(u.content.find("- Humidity: [30, 80] (%)") != std::string::npos);
  CHECK(u.content.find("during the Summer season") != std::string::npos);
}

TEST_CASE("prompts dump to files") {
  testing::TempDir dir;
  dump_prompts(dir.path());
  CHECK(read_text_file(dir.path() / "EnergyPatterns_system.txt") ==
        prompt_template(StageId::EnergyPatterns, Role::System).body);
}
