#include <deque>

#include "doctest.h"
#include "synthgrid/errors.hpp"
#include "synthgrid/household.hpp"
#include "synthgrid/io.hpp"
#include "synthgrid/parser.hpp"
#include "synthetic_model.hpp"

using namespace synthgrid;
using Kind = BehaviorViolation::Kind;

namespace {

const FamilyStructure kSwedenFamily{"Sweden", "Single-Parent Family", {"Mother", "Son"}};

DailyConsumptionProfile sweden_weekday() {
  return parse_consumption(extract_envelope(read_text_file(testing::fixture_path("sweden_winter_weekday.txt"))),
                           kSwedenFamily, Season::Winter, DayType::Weekday);
}

std::vector<Kind> kinds(const std::vector<BehaviorViolation>& vs) {
  std::vector<Kind> out;
  for (const auto& v : vs) out.push_back(v.kind);
  return out;
}

void set(DailyConsumptionProfile& p, std::size_t member, int from, int to, const std::string& action, const char* kwh) {
  for (int h = from; h <= to; ++h) p.members[member].hours[static_cast<std::size_t>(h % 24)] = {action, KilowattHours::parse(kwh)};
  p.recompute_totals();
}

}  // namespace

TEST_CASE("action classes") {
  CHECK(classify_action("Sleeping") == ActionClass::Sleep);
  CHECK(classify_action("Asleep") == ActionClass::Sleep);
  CHECK(classify_action("Commuting-to-school") == ActionClass::Away);
  CHECK(classify_action("Commuting") == ActionClass::Away);
  CHECK(classify_action("At-school") == ActionClass::Away);
  CHECK(classify_action("School") == ActionClass::Away);
  CHECK(classify_action("Working") == ActionClass::Away);
  CHECK(classify_action("Working-from-home") == ActionClass::Home);
  CHECK(classify_action("Helping-Son-with-homework") == ActionClass::Home);
  CHECK(classify_action("Preparing-for-bed") == ActionClass::Home);
  CHECK(classify_action("Dinner") == ActionClass::Home);
  CHECK(is_obligation("At-school"));
  CHECK(is_obligation("Working"));
  CHECK_FALSE(is_obligation("Commuting"));
  CHECK_FALSE(is_obligation("Doing-homework"));
}

TEST_CASE("sweden weekday profile is clean") {
  const auto p = sweden_weekday();
  CHECK(validate_behavior(p, DayType::Weekday).empty());
  CHECK(p.totals_consistent());
}

TEST_CASE("behavior rules") {
  auto work = sweden_weekday();
  set(work, 1, 9, 13, "Working", "0");
  const auto vs = validate_behavior(work, DayType::Weekday);
  REQUIRE(kinds(vs) == std::vector<Kind>{Kind::ActionRepeatTooLong});
  CHECK(vs[0].member == "Son");
  CHECK(vs[0].first_hour == 9);
  CHECK(vs[0].last_hour == 13);

  auto school = sweden_weekday();
  set(school, 1, 10, 10, "At-school", "0.1");
  CHECK(kinds(validate_behavior(school, DayType::Weekday)) == std::vector<Kind>{Kind::AwayWithConsumption});

  auto weekend = sweden_weekday();
  weekend.day_type = DayType::Weekend;
  const auto wv = validate_behavior(weekend, DayType::Weekend);
  REQUIRE_FALSE(wv.empty());
  for (const auto& v : wv) CHECK(v.kind == Kind::WeekendObligation);

  // 22..6 is nine hours across midnight
  auto sleepy = sweden_weekday();
  set(sleepy, 1, 22, 30, "Sleeping", "0.02");
  const auto sv = validate_behavior(sleepy, DayType::Weekday);
  REQUIRE(kinds(sv) == std::vector<Kind>{Kind::SleepTooLong});
  CHECK(sv[0].first_hour == 22);
  CHECK(sv[0].last_hour == 6);

  auto eight = sweden_weekday();
  set(eight, 1, 22, 29, "Sleeping", "0.02");
  CHECK(validate_behavior(eight, DayType::Weekday).empty());

  auto broken = sweden_weekday();
  broken.totals[5] = broken.totals[5] + KilowattHours::parse("0.01");
  CHECK(kinds(validate_behavior(broken, DayType::Weekday)) == std::vector<Kind>{Kind::MemberSeriesShape});
}

TEST_CASE("hvac plausibility warns") {
  const auto p = sweden_weekday();
  auto hot = testing::SyntheticModel::day("Sweden", Season::Summer);
  for (std::size_t h = 0; h < kHoursPerDay; ++h) hot.at(WeatherParam::Temperature, h).value = Measure(35);
  const auto vs = validate_behavior(p, DayType::Weekday, &hot);
  REQUIRE_FALSE(vs.empty());
  for (const auto& v : vs) {
    CHECK(v.kind == Kind::HvacImplausible);
    CHECK(v.severity == Severity::Warning);
  }
}

TEST_CASE("profile csv") {
  const auto p = sweden_weekday();
  const auto text = profile_csv(p);
  CHECK(text.rfind("hour,total_kwh,Mother_action,Mother_kwh,Son_action,Son_kwh,heating_action,heating_kwh,cooling_action,"
                   "cooling_kwh\n",
                   0) == 0);
  CHECK(text.find("\n0,0.34,Sleeping,0.02,Sleeping,0.02,") != std::string::npos);
  CHECK(parse_profile_csv(text, kSwedenFamily, Season::Winter, DayType::Weekday) == p);

  auto tampered = text;
  tampered.replace(tampered.find("\n0,0.34,"), 8, "\n0,0.35,");
  CHECK_THROWS_AS(parse_profile_csv(tampered, kSwedenFamily, Season::Winter, DayType::Weekday), IoError);
}

TEST_CASE("families persist and resume") {
  testing::TempDir out;
  RunConfig config;
  config.output_dir = out.path();
  config.families_per_country = 3;

  struct Fixed final : ChatBackend {
    int calls = 0;
    ChatExchange complete(const std::vector<ChatMessage>& messages, const ChatParams&) override {
      ++calls;
      ChatExchange ex;
      ex.request_messages = messages;
      ex.response_text = testing::SyntheticModel::family_response("Brazil");
      return ex;
    }
  } backend;
  Gateway gw(backend, {config.model_id}, RetryPolicy{}, [](auto) {}, nullptr);
  StageContext ctx{config, &gw};
  const auto fams = synthesize_families(ctx, "Brazil");
  REQUIRE(fams.size() == 3);
  CHECK(fams[0].family_type == "Nuclear Family");
  CHECK(load_families(out.path(), "Brazil") == fams);
  CHECK(synthesize_families(ctx, "Brazil") == fams);
  CHECK(backend.calls == 1);
}

TEST_CASE("consumption item persists its csv") {
  testing::TempDir out;
  RunConfig config;
  config.output_dir = out.path();
  const FamilyStructure fam{"India", "Couple", {"Husband", "Wife"}};

  struct Fixed final : ChatBackend {
    std::deque<std::string> texts;
    int calls = 0;
    ChatExchange complete(const std::vector<ChatMessage>& messages, const ChatParams&) override {
      ++calls;
      auto t = texts.front();
      if (texts.size() > 1) texts.pop_front();
      ChatExchange ex;
      ex.request_messages = messages;
      ex.response_text = t;
      return ex;
    }
  } backend;
  // an away hour with consumption first, then a clean answer
  auto bad = testing::SyntheticModel::consumption_response(fam.members, Season::Winter, DayType::Weekday);
  const auto pos = bad.find("(10,");
  REQUIRE(pos != std::string::npos);
  bad.replace(pos, bad.find(')', pos) - pos + 1, "(10,At-school,0.5)");
  backend.texts = {bad, testing::SyntheticModel::consumption_response(fam.members, Season::Winter, DayType::Weekday)};

  Gateway gw(backend, {config.model_id}, RetryPolicy{}, [](auto) {}, nullptr);
  StageContext ctx{config, &gw};
  const auto weather = testing::SyntheticModel::day("India", Season::Winter);
  const auto p = synthesize_consumption(ctx, fam, Season::Winter, DayType::Weekday, weather);
  CHECK(backend.calls == 2);
  CHECK(ctx.output_retries == 1);
  const auto path = profile_path(out.path(), fam, Season::Winter, DayType::Weekday);
  REQUIRE(std::filesystem::exists(path));
  CHECK(parse_profile_csv(read_text_file(path), fam, Season::Winter, DayType::Weekday) == p);
  CHECK(validate_behavior(p, DayType::Weekday).empty());
}
