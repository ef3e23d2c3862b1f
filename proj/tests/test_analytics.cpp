#include <random>

#include "doctest.h"
#include "synthgrid/analytics.hpp"
#include "synthgrid/errors.hpp"
#include "synthgrid/io.hpp"
#include "synthgrid/parser.hpp"
#include "synthetic_model.hpp"

using namespace synthgrid;

namespace {

std::vector<SignaturePoint> linear_points() {
  std::vector<SignaturePoint> pts;
  for (int t = -5; t <= 30; ++t) pts.push_back({double(t), t < 18 ? 2 - 0.1 * t : 0.2});
  return pts;
}

LoggedExchange logged(StageId s, const std::string& item, int ms, int prompt, int completion) {
  LoggedExchange e;
  e.stage = s;
  e.item = item;
  e.exchange.latency = std::chrono::milliseconds(ms);
  e.exchange.prompt_tokens = prompt;
  e.exchange.completion_tokens = completion;
  return e;
}

std::size_t count_lines(const std::string& text, const std::string& prefix) {
  std::size_t n = 0;
  for (const auto& l : split(text, '\n')) n += l.rfind(prefix, 0) == 0 ? 1 : 0;
  return n;
}

}  // namespace

TEST_CASE("bins") {
  CHECK(bin_index(0.49, 1) == 0);
  CHECK(bin_index(0.5, 1) == 1);
  CHECK(bin_index(-0.5, 1) == 0);
  CHECK(bin_index(-0.51, 1) == -1);
  CHECK(bin_index(5, 2) == 3);
}

TEST_CASE("cold slope") {
  std::vector<SignaturePoint> flat;
  for (int t = -10; t < 30; ++t) flat.push_back({double(t), 1});
  const auto f = compute_signature(flat);
  REQUIRE(f.cold_slope);
  CHECK(*f.cold_slope == 0);

  const auto lin = compute_signature(linear_points());
  REQUIRE(lin.cold_slope);
  CHECK(*lin.cold_slope == doctest::Approx(-0.1).epsilon(1e-9));

  // one temperature below the balance point
  const auto one = compute_signature({{5, 1}, {5, 2}, {20, 1}});
  CHECK_FALSE(one.cold_slope);
  CHECK(one.bins.size() == 2);
}

TEST_CASE("bins conserve energy") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> temp(-20, 40);
  std::uniform_real_distribution<double> kwh(0, 5);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<SignaturePoint> pts(200);
    double total = 0;
    for (auto& p : pts) {
      p = {temp(rng), kwh(rng)};
      total += p.kwh;
    }
    const auto sig = compute_signature(pts, 18, 2);
    double binned = 0;
    std::size_t n = 0;
    for (const auto& b : sig.bins) {
      binned += b.mean * static_cast<double>(b.count);
      n += b.count;
    }
    CHECK(n == pts.size());
    CHECK(binned == doctest::Approx(total).epsilon(1e-9));
    for (std::size_t i = 1; i < sig.bins.size(); ++i) CHECK(sig.bins[i - 1].center < sig.bins[i].center);
  }
}

TEST_CASE("comparison") {
  const auto a = compute_signature(linear_points(), 18, 1, "a");
  const auto self = compare_signatures(a, a);
  CHECK(self.only_in_a.empty());
  CHECK(self.only_in_b.empty());
  CHECK(self.aligned.size() == a.bins.size());
  for (const auto& d : self.aligned) CHECK(d.difference == 0);
  REQUIRE(self.slope_difference);
  CHECK(*self.slope_difference == 0);

  std::vector<SignaturePoint> hot;
  for (int t = 40; t < 50; ++t) hot.push_back({double(t), 3 - 0.01 * t});
  const auto b = compute_signature(hot, 45, 1, "b");
  const auto disjoint = compare_signatures(a, b);
  CHECK(disjoint.aligned.empty());
  CHECK(disjoint.only_in_a.size() == a.bins.size());
  CHECK(disjoint.only_in_b.size() == b.bins.size());
  CHECK(disjoint.slope_difference);

  CHECK_THROWS_AS(compare_signatures(a, compute_signature(linear_points(), 18, 2)), ComparisonError);
}

TEST_CASE("reference csv") {
  const auto pts = parse_reference_csv("timestamp,temp_c,total_kwh\n2022-01-01T00:00:00,-3.5,1.25\n2022-01-01T01:00:00,-4,1.5\n");
  REQUIRE(pts.size() == 2);
  CHECK(pts[1].temp_c == -4);
  CHECK(pts[0].kwh == 1.25);
  CHECK_THROWS_AS(parse_reference_csv("timestamp,temp_c,total_kwh\nx,abc,1\n"), ParseError);
}

TEST_CASE("run summary") {
  CHECK(summarize_run({}).empty());

  std::vector<LoggedExchange> log;
  for (int i = 0; i < 240; ++i) log.push_back(logged(StageId::EnergyPatterns, "p" + std::to_string(i), 1000, 10, 5));
  const auto s = summarize_run(log);
  REQUIRE(s.size() == 1);
  CHECK(s[0].n_responses == 240);
  CHECK(s[0].total_duration == std::chrono::seconds(240));
  CHECK(s[0].avg_time == std::chrono::seconds(1));
  CHECK(format_duration(s[0].total_duration) == "0:04:00");

  CHECK(format_duration(std::chrono::milliseconds(59'999)) == "0:00:59");
  CHECK(format_duration(std::chrono::hours(8) + std::chrono::minutes(10) + std::chrono::seconds(36)) == "8:10:36");

  log.push_back(logged(StageId::FamilyTypes, "USA", 2000, 1, 1));
  const auto both = summarize_run(log);
  REQUIRE(both.size() == 2);
  CHECK(both[0].stage == StageId::FamilyTypes);
  CHECK(summary_table(both).rfind("stage,responses,avg_time,total_duration,prompt_tokens,completion_tokens\n"
                                  "FamilyTypes,1,0:00:02,0:00:02,1,1\n",
                                  0) == 0);
}

TEST_CASE("plot data") {
  const FamilyStructure fam{"Sweden", "Single-Parent Family", {"Mother", "Son"}};
  const auto p = parse_consumption(extract_envelope(read_text_file(testing::fixture_path("sweden_winter_weekday.txt"))),
                                   fam, Season::Winter, DayType::Weekday);
  const auto text = plot_csv(p);
  for (const char* s : {"Weekday:Mother,", "Weekday:Son,", "Weekday:Heating,", "Weekday:Cooling,", "Weekday:Total,"}) {
    CHECK(count_lines(text, s) == 24);
  }
  CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 5 * 24);
  CHECK(text.find("Weekday:Total,18,1\n") != std::string::npos);

  CHECK(plot_csv(EnergySignature{}) == "series,x,y\n");
  std::vector<SignaturePoint> pts;
  for (int i = 0; i < 30; ++i) pts.push_back({double(i % 10), 1.0});
  const auto sig = compute_signature(pts);
  REQUIRE(sig.bins.size() == 10);
  const auto sig_text = plot_csv(sig);
  CHECK(count_lines(sig_text, "bin,") == 10);
  CHECK(count_lines(sig_text, "point,") == 30);

  testing::TempDir dir;
  emit_plot_data(sig, dir.path() / "sig.csv");
  CHECK(read_text_file(dir.path() / "sig.csv") == sig_text);
  write_text_file(dir.path() / "file", "x");
  CHECK_THROWS_AS(emit_plot_data(sig, dir.path() / "file" / "sub.csv"), IoError);
}

TEST_CASE("signature json") {
  const auto sig = compute_signature(linear_points(), 18, 1, "USA/Couple");
  const auto j = signature_json(sig);
  CHECK(j.find("\"family_id\"") != std::string::npos);
  CHECK(j.find("USA/Couple") != std::string::npos);
  CHECK(j.find("cold_slope") != std::string::npos);
}
