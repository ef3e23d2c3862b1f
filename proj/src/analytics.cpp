#include "synthgrid/analytics.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "json.hpp"
#include "synthgrid/errors.hpp"
#include "synthgrid/io.hpp"

namespace synthgrid {
using nlohmann::json;

long bin_index(double temp_c, double width) { return static_cast<long>(std::floor(temp_c / width + 0.5)); }

std::optional<double> ols_slope(const std::vector<SignaturePoint>& points) {
  std::set<double> distinct;
  double mx = 0;
  double my = 0;
  for (const auto& p : points) {
    distinct.insert(p.temp_c);
    mx += p.temp_c;
    my += p.kwh;
  }
  if (distinct.size() < 2) return std::nullopt;
  const auto n = static_cast<double>(points.size());
  mx /= n;
  my /= n;
  double sxy = 0;
  double sxx = 0;
  for (const auto& p : points) {
    sxy += (p.temp_c - mx) * (p.kwh - my);
    sxx += (p.temp_c - mx) * (p.temp_c - mx);
  }
  return sxy / sxx;
}

EnergySignature compute_signature(std::vector<SignaturePoint> points, double balance_point, double bin_width,
                                  std::string family_id) {
  if (!(bin_width > 0)) throw Error("bin width must be positive");
  EnergySignature sig;
  sig.family_id = std::move(family_id);
  sig.balance_point = balance_point;
  sig.bin_width = bin_width;
  sig.points = std::move(points);

  std::map<long, std::pair<double, std::size_t>> bins;
  std::vector<SignaturePoint> cold;
  for (const auto& p : sig.points) {
    auto& b = bins[bin_index(p.temp_c, bin_width)];
    b.first += p.kwh;
    ++b.second;
    if (p.temp_c < balance_point) cold.push_back(p);
  }
  for (const auto& [idx, b] : bins) {
    sig.bins.push_back({static_cast<double>(idx) * bin_width, b.first / static_cast<double>(b.second), b.second});
  }
  sig.cold_slope = ols_slope(cold);
  return sig;
}

EnergySignature compute_signature(const YearlyProfile& yearly, double balance_point, double bin_width) {
  std::vector<SignaturePoint> points;
  points.reserve(yearly.rows.size());
  for (const auto& r : yearly.rows) points.push_back({r.outdoor_temp_c, r.total.value()});
  return compute_signature(std::move(points), balance_point, bin_width, yearly.country + "/" + yearly.family_type);
}

SignatureComparison compare_signatures(const EnergySignature& a, const EnergySignature& b) {
  if (std::abs(a.bin_width - b.bin_width) > 1e-12) {
    throw ComparisonError("bin widths differ: " + format_double(a.bin_width) + " vs " + format_double(b.bin_width));
  }
  SignatureComparison out;
  std::map<long, const SignatureBin*> in_b;
  for (const auto& bin : b.bins) in_b[bin_index(bin.center, b.bin_width)] = &bin;
  for (const auto& bin : a.bins) {
    const auto it = in_b.find(bin_index(bin.center, a.bin_width));
    if (it == in_b.end()) {
      out.only_in_a.push_back(bin.center);
      continue;
    }
    out.aligned.push_back({bin.center, bin.mean, it->second->mean, bin.mean - it->second->mean});
    in_b.erase(it);
  }
  for (const auto& [_, bin] : in_b) out.only_in_b.push_back(bin->center);
  if (a.cold_slope && b.cold_slope) out.slope_difference = *a.cold_slope - *b.cold_slope;
  return out;
}

std::vector<SignaturePoint> parse_reference_csv(std::string_view text) {
  std::vector<SignaturePoint> out;
  bool header = true;
  int lineno = 0;
  for (const auto& line : split(text, '\n')) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto f = split_csv_line(line);
    if (header) {
      if (f.size() != 3 || trim(f[1]) != "temp_c" || trim(f[2]) != "total_kwh") {
        throw ParseError("reference CSV header must be timestamp,temp_c,total_kwh");
      }
      header = false;
      continue;
    }
    if (f.size() != 3) throw ParseError("reference CSV line " + std::to_string(lineno) + " needs 3 fields");
    out.push_back({parse_double(f[1]), parse_double(f[2])});
  }
  return out;
}

std::string signature_json(const EnergySignature& sig) {
  json bins = json::array();
  for (const auto& b : sig.bins) bins.push_back({{"center", b.center}, {"mean", b.mean}, {"count", b.count}});
  json doc{{"balance_point", sig.balance_point}, {"bin_width", sig.bin_width}, {"bins", bins}};
  doc["cold_slope"] = sig.cold_slope ? json(*sig.cold_slope) : json(nullptr);
  if (!sig.family_id.empty()) doc["family_id"] = sig.family_id;
  return doc.dump(2) + "\n";
}

std::string comparison_json(const SignatureComparison& cmp) {
  json aligned = json::array();
  for (const auto& d : cmp.aligned) {
    aligned.push_back({{"center", d.center}, {"mean_a", d.mean_a}, {"mean_b", d.mean_b}, {"difference", d.difference}});
  }
  json doc{{"aligned", aligned}, {"only_in_a", cmp.only_in_a}, {"only_in_b", cmp.only_in_b}};
  doc["slope_difference"] = cmp.slope_difference ? json(*cmp.slope_difference) : json(nullptr);
  return doc.dump(2) + "\n";
}

std::vector<StageSummary> summarize_run(const std::vector<LoggedExchange>& log) {
  std::map<StageId, StageSummary> by_stage;
  for (const auto& e : log) {
    auto& s = by_stage[e.stage];
    s.stage = e.stage;
    ++s.n_responses;
    s.total_duration += e.exchange.latency;
    s.total_prompt_tokens += e.exchange.prompt_tokens;
    s.total_completion_tokens += e.exchange.completion_tokens;
  }
  std::vector<StageSummary> out;
  for (auto& [_, s] : by_stage) {
    s.avg_time = s.total_duration / static_cast<std::int64_t>(s.n_responses);
    out.push_back(s);
  }
  return out;
}

std::string format_duration(std::chrono::milliseconds d) {
  const auto total = std::chrono::duration_cast<std::chrono::seconds>(d).count();
  char buf[32];
  std::snprintf(buf, sizeof buf, "%lld:%02lld:%02lld", static_cast<long long>(total / 3600),
                static_cast<long long>(total / 60 % 60), static_cast<long long>(total % 60));
  return buf;
}

std::string summary_table(const std::vector<StageSummary>& summaries) {
  std::string out = "stage,responses,avg_time,total_duration,prompt_tokens,completion_tokens\n";
  for (const auto& s : summaries) {
    out += std::string(to_string(s.stage)) + "," + std::to_string(s.n_responses) + "," + format_duration(s.avg_time) +
           "," + format_duration(s.total_duration) + "," + std::to_string(s.total_prompt_tokens) + "," +
           std::to_string(s.total_completion_tokens) + "\n";
  }
  return out;
}

std::string plot_csv(const DailyConsumptionProfile& p) {
  std::string out = "series,x,y\n";
  const std::string tag = std::string(to_string(p.day_type)) + ":";
  const auto emit = [&](const std::string& name, const auto& value_at) {
    for (std::size_t h = 0; h < kHoursPerDay; ++h) {
      out += csv_field(tag + name) + "," + std::to_string(h) + "," + value_at(h).to_string() + "\n";
    }
  };
  for (const auto& m : p.members) emit(m.member, [&](std::size_t h) { return m.hours[h].kwh; });
  emit("Heating", [&](std::size_t h) { return p.heating[h].kwh; });
  emit("Cooling", [&](std::size_t h) { return p.cooling[h].kwh; });
  emit("Total", [&](std::size_t h) { return p.totals[h]; });
  return out;
}

std::string plot_csv(const EnergySignature& sig) {
  std::string out = "series,x,y\n";
  for (const auto& b : sig.bins) out += "bin," + format_double(b.center) + "," + format_double(b.mean) + "\n";
  for (const auto& p : sig.points) out += "point," + format_double(p.temp_c) + "," + format_double(p.kwh) + "\n";
  return out;
}

void emit_plot_data(const DailyConsumptionProfile& profile, const std::filesystem::path& path) {
  write_text_file(path, plot_csv(profile));
}

void emit_plot_data(const EnergySignature& sig, const std::filesystem::path& path) {
  write_text_file(path, plot_csv(sig));
}

}  // namespace synthgrid
