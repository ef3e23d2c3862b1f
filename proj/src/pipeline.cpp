#include "synthgrid/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <memory>
#include <mutex>
#include <thread>

#include "json.hpp"
#include "synthgrid/calendar.hpp"
#include "synthgrid/errors.hpp"
#include "synthgrid/household.hpp"
#include "synthgrid/io.hpp"
#include "synthgrid/parser.hpp"
#include "synthgrid/stage.hpp"
#include "synthgrid/weather.hpp"

namespace synthgrid {
using nlohmann::json;

bool RunReport::complete() const {
  for (const auto& s : stages) {
    if (!s.failures.empty()) return false;
  }
  return assembly_failures.empty();
}

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  const auto count = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, workers)));
  if (count <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> threads;
  for (std::size_t t = 0; t < count; ++t) {
    threads.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& th : threads) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

namespace {

std::filesystem::path yearly_path(const std::filesystem::path& out, const FamilyStructure& f) {
  return out / "yearly" / slugify(f.country) / (slugify(f.family_type) + ".csv");
}

/// Per-stage bookkeeping shared by the worker threads.
class StageTracker {
 public:
  explicit StageTracker(StageReport& report) : report_(report) { report_.skipped = false; }

  /// Runs one item; item-level errors become failures, I/O and config errors abort.
  template <class F>
  bool run(const std::string& item, F&& body) {
    {
      std::lock_guard lock(mutex_);
      ++report_.items;
    }
    try {
      body();
      std::lock_guard lock(mutex_);
      ++report_.succeeded;
      return true;
    } catch (const IoError&) {
      throw;
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      fail(item, e.what());
      return false;
    }
  }

  void fail(const std::string& item, const std::string& reason) {
    std::lock_guard lock(mutex_);
    report_.failures.push_back(item + ": " + reason);
  }

  void finish() { std::sort(report_.failures.begin(), report_.failures.end()); }

 private:
  StageReport& report_;
  std::mutex mutex_;
};

std::string require_api_key(const RunConfig& config) {
  const char* key = std::getenv(config.api_key_ref.c_str());
  if (key == nullptr || *key == '\0') {
    throw ConfigError("environment variable " + config.api_key_ref + " is not set (or use --replay)");
  }
  return key;
}

}  // namespace

RunReport run_pipeline(const RunConfig& config, StageId through, PipelineDeps deps) {
  validate_config(config);
  RunReport report;
  for (StageId s : kAllStages) report.stages[index_of(s)].stage = s;

  std::unique_ptr<Transport> own_transport;
  if (deps.transport == nullptr) {
    if (config.replay()) {
      own_transport = std::make_unique<OfflineTransport>();
    } else {
      own_transport = std::make_unique<HttpTransport>();
    }
    deps.transport = own_transport.get();
  }
  std::unique_ptr<ChatBackend> own_backend;
  if (deps.backend == nullptr) {
    if (config.replay()) {
      own_backend = std::make_unique<ReplayBackend>(*config.fixture_dir);
    } else {
      own_backend = std::make_unique<OpenAiBackend>(
          *deps.transport, config.endpoint_url, require_api_key(config),
          std::chrono::milliseconds(static_cast<long long>(config.request_timeout_s * 1000)));
    }
    deps.backend = own_backend.get();
  }

  const auto out = config.output_dir;
  std::filesystem::create_directories(out);
  write_text_file(out / "run_config.json", config_to_json(config));

  ExchangeLog log;
  log.load(out / "exchanges.jsonl");
  RetryPolicy policy;
  policy.max_retries = config.max_retries;
  policy.base_delay = std::chrono::milliseconds(static_cast<long long>(config.retry_base_delay_s * 1000));
  Gateway gateway(*deps.backend, {config.model_id, config.temperature, config.max_tokens}, policy,
                  deps.sleeper ? deps.sleeper : real_sleeper(), &log);

  std::mutex warn_mutex;
  StageContext ctx{config, &gateway, deps.transport};
  ctx.warn = [&](const std::string& msg) {
    std::lock_guard lock(warn_mutex);
    report.warnings.push_back(msg);
    if (deps.on_warning) deps.on_warning(msg);
  };

  const auto& countries = config.countries;
  const std::size_t nc = countries.size();
  const bool llm_weather = config.weather_source == WeatherSource::Llm;
  const auto save_log = [&] { log.save(out / "exchanges.jsonl"); };

  // Stage 1
  std::vector<std::optional<std::vector<FamilyStructure>>> families(nc);
  {
    StageTracker t(report.stages[index_of(StageId::FamilyTypes)]);
    parallel_for(nc, config.parallelism, [&](std::size_t i) {
      t.run(countries[i], [&] { families[i] = synthesize_families(ctx, countries[i]); });
    });
    t.finish();
    save_log();
  }

  // Stage 2
  std::vector<std::optional<SeasonalWeatherRanges>> ranges(nc);
  if (through >= StageId::WeatherRanges && llm_weather) {
    StageTracker t(report.stages[index_of(StageId::WeatherRanges)]);
    parallel_for(nc, config.parallelism, [&](std::size_t i) {
      t.run(countries[i], [&] { ranges[i] = synthesize_ranges(ctx, countries[i]); });
    });
    t.finish();
    save_log();
  }

  // Stage 3 (or the TMY path)
  std::vector<std::optional<std::map<Season, HourlyWeatherDay>>> weather(nc);
  const bool need_weather = through >= StageId::WeatherData ||
                            (!llm_weather && through >= StageId::WeatherRanges);
  if (need_weather) {
    StageTracker t(report.stages[index_of(StageId::WeatherData)]);
    parallel_for(nc, config.parallelism, [&](std::size_t i) {
      if (llm_weather && !ranges[i]) {
        t.fail(countries[i], "no weather ranges");
        return;
      }
      t.run(countries[i], [&] {
        weather[i] = synthesize_weather(ctx, countries[i], ranges[i] ? &*ranges[i] : nullptr);
      });
    });
    t.finish();
    save_log();
  }

  // Stage 4
  if (through >= StageId::EnergyPatterns) {
    struct Item {
      std::size_t country;
      std::size_t family;
      Season season;
      DayType day_type;
    };
    std::vector<Item> items;
    StageTracker t(report.stages[index_of(StageId::EnergyPatterns)]);
    for (std::size_t i = 0; i < nc; ++i) {
      if (!families[i] || !weather[i]) {
        t.fail(countries[i], std::string("missing ") + (!families[i] ? "families" : "weather"));
        continue;
      }
      for (std::size_t f = 0; f < families[i]->size(); ++f) {
        for (Season s : config.seasons) {
          for (DayType d : kAllDayTypes) items.push_back({i, f, s, d});
        }
      }
    }
    parallel_for(items.size(), config.parallelism, [&](std::size_t k) {
      const auto& it = items[k];
      const auto& fam = (*families[it.country])[it.family];
      const std::string name = fam.country + "/" + fam.family_type + "/" + std::string(to_string(it.season)) + "/" +
                               std::string(to_string(it.day_type));
      t.run(name, [&] {
        synthesize_consumption(ctx, fam, it.season, it.day_type, weather[it.country]->at(it.season));
      });
    });
    t.finish();
    save_log();

    if (config.seasons.size() == kAllSeasons.size()) {
      report.yearly_files = assemble_years(config, &report.assembly_failures);
    }
  }

  const auto entries = log.entries();
  report.summaries = summarize_run(entries);
  for (const auto& e : entries) report.output_retries += e.attempt > 0 ? 1 : 0;
  report.transport_retries = gateway.transport_retries();
  std::sort(report.warnings.begin(), report.warnings.end());
  write_text_file(out / "run_report.json", run_report_json(report));
  return report;
}

std::size_t assemble_years(const RunConfig& config, std::vector<std::string>* failures) {
  const auto out = config.output_dir;
  std::size_t written = 0;
  const auto fail = [&](const std::string& msg) {
    if (failures) failures->push_back(msg);
  };
  for (const auto& country : config.countries) {
    std::vector<FamilyStructure> families;
    std::map<Season, HourlyWeatherDay> weather;
    try {
      families = load_families(out, country);
      for (Season s : kAllSeasons) {
        const auto path = out / "weather" / (slugify(country) + "_" + std::string(to_string(s)) + ".csv");
        if (!std::filesystem::exists(path)) continue;
        for (auto& d : parse_weather_csv(read_text_file(path))) weather.emplace(d.season, std::move(d));
      }
    } catch (const Error& e) {
      fail(country + ": " + e.what());
      continue;
    }
    const auto cal = build_calendar(config, country);
    for (const auto& fam : families) {
      try {
        DailyProfiles daily;
        for (Season s : kAllSeasons) {
          for (DayType d : kAllDayTypes) {
            const auto path = profile_path(out, fam, s, d);
            if (std::filesystem::exists(path)) daily[{s, d}] = parse_profile_csv(read_text_file(path), fam, s, d);
          }
        }
        const auto yearly = assemble_year(fam, daily, cal, weather);
        write_text_file(yearly_path(out, fam), yearly_csv(yearly));
        ++written;
      } catch (const IoError&) {
        throw;
      } catch (const Error& e) {
        fail(country + "/" + fam.family_type + ": " + e.what());
      }
    }
  }
  if (failures) std::sort(failures->begin(), failures->end());
  return written;
}

std::vector<std::string> validate_run_dir(const std::filesystem::path& dir) {
  std::vector<std::string> problems;
  const auto cfg_path = dir / "run_config.json";
  if (!std::filesystem::exists(cfg_path)) return {"missing run_config.json"};
  RunConfig config = load_config(cfg_path);
  config.output_dir = dir;

  const auto check = [&](const std::string& what, const auto& body) {
    try {
      body();
    } catch (const Error& e) {
      problems.push_back(what + ": " + e.what());
    }
  };

  for (const auto& country : config.countries) {
    std::vector<FamilyStructure> families;
    if (std::filesystem::exists(families_path(dir, country))) {
      check(country + " families", [&] { families = load_families(dir, country); });
    }
    std::optional<SeasonalWeatherRanges> ranges;
    const auto ranges_file = dir / "ranges" / (slugify(country) + ".txt");
    if (std::filesystem::exists(ranges_file)) {
      check(country + " ranges", [&] {
        ranges = parse_weather_ranges(extract_envelope(read_text_file(ranges_file)), country);
        const auto v = validate_ranges(*ranges);
        if (has_errors(v)) throw ValidationRejected(describe(v));
      });
    }
    std::map<Season, HourlyWeatherDay> weather;
    for (Season s : kAllSeasons) {
      const auto path = dir / "weather" / (slugify(country) + "_" + std::string(to_string(s)) + ".csv");
      if (!std::filesystem::exists(path)) continue;
      check(path.filename().string(), [&] {
        for (auto& d : parse_weather_csv(read_text_file(path))) {
          const auto v = validate_hourly(d, ranges ? &*ranges : nullptr);
          if (config.weather_source == WeatherSource::Llm && has_errors(v)) throw ValidationRejected(describe(v));
          weather.emplace(d.season, std::move(d));
        }
      });
    }
    for (const auto& fam : families) {
      for (Season s : kAllSeasons) {
        for (DayType d : kAllDayTypes) {
          const auto path = profile_path(dir, fam, s, d);
          if (!std::filesystem::exists(path)) continue;
          check(std::filesystem::relative(path, dir).string(), [&] {
            const auto p = parse_profile_csv(read_text_file(path), fam, s, d);
            const auto it = weather.find(s);
            const auto v = validate_behavior(p, d, it == weather.end() ? nullptr : &it->second);
            if (has_errors(v)) throw ValidationRejected(describe(v));
          });
        }
      }
      const auto ypath = yearly_path(dir, fam);
      if (!std::filesystem::exists(ypath)) continue;
      check(std::filesystem::relative(ypath, dir).string(), [&] {
        const auto y = parse_yearly_csv(read_text_file(ypath));
        const std::chrono::sys_days first{std::chrono::year(config.year) / std::chrono::January / 1};
        const std::chrono::sys_days end{std::chrono::year(config.year + 1) / std::chrono::January / 1};
        const auto expected = static_cast<std::size_t>((end - first).count()) * kHoursPerDay;
        if (y.rows.size() != expected) {
          throw ValueError(std::to_string(y.rows.size()) + " rows, expected " + std::to_string(expected));
        }
        for (std::size_t i = 0; i < y.rows.size(); ++i) {
          const auto& r = y.rows[i];
          if (r.date != first + std::chrono::days(i / kHoursPerDay) || r.hour != static_cast<int>(i % kHoursPerDay)) {
            throw ValueError("timestamps not hourly ascending at row " + std::to_string(i));
          }
          KilowattHours sum = r.heating + r.cooling;
          for (const auto& m : r.members) sum += m;
          if (sum != r.total) throw ValueError("total mismatch at row " + std::to_string(i));
        }
      });
    }
  }
  return problems;
}

std::string run_report_json(const RunReport& report) {
  json stages = json::array();
  for (const auto& s : report.stages) {
    stages.push_back({{"stage", std::string(to_string(s.stage))},
                      {"skipped", s.skipped},
                      {"items", s.items},
                      {"succeeded", s.succeeded},
                      {"failures", s.failures}});
  }
  json summary = json::array();
  for (const auto& s : report.summaries) {
    summary.push_back({{"stage", std::string(to_string(s.stage))},
                       {"responses", s.n_responses},
                       {"avg_time", format_duration(s.avg_time)},
                       {"total_duration", format_duration(s.total_duration)},
                       {"prompt_tokens", s.total_prompt_tokens},
                       {"completion_tokens", s.total_completion_tokens}});
  }
  const json doc{{"stages", stages},
                 {"yearly_files", report.yearly_files},
                 {"assembly_failures", report.assembly_failures},
                 {"retried_responses", report.output_retries},
                 {"summary", summary}};
  return doc.dump(2) + "\n";
}

}  // namespace synthgrid
