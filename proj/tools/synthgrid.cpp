#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "synthgrid/analytics.hpp"
#include "synthgrid/calendar.hpp"
#include "synthgrid/config.hpp"
#include "synthgrid/errors.hpp"
#include "synthgrid/io.hpp"
#include "synthgrid/pipeline.hpp"
#include "synthgrid/prompts.hpp"

using namespace synthgrid;

namespace {

ConfigOverrides parse_sets(const std::vector<std::string>& sets) {
  ConfigOverrides out;
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + s + "'");
    out.emplace_back(s.substr(0, eq), s.substr(eq + 1));
  }
  return out;
}

RunConfig resolve_config(const std::string& path, const ConfigOverrides& overrides) {
  return path.empty() ? config_from_overrides(overrides) : load_config(path, overrides);
}

void print_report(const RunReport& r) {
  for (const auto& s : r.stages) {
    if (s.skipped) continue;
    std::printf("%-15s %zu/%zu ok\n", std::string(to_string(s.stage)).c_str(), s.succeeded, s.items);
    for (const auto& f : s.failures) std::printf("  FAILED %s\n", f.c_str());
  }
  if (r.yearly_files) std::printf("yearly files    %zu\n", r.yearly_files);
  for (const auto& f : r.assembly_failures) std::printf("  FAILED assembly %s\n", f.c_str());
  std::printf("retried responses %zu, transport retries %d\n", r.output_retries, r.transport_retries);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"synthgrid: synthetic household energy profiles from a chat model"};
  app.require_subcommand(0, 1);
  std::string dump_dir;
  app.add_option("--dump-prompts", dump_dir, "Write the shipped prompt templates to a directory");

  std::string config_path;
  std::string through = "EnergyPatterns";
  std::string replay_dir;
  std::string record_dir;
  std::vector<std::string> sets;
  auto* run = app.add_subcommand("run", "Run the pipeline");
  run->add_option("--config", config_path, "JSON config file");
  run->add_option("--through", through, "Last stage to run (FamilyTypes, WeatherRanges, WeatherData, EnergyPatterns)");
  run->add_option("--replay", replay_dir, "Serve model responses from this fixture directory; no network");
  run->add_option("--record", record_dir, "Record accepted exchanges as fixtures here");
  run->add_option("--set", sets, "Override a config key (key=value)");

  std::string validate_dir;
  auto* validate = app.add_subcommand("validate", "Re-check every artifact of a run directory");
  validate->add_option("dir", validate_dir)->required();

  auto* assemble = app.add_subcommand("assemble-year", "Build yearly CSVs from stored daily profiles");
  assemble->add_option("--config", config_path, "JSON config file");
  assemble->add_option("--set", sets, "Override a config key (key=value)");

  std::string yearly_csv_path;
  std::string reference_path;
  std::string sig_out;
  std::string plot_out;
  double balance = 18.0;
  double bin_width = 1.0;
  auto* signature = app.add_subcommand("signature", "Energy signature of a yearly CSV");
  signature->add_option("yearly", yearly_csv_path)->required();
  signature->add_option("--reference", reference_path, "timestamp,temp_c,total_kwh reference CSV");
  signature->add_option("--out", sig_out, "Write the signature JSON here instead of stdout");
  signature->add_option("--plot", plot_out, "Write series,x,y plot data here");
  signature->add_option("--balance-point", balance, "Balance point in C");
  signature->add_option("--bin-width", bin_width, "Bin width in C");

  std::string report_dir;
  auto* report = app.add_subcommand("report", "Per-stage response, time and token summary");
  report->add_option("dir", report_dir)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (!dump_dir.empty()) dump_prompts(dump_dir);

    if (*run) {
      auto overrides = parse_sets(sets);
      if (!replay_dir.empty()) overrides.emplace_back("fixture_dir", replay_dir);
      if (!record_dir.empty()) overrides.emplace_back("record_dir", record_dir);
      const auto config = resolve_config(config_path, overrides);
      PipelineDeps deps;
      deps.on_warning = [](const std::string& w) { std::cerr << "warning: " << w << "\n"; };
      const auto r = run_pipeline(config, parse_stage(through), deps);
      print_report(r);
      return r.exit_code();
    }
    if (*validate) {
      const auto problems = validate_run_dir(validate_dir);
      for (const auto& p : problems) std::printf("%s\n", p.c_str());
      std::printf("%zu problem(s)\n", problems.size());
      return problems.empty() ? 0 : 2;
    }
    if (*assemble) {
      const auto config = resolve_config(config_path, parse_sets(sets));
      std::vector<std::string> failures;
      const auto n = assemble_years(config, &failures);
      for (const auto& f : failures) std::printf("FAILED %s\n", f.c_str());
      std::printf("%zu yearly file(s) written\n", n);
      return failures.empty() ? 0 : 2;
    }
    if (*signature) {
      const auto sig = compute_signature(parse_yearly_csv(read_text_file(yearly_csv_path)), balance, bin_width);
      std::string text = signature_json(sig);
      if (!reference_path.empty()) {
        const auto ref = compute_signature(parse_reference_csv(read_text_file(reference_path)), balance, bin_width,
                                           "reference");
        text += comparison_json(compare_signatures(sig, ref));
      }
      if (!plot_out.empty()) emit_plot_data(sig, plot_out);
      if (sig_out.empty()) {
        std::cout << text;
      } else {
        write_text_file(sig_out, text);
      }
      return 0;
    }
    if (*report) {
      ExchangeLog log;
      log.load(std::filesystem::path(report_dir) / "exchanges.jsonl");
      std::cout << summary_table(summarize_run(log.entries()));
      return 0;
    }
    if (dump_dir.empty()) std::cout << app.help();
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
