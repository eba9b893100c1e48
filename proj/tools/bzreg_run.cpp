// Runs a scenario file: a seeded or exhaustive campaign, every check, and a
// report on stdout. Exit status: 0 ok, 2 config, 3 unexpected safety
// outcome, 4 liveness, 5 internal.
#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "bzreg/error.hpp"
#include "bzreg/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Run a Byzantine register scenario and check every property."};
  std::string path;
  std::uint64_t seeds = 0;
  std::uint64_t step_limit = 0;
  std::string format = "human";
  bool fail_fast = false;
  std::size_t keep = 1;
  app.add_option("path", path, "Scenario file (JSON)")->required();
  app.add_option("--seeds", seeds, "Number of seeds, overriding the file");
  app.add_option("--step-limit", step_limit, "Scheduled steps per run, overriding the file");
  app.add_option("--format", format, "Report format")->check(CLI::IsMember({"human", "records"}));
  app.add_flag("--fail-fast", fail_fast, "Stop at the first run with an unexpected outcome");
  app.add_option("--keep", keep, "Runs reported in detail besides the first violation of each property");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  bzreg::ScenarioConfig sc;
  try {
    sc = bzreg::load_scenario(path);
  } catch (const bzreg::Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  bzreg::CampaignOptions opts;
  if (seeds > 0) opts.seeds = seeds;
  if (step_limit > 0) opts.step_limit = step_limit;
  opts.fail_fast = fail_fast;
  opts.keep_reports = keep;

  try {
    const auto result = bzreg::run_campaign(sc, opts);
    std::cout << bzreg::emit_report(result, format == "records" ? bzreg::ReportFormat::kRecords
                                                                : bzreg::ReportFormat::kHuman);
    return bzreg::exit_code(result.outcome);
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 5;
  }
}
