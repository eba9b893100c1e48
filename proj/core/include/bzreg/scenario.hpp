#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bzreg/checker.hpp"
#include "bzreg/engine.hpp"

namespace bzreg {

/// What a scenario is supposed to show. `violations` must each occur in at
/// least one run; `allow` may occur as well; any other violation is
/// unexpected. With `liveness`, runs that exhaust their step budget are
/// accepted.
struct Expectation {
  std::vector<std::string> violations;
  std::vector<std::string> allow;
  bool liveness = false;
};

/// A parsed scenario file.
struct ScenarioConfig {
  std::string name;
  std::string description;
  RunSpec base;
  /// Re-derive strategy parameters from each seed (campaign sweeps).
  bool sample_writer = false;
  std::vector<int> sampled_readers;
  /// Random workload drawn per seed; absent: base.workload as given.
  std::optional<WorkloadShape> random_workload;
  bool exhaustive = false;
  EnumerationLimits limits;
  std::uint64_t seeds = 1;
  std::uint64_t first_seed = 0;
  bool allow_excess_byzantine = false;
  Expectation expect;
  std::vector<std::string> warnings;  // e.g. sub-threshold resilience
};

/// Throws Error(kScenarioConfig) on malformed or inconsistent input.
ScenarioConfig parse_scenario(std::string_view json_text);
ScenarioConfig load_scenario(const std::filesystem::path& path);

/// The RunSpec for one seed of a seeded campaign.
RunSpec spec_for_seed(const ScenarioConfig& sc, std::uint64_t seed);

struct RunResult {
  std::uint64_t seed = 0;  // exhaustive: history index
  RunStatus status = RunStatus::kComplete;
  std::uint64_t scheduled_steps = 0;
  std::string history_digest;
  CheckReport report;
};

struct CampaignOptions {
  std::optional<std::uint64_t> seeds;       // overrides the file
  std::optional<std::uint64_t> step_limit;  // overrides the file
  bool fail_fast = false;
  /// Keep full check reports for the first N runs and for the first run
  /// violating each property; verdict tallies cover all runs.
  std::size_t keep_reports = 1;
  CheckOptions check;
};

enum class Outcome : std::uint8_t {
  kOk,
  kUnexpectedViolation,
  kLiveness,
  kMissingExpected,
  kInternal,
};

std::string_view to_string(Outcome o);
/// 0 ok, 3 safety (unexpected or missing expected violation), 4 liveness,
/// 5 internal.
int exit_code(Outcome o);

struct PropertyTally {
  std::string property;
  std::uint64_t pass = 0;
  std::uint64_t violation = 0;
  std::uint64_t skipped = 0;
  std::optional<std::uint64_t> first_violation;  // seed
};

struct CampaignResult {
  ScenarioConfig scenario;
  std::uint64_t runs = 0;
  std::uint64_t complete = 0;
  std::uint64_t step_limit = 0;
  std::uint64_t deadlock = 0;
  std::uint64_t invariant_broken = 0;  // InvariantBroken diagnostics, all runs
  std::vector<PropertyTally> tallies;  // all_properties() order
  std::vector<RunResult> kept;         // reports kept per CampaignOptions
  std::vector<std::string> run_digests;  // one per run, in run order
  std::vector<std::string> unexpected;  // property names
  std::vector<std::string> missing;     // expected but never observed
  std::string internal_error;
  std::size_t registers = 0;  // allocated by the bank initializer
  std::string register_line;
  Outcome outcome = Outcome::kOk;
};

/// Runs the campaign and classifies it against the expectation block.
/// Deterministic: the same config and options give the same result.
CampaignResult run_campaign(const ScenarioConfig& sc, const CampaignOptions& opts = {});

enum class ReportFormat : std::uint8_t { kHuman, kRecords };

std::string emit_report(const CampaignResult& result, ReportFormat format);
/// Digest of the records rendering; stable for identical inputs.
std::string report_digest(const CampaignResult& result);

/// Per-family register counts of an initialized bank and their total, as
/// printed in reports.
std::string register_count_line(const RegisterBank& bank);
/// Footnote on the Init/Ack register count.
std::string_view register_count_footnote();

}  // namespace bzreg
