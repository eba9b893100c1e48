#include <gtest/gtest.h>

#include <filesystem>
#include <nlohmann/json.hpp>
#include <sstream>

#include "bzreg/error.hpp"
#include "bzreg/scenario.hpp"
#include "fixtures.hpp"

namespace bzreg {
namespace {

ErrorCode parse_error(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInvariantBroken;
}

TEST(ParseScenario, Minimal) {
  const auto sc = parse_scenario(R"({"name": "m", "n": 4, "t": 1, "workload": {"writes": ["a"]}})");
  EXPECT_EQ(sc.name, "m");
  EXPECT_EQ(sc.base.cfg, Config::make(4, 1));
  EXPECT_EQ(sc.seeds, 1u);
  ASSERT_EQ(sc.base.workload.writes.size(), 1u);
  EXPECT_TRUE(sc.warnings.empty());
}

TEST(ParseScenario, RejectsBadInput) {
  EXPECT_EQ(parse_error("{"), ErrorCode::kScenarioConfig);
  EXPECT_EQ(parse_error(R"({"n": 4, "t": 1, "bogus": 1})"), ErrorCode::kScenarioConfig);
  EXPECT_EQ(parse_error(R"({"n": 0, "t": 0})"), ErrorCode::kScenarioConfig);
  EXPECT_EQ(parse_error(R"({"n": 4, "t": 1, "readers": {"4": {"strategy": "Nope"}}})"),
            ErrorCode::kScenarioConfig);
  EXPECT_EQ(parse_error(R"({"n": 4, "t": 1, "readers": {"9": {"strategy": "Silent"}}})"),
            ErrorCode::kScenarioConfig);
  // More Byzantine readers than t.
  EXPECT_EQ(parse_error(R"({"n": 4, "t": 1, "readers": {"3": {"strategy": "Silent"},
                                                        "4": {"strategy": "Silent"}}})"),
            ErrorCode::kScenarioConfig);
  EXPECT_EQ(parse_error(R"({"n": 4, "t": 1, "schedule": {"kind": "scripted", "script": ["r9"]}})"),
            ErrorCode::kScenarioConfig);
  EXPECT_EQ(parse_error(R"({"n": 4, "t": 1, "schedule": {"kind": "exhaustive"},
                            "workload": {"random": {}}})"),
            ErrorCode::kScenarioConfig);
}

TEST(ParseScenario, ExcessByzantineWhenAllowed) {
  const auto sc = parse_scenario(R"({"n": 4, "t": 1, "allow_excess_byzantine": true,
    "readers": {"3": {"strategy": "Silent"}, "4": {"strategy": "Silent"}}})");
  EXPECT_EQ(sc.base.byzantine_readers(), (std::vector<int>{3, 4}));
}

TEST(ParseScenario, SubThresholdWarns) {
  const auto sc = parse_scenario(R"({"n": 3, "t": 1})");
  ASSERT_EQ(sc.warnings.size(), 1u);
  const auto sc2 = parse_scenario(R"({"n": 4, "t": 2})");
  EXPECT_EQ(sc2.warnings.size(), 2u);
}

TEST(ParseScenario, ScriptTokens) {
  const auto sc = parse_scenario(R"({"n": 4, "t": 0,
    "schedule": {"kind": "scripted", "script": ["w", "r3", 2, "r1x3", "wx2"]}})");
  EXPECT_EQ(sc.base.schedule.script, (std::vector<int>{0, 3, 2, 1, 1, 1, 0, 0}));
}

TEST(ScenarioLibrary, EveryFileParses) {
  int files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(BZREG_SCENARIO_DIR)) {
    if (entry.path().extension() != ".json") continue;
    ++files;
    EXPECT_NO_THROW(load_scenario(entry.path())) << entry.path();
  }
  EXPECT_GE(files, 20);
}

CampaignResult campaign(const std::string& name, std::optional<std::uint64_t> seeds = std::nullopt) {
  CampaignOptions opts;
  opts.seeds = seeds;
  return run_campaign(load_scenario(testing::scenario_path(name)), opts);
}

TEST(ScenarioLibrary, CounterexamplesShowTheirViolation) {
  const auto alt = campaign("alternation_n3");
  EXPECT_EQ(alt.outcome, Outcome::kOk);
  EXPECT_TRUE(alt.missing.empty());
  const auto forged = campaign("forged_quorum_n4_t2");
  EXPECT_EQ(forged.outcome, Outcome::kOk);
  EXPECT_TRUE(forged.missing.empty());
}

TEST(ScenarioLibrary, SweepsPassOnAFewSeeds) {
  for (const char* name : {"fault_free_n4", "reader_alternate_witness", "reader_collude_quorum",
                           "reader_equivocate", "writer_split_value_collab", "writer_scripted",
                           "liveness_silent_reader"}) {
    const auto r = campaign(name, 10);
    EXPECT_EQ(r.outcome, Outcome::kOk) << name << "\n" << emit_report(r, ReportFormat::kHuman);
    EXPECT_EQ(r.runs, 10u);
  }
}

TEST(Outcome, MissingExpectedViolation) {
  auto sc = parse_scenario(R"({"n": 4, "t": 1, "workload": {"writes": ["a"]},
                               "expect": {"violations": ["TotalOrder"]}})");
  const auto r = run_campaign(sc);
  EXPECT_EQ(r.outcome, Outcome::kMissingExpected);
  EXPECT_EQ(exit_code(r.outcome), 3);
  EXPECT_EQ(r.missing, (std::vector<std::string>{"TotalOrder"}));
}

TEST(Outcome, UnexpectedViolationWithoutExpectBlock) {
  auto sc = load_scenario(testing::scenario_path("forged_quorum_n4_t2"));
  sc.expect = {};
  const auto r = run_campaign(sc);
  EXPECT_EQ(r.outcome, Outcome::kUnexpectedViolation);
  EXPECT_EQ(exit_code(r.outcome), 3);
}

TEST(Outcome, StarvedRunIsALivenessFailure) {
  auto sc = parse_scenario(R"({"n": 4, "t": 1, "workload": {"writes": ["a"]}, "step_limit": 300,
                               "schedule": {"kind": "scripted", "script": ["w"], "repeat": true}})");
  const auto r = run_campaign(sc);
  EXPECT_EQ(r.outcome, Outcome::kLiveness);
  EXPECT_EQ(exit_code(r.outcome), 4);
  EXPECT_EQ(r.step_limit, 1u);

  sc.expect.liveness = true;
  EXPECT_EQ(run_campaign(sc).outcome, Outcome::kOk);
}

TEST(Outcome, ExitCodes) {
  EXPECT_EQ(exit_code(Outcome::kOk), 0);
  EXPECT_EQ(exit_code(Outcome::kInternal), 5);
}

TEST(Report, RegisterLineAndFootnote) {
  const auto r = campaign("fault_free_n4", 2);
  const auto text = emit_report(r, ReportFormat::kHuman);
  EXPECT_NE(text.find("3n²+2n = 56"), std::string::npos);
  EXPECT_NE(text.find(std::string(register_count_footnote())), std::string::npos);
  EXPECT_EQ(r.registers, 56u);
}

TEST(Report, WitnessLengthIsBounded) {
  auto sc = load_scenario(testing::scenario_path("alternation_n3"));
  CampaignOptions opts;
  opts.check.max_witness = 3;
  const auto r = run_campaign(sc, opts);
  bool any = false;
  for (const auto& run : r.kept) {
    for (const auto& v : run.report.verdicts) {
      if (!v.violated()) continue;
      any = true;
      EXPECT_LE(v.witness.size(), 3u);
      EXPECT_FALSE(v.witness.empty());
    }
  }
  EXPECT_TRUE(any);
}

TEST(Report, EmptyCampaignIsValid) {
  const auto r = campaign("fault_free_n4", 0);
  EXPECT_EQ(r.runs, 0u);
  EXPECT_EQ(r.outcome, Outcome::kOk);
  EXPECT_FALSE(emit_report(r, ReportFormat::kHuman).empty());
  std::istringstream in(emit_report(r, ReportFormat::kRecords));
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) {
    EXPECT_TRUE(nlohmann::json::accept(line)) << line;
    ++lines;
  }
  EXPECT_GT(lines, 0);
}

TEST(Report, DigestIsStableAcrossReruns) {
  const auto a = campaign("reader_equivocate", 5);
  const auto b = campaign("reader_equivocate", 5);
  EXPECT_EQ(report_digest(a), report_digest(b));
  EXPECT_EQ(emit_report(a, ReportFormat::kRecords), emit_report(b, ReportFormat::kRecords));
  const auto c = campaign("reader_equivocate", 6);
  EXPECT_NE(report_digest(a), report_digest(c));
}

}  // namespace
}  // namespace bzreg
