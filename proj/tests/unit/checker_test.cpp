#include <gtest/gtest.h>

#include <set>

#include "bzreg/checker.hpp"
#include "bzreg/timestamp.hpp"
#include "bzreg/crypto.hpp"
#include "bzreg/engine.hpp"
#include "bzreg/error.hpp"
#include "bzreg/scenario.hpp"
#include "fixtures.hpp"
#include "wing_gong.hpp"

namespace bzreg {
namespace {

// Writes a then b, then reader 1 and reader 2 each read twice well after
// both writes finished.
RunSpec sequential_two_writes() {
  RunSpec spec = testing::fault_free(4, 1, {"a", "b"}, 0);
  spec.workload.reads[1] = {ReadOp{25}, ReadOp{1}};
  spec.workload.reads[2] = {ReadOp{25}, ReadOp{1}};
  return spec;
}

struct Checked {
  KeyRing ring{4, SignatureKind::kKeyedDigest};
  ExecutionHistory h;
  CheckReport rep;
};

// Indices of read responses by `reader`, in order.
std::vector<std::size_t> responses_of(const ExecutionHistory& h, int reader) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < h.hli.size(); ++i) {
    const auto& e = h.hli[i];
    if (e.op == HliOp::kRead && e.kind == HliKind::kResponse && e.process.index == reader) out.push_back(i);
  }
  return out;
}

void make_return(ExecutionHistory& h, std::size_t idx, const CheckReport& rep, const TaggedValue& v) {
  for (const auto& s : rep.stabs) {
    if (s.value == v) {
      h.hli[idx].value = v;
      h.hli[idx].evidence = s.ws;
      return;
    }
  }
  FAIL() << "no stabilization of " << v;
}

std::set<TaggedValue> stabilized_values(const CheckReport& rep) {
  std::set<TaggedValue> out;
  for (const auto& s : rep.stabs) out.insert(s.value);
  return out;
}

TEST(Stabilization, InitializerCounts) {
  auto spec = testing::fault_free(4, 1, {}, 1);
  KeyRing ring(4, spec.crypto);
  const auto stabs = detect_stabilizations(run(spec, ring), ring);
  ASSERT_EQ(stabs.size(), 1u);
  EXPECT_EQ(stabs[0].step, 0u);
  EXPECT_EQ(stabs[0].value, initial_value("u0"));
  EXPECT_EQ(stabs[0].ws, initial_entries(spec.cfg, "u0"));
}

TEST(Stabilization, SingleCorrectWriteStabilizesOneValue) {
  auto spec = testing::fault_free(4, 1, {"a"}, 1);
  KeyRing ring(4, spec.crypto);
  const auto rep = check_all(run(spec, ring), ring);
  EXPECT_EQ(stabilized_values(rep), (std::set<TaggedValue>{initial_value("u0"), {1, "a"}}));
  ASSERT_TRUE(rep.chain);
  EXPECT_EQ(rep.chain->classes.size(), 2u);
  EXPECT_TRUE(rep.violated_properties().empty());
}

TEST(Classification, CorrectWriterRunIsAllCorrect) {
  auto spec = testing::fault_free(4, 1, {"a", "b", "c"}, 2, ScheduleSpec::Kind::kSeededRandom, 4);
  KeyRing ring(4, spec.crypto);
  const auto h = run(spec, ring);
  const auto classes = classify_writes(h, detect_stabilizations(h, ring));
  ASSERT_EQ(classes.values.size(), 4u);
  for (const auto& ev : classes.values) {
    EXPECT_EQ(ev.cls, WriteClass::kCorrect) << ev.value;
    EXPECT_TRUE(ev.initial || ev.correct_op >= 0);
  }
}

TEST(Checks, ReadBeforeAnyWritePasses) {
  auto spec = testing::fault_free(4, 1, {}, 2);
  KeyRing ring(4, spec.crypto);
  const auto rep = check_all(run(spec, ring), ring);
  EXPECT_TRUE(rep.violated_properties().empty());
  EXPECT_FALSE(rep.verdict(property::kRegisterLinearizability)->violated());
}

TEST(Checks, NewOldInversionIsCaught) {
  Checked c;
  c.h = run(sequential_two_writes(), c.ring);
  c.rep = check_all(c.h, c.ring);
  ASSERT_TRUE(c.rep.violated_properties().empty());
  const auto r1 = responses_of(c.h, 1);
  ASSERT_EQ(r1.size(), 2u);
  ASSERT_EQ(*c.h.hli[r1[0]].value, (TaggedValue{2, "b"}));

  auto bad = c.h;
  make_return(bad, r1[1], c.rep, TaggedValue{1, "a"});
  const auto rep = check_all(bad, c.ring);
  EXPECT_TRUE(rep.violated(property::kRegisterLinearizability));
  EXPECT_FALSE(oracle::linearizable(bad));
}

TEST(Checks, TotalOrderingOfReadsIsCaught) {
  Checked c;
  c.h = run(sequential_two_writes(), c.ring);
  c.rep = check_all(c.h, c.ring);
  // Reader 1 sees a then b, reader 2 sees b then a.
  auto bad = c.h;
  const auto r1 = responses_of(bad, 1);
  const auto r2 = responses_of(bad, 2);
  make_return(bad, r1[0], c.rep, TaggedValue{1, "a"});
  make_return(bad, r1[1], c.rep, TaggedValue{2, "b"});
  make_return(bad, r2[0], c.rep, TaggedValue{2, "b"});
  make_return(bad, r2[1], c.rep, TaggedValue{1, "a"});
  EXPECT_TRUE(check_all(bad, c.ring).violated(property::kTotalOrderingReads));
}

TEST(Checks, SingleReaderTotalOrderingIsVacuous) {
  auto spec = testing::fault_free(4, 1, {"a"}, 0);
  spec.workload.reads[1] = {ReadOp{0}, ReadOp{3}};
  KeyRing ring(4, spec.crypto);
  const auto rep = check_all(run(spec, ring), ring);
  EXPECT_FALSE(rep.violated(property::kTotalOrderingReads));
}

TEST(Checks, ViewConsistencyAfterQuiescence) {
  Checked c;
  c.h = run(sequential_two_writes(), c.ring);
  c.rep = check_all(c.h, c.ring);
  EXPECT_FALSE(c.rep.violated(property::kViewConsistency));
  // Make the later read at reader 2 fall back to the older value.
  auto bad = c.h;
  make_return(bad, responses_of(bad, 2)[1], c.rep, TaggedValue{1, "a"});
  EXPECT_TRUE(check_all(bad, c.ring).violated(property::kViewConsistency));
}

TEST(Checks, ViewConsistencyVacuousUnderChurn) {
  WriterStrategy w;
  w.kind = WriterStrategy::Kind::kOverwriteEarly;
  w.delay = 0;
  RunSpec spec = testing::fault_free(4, 1, {"a", "b", "c", "d"}, 1);
  spec.writer = w;
  spec.cfg.writer_byzantine = true;
  for (auto& op : spec.workload.writes) op.idle_before = 40;
  KeyRing ring(4, spec.crypto);
  const auto h = run(spec, ring);
  EXPECT_FALSE(check_all(h, ring).violated(property::kViewConsistency));
}

TEST(Checks, EquivocatingWriterWithQuiescentTail) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RunSpec spec = testing::fault_free(4, 1, {"a"}, 0, ScheduleSpec::Kind::kSeededRandom, seed);
    spec.writer.kind = WriterStrategy::Kind::kSplitValue;
    spec.writer.assignment = {{1, "a"}, {2, "a"}, {3, "a"}, {4, "b"}};
    spec.cfg.writer_byzantine = true;
    for (int i = 1; i <= 4; ++i) spec.workload.reads[i] = {ReadOp{10}, ReadOp{2}};
    KeyRing ring(4, spec.crypto);
    const auto rep = check_all(run(spec, ring), ring);
    EXPECT_TRUE(rep.violated_properties().empty()) << seed;
  }
}

TEST(Checks, SuspectingACorrectReaderIsADiagnosticViolation) {
  auto spec = testing::fault_free(4, 1, {"a"}, 1);
  KeyRing ring(4, spec.crypto);
  auto h = run(spec, ring);
  ASSERT_FALSE(check_all(h, ring).violated(property::kDiagnostics));
  h.diagnostics.push_back(Diagnostic{5, ProcessId::reader(1), ErrorCode::kSuspectedProcess, "test", 2});
  EXPECT_TRUE(check_all(h, ring).violated(property::kDiagnostics));
}

TEST(Checks, TamperedTraceFailsReplay) {
  auto spec = testing::fault_free(2, 0, {"a"}, 1);
  KeyRing ring(2, spec.crypto);
  auto h = run(spec, ring);
  for (auto& t : h.trace) {
    if (t.op == RegOp::kRead) {
      t.value = std::make_shared<const Bytes>("garbage");
      break;
    }
  }
  EXPECT_TRUE(check_all(h, ring).violated(property::kReplay));
}

TEST(Checks, TotalOrderAndGenuineAdvanceVacuousOnOneStabilization) {
  const auto cfg = Config::make(4, 1);
  KeyRing ring(4, SignatureKind::kKeyedDigest);
  auto spec = testing::fault_free(4, 1, {}, 1);
  const auto stabs = detect_stabilizations(run(spec, ring), ring);
  ASSERT_EQ(stabs.size(), 1u);
  EXPECT_FALSE(check_total_order(stabs, cfg).violated());
  const auto chain = build_chain(stabs, cfg);
  EXPECT_FALSE(check_genuine_advance(stabs, chain, {}, cfg).violated());
}

TEST(FullTimestamps, IsomorphicToChainOnRandomRuns) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto spec = testing::fault_free(4, 1, {"a", "b", "c", "d"}, 2, ScheduleSpec::Kind::kSeededRandom, seed);
    KeyRing ring(4, spec.crypto);
    const auto rep = check_all(run(spec, ring), ring);
    ASSERT_TRUE(rep.chain);
    ASSERT_EQ(rep.full.size() + 1, rep.chain->classes.size());
    for (std::size_t i = 0; i + 1 < rep.full.size(); ++i) {
      EXPECT_EQ(vec_compare(rep.full[i], rep.full[i + 1]), OrderVerdict::kBefore);
      for (std::size_t j = i + 1; j < rep.full.size(); ++j) {
        EXPECT_EQ(vec_compare(rep.full[i], rep.full[j]), OrderVerdict::kBefore);
      }
    }
    EXPECT_FALSE(rep.violated(property::kFullTimestamps));
  }
}

TEST(Linearization, FaultFreeFollowsRealTime) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto spec = testing::fault_free(4, 1, {"a", "b", "c"}, 2, ScheduleSpec::Kind::kSeededRandom, seed);
    KeyRing ring(4, spec.crypto);
    const auto h = run(spec, ring);
    const auto rep = check_all(h, ring);
    ASSERT_FALSE(rep.violated(property::kByzantineLinearization)) << seed;
    EXPECT_TRUE(oracle::linearizable(h)) << seed;
    std::size_t writes = 0;
    for (const auto& op : rep.linearization) {
      EXPECT_FALSE(op.synthetic);
      writes += op.kind == LinearizedOp::Kind::kWrite;
    }
    EXPECT_EQ(writes, 3u);
  }
}

TEST(Linearization, EmptyWorkloadIsEmpty) {
  auto spec = testing::fault_free(4, 1, {}, 0);
  KeyRing ring(4, spec.crypto);
  const auto h = run(spec, ring);
  const auto stabs = detect_stabilizations(h, ring);
  const auto chain = build_chain(stabs, h.cfg);
  EXPECT_TRUE(build_byzantine_linearization(h, stabs, chain).empty());
}

TEST(Linearization, PseudoCorrectWriteIsInsertedBeforeItsFirstRead) {
  const auto sc = load_scenario(testing::scenario_path("pseudo_correct_collaboration"));
  const auto spec = spec_for_seed(sc, sc.first_seed);
  KeyRing ring(spec.cfg.n, spec.crypto, spec.key_seed);
  const auto h = run(spec, ring);
  const auto rep = check_all(h, ring);
  ASSERT_TRUE(rep.violated_properties().empty());
  const TaggedValue x{1, "x"};
  const auto* ev = rep.classes.find(x);
  ASSERT_NE(ev, nullptr);
  EXPECT_EQ(ev->cls, WriteClass::kPseudoCorrect);

  std::optional<std::size_t> synthetic, first_read;
  for (std::size_t i = 0; i < rep.linearization.size(); ++i) {
    const auto& op = rep.linearization[i];
    if (op.value != x) continue;
    if (op.kind == LinearizedOp::Kind::kWrite && op.synthetic && !synthetic) synthetic = i;
    if (op.kind == LinearizedOp::Kind::kRead && !first_read) first_read = i;
  }
  ASSERT_TRUE(synthetic);
  ASSERT_TRUE(first_read);
  EXPECT_LT(*synthetic, *first_read);
}

TEST(CheckAll, RandomSweepAllPass) {
  for (std::uint64_t seed = 100; seed < 140; ++seed) {
    RunSpec spec;
    spec.cfg = Config::make(4, 1);
    spec.workload = random_workload(seed, {1, 2, 3, 4}, {6, 10, 20, 2});
    spec.schedule.seed = seed;
    spec.schedule.fairness = 4;
    KeyRing ring(4, spec.crypto);
    const auto rep = check_all(run(spec, ring), ring);
    EXPECT_TRUE(rep.violated_properties().empty()) << seed;
  }
}

}  // namespace
}  // namespace bzreg
