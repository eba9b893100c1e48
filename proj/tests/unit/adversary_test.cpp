#include <gtest/gtest.h>

#include "bzreg/adversary.hpp"
#include "bzreg/checker.hpp"
#include "bzreg/crypto.hpp"
#include "bzreg/engine.hpp"
#include "bzreg/error.hpp"
#include "fixtures.hpp"

namespace bzreg {
namespace {

RunSpec byzantine_writer(WriterStrategy w, std::vector<Bytes> payloads) {
  RunSpec spec = testing::fault_free(4, 1, std::move(payloads), 0);
  spec.writer = std::move(w);
  spec.cfg.writer_byzantine = true;
  spec.tail_steps = 3000;
  return spec;
}

const ValueEvidence* evidence_for(const WriteClassification& c, TaggedValue v) {
  return c.find(v);
}

TEST(ByzantineWriter, SplitValueReachesNoQuorum) {
  WriterStrategy w;
  w.kind = WriterStrategy::Kind::kSplitValue;
  w.assignment = {{1, "a"}, {2, "a"}, {3, "b"}, {4, "b"}};
  const auto spec = byzantine_writer(w, {"a"});
  KeyRing ring(4, spec.crypto);
  const auto h = run(spec, ring);
  const auto stabs = detect_stabilizations(h, ring);
  const auto classes = classify_writes(h, stabs);
  for (const Bytes& u : {"a", "b"}) {
    const auto* ev = evidence_for(classes, TaggedValue{1, u});
    ASSERT_NE(ev, nullptr) << u;
    EXPECT_EQ(ev->cls, WriteClass::kNeither) << u;
    EXPECT_EQ(ev->support.size(), 2u);
  }
  EXPECT_EQ(stabs.size(), 1u);  // only the initializer
}

TEST(ByzantineWriter, PartialQuorumIsPotentialPseudoCorrect) {
  WriterStrategy w;
  w.kind = WriterStrategy::Kind::kPartialQuorum;
  w.targets = {1, 2, 3};
  const auto spec = byzantine_writer(w, {"a"});
  KeyRing ring(4, spec.crypto);
  const auto h = run(spec, ring);
  const auto stabs = detect_stabilizations(h, ring);
  const auto* ev = evidence_for(classify_writes(h, stabs), TaggedValue{1, "a"});
  ASSERT_NE(ev, nullptr);
  EXPECT_TRUE(ev->cls == WriteClass::kPotentialPseudoCorrect || ev->cls == WriteClass::kPseudoCorrect);
  EXPECT_EQ(ev->support.size(), 3u);
}

TEST(ByzantineWriter, OverwriteEarlyBeforeAnyInformSetStabilizesNothing) {
  WriterStrategy w;
  w.kind = WriterStrategy::Kind::kOverwriteEarly;
  w.delay = 0;
  auto spec = byzantine_writer(w, {"a", "b", "c"});
  spec.tail_steps = 0;
  spec.schedule.kind = ScheduleSpec::Kind::kScripted;
  spec.schedule.script.assign(40, 0);
  KeyRing ring(4, spec.crypto);
  const auto h = run(spec, ring);
  const auto stabs = detect_stabilizations(h, ring);
  ASSERT_EQ(stabs.size(), 1u);
  EXPECT_EQ(stabs[0].value, initial_value(spec.u0));
}

TEST(ByzantineReader, FakeWitnessStampKeepsTotalOrder) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto spec = testing::fault_free(4, 1, {"a", "b", "c"}, 2, ScheduleSpec::Kind::kSeededRandom, seed);
    spec.readers[4].kind = ReaderStrategy::Kind::kFakeWitnessStamp;
    spec.readers[4].offset = 10;
    spec.workload.reads.erase(4);
    KeyRing ring(4, spec.crypto);
    const auto h = run(spec, ring);
    const auto rep = check_all(h, ring);
    EXPECT_TRUE(rep.violated_properties().empty()) << seed;
    // The inflated stamps are accepted, so they show up in stabilized sets.
    bool inflated = false;
    for (const auto& s : rep.stabs) {
      for (const auto& e : s.ws) inflated |= e.witness == 4 && e.stamp >= 10;
    }
    EXPECT_TRUE(inflated) << seed;
  }
}

TEST(ByzantineReader, ForgedInformSetsAreIgnored) {
  auto spec = testing::fault_free(4, 1, {"a", "b"}, 2, ScheduleSpec::Kind::kSeededRandom, 3);
  spec.readers[4].kind = ReaderStrategy::Kind::kForgeInformSet;
  spec.workload.reads.erase(4);
  KeyRing ring(4, spec.crypto);
  const auto h = run(spec, ring);
  const auto rep = check_all(h, ring);
  EXPECT_TRUE(rep.violated_properties().empty());
  bool suspected = false;
  for (const auto& d : h.diagnostics) {
    if (d.code == ErrorCode::kSuspectedProcess && d.subject == 4 && h.correct_reader(d.process.index)) {
      suspected = true;
    }
  }
  EXPECT_TRUE(suspected);
  for (const auto& s : rep.stabs) {
    EXPECT_NE(s.row_owner, 4);
  }
}

TEST(Strategies, EveryKindRespectsAccessControl) {
  const auto cfg = Config::make(4, 1);
  for (auto kind : all_reader_kinds()) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      auto spec = testing::fault_free(4, 1, {"a", "b"}, 1, ScheduleSpec::Kind::kSeededRandom, seed);
      spec.readers[4] = sample_reader_strategy(kind, cfg, 4, seed);
      if (spec.readers[4].byzantine()) spec.workload.reads.erase(4);
      KeyRing ring(4, spec.crypto);
      EXPECT_NO_THROW(run(spec, ring)) << to_string(kind);
    }
  }
  for (auto kind : all_writer_kinds()) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      auto spec = testing::fault_free(4, 1, {"a", "b", "c"}, 1, ScheduleSpec::Kind::kSeededRandom, seed);
      spec.writer = sample_writer_strategy(kind, cfg, seed, 3);
      spec.cfg.writer_byzantine = spec.writer.byzantine();
      KeyRing ring(4, spec.crypto);
      EXPECT_NO_THROW(run(spec, ring)) << to_string(kind);
    }
  }
}

TEST(Strategies, CorrectStrategyMatchesProtocol) {
  auto plain = testing::fault_free(4, 1, {"a", "b"}, 2, ScheduleSpec::Kind::kSeededRandom, 17);
  auto explicit_correct = plain;
  for (int i = 1; i <= 4; ++i) explicit_correct.readers[i] = ReaderStrategy{};
  explicit_correct.writer = WriterStrategy{};
  KeyRing ring(4, plain.crypto);
  EXPECT_EQ(history_digest(run(plain, ring)), history_digest(run(explicit_correct, ring)));
  EXPECT_EQ(export_records(run(plain, ring)), export_records(run(explicit_correct, ring)));
}

TEST(Strategies, NamesRoundTrip) {
  for (auto kind : all_reader_kinds()) EXPECT_EQ(reader_kind_from_string(to_string(kind)), kind);
  for (auto kind : all_writer_kinds()) EXPECT_EQ(writer_kind_from_string(to_string(kind)), kind);
  EXPECT_THROW(reader_kind_from_string("Nope"), Error);
}

TEST(Strategies, SamplersAreDeterministic) {
  const auto cfg = Config::make(4, 1);
  for (auto kind : all_reader_kinds()) {
    const auto a = sample_reader_strategy(kind, cfg, 4, 99);
    const auto b = sample_reader_strategy(kind, cfg, 4, 99);
    EXPECT_EQ(a.kind, b.kind);
    EXPECT_EQ(a.offset, b.offset);
    EXPECT_EQ(a.period, b.period);
    EXPECT_EQ(a.payloads, b.payloads);
    EXPECT_EQ(a.values, b.values);
  }
}

}  // namespace
}  // namespace bzreg
