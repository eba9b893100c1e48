#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "bzreg/checker.hpp"
#include "bzreg/error.hpp"
#include "bzreg/timestamp.hpp"
#include "fixtures.hpp"

namespace bzreg {
namespace {

using testing::entry;
using testing::pt;
using testing::ws;

// Oracle for WS(IS): intersect the members' entry sets by brute force.
std::set<WitnessEntry> brute_intersection(const InformSet& is) {
  std::set<WitnessEntry> common(is.members.front().entries.begin(),
                                is.members.front().entries.end());
  for (const auto& m : is.members) {
    std::set<WitnessEntry> next;
    for (const auto& e : m.entries) {
      if (common.count(e)) next.insert(e);
    }
    common = std::move(next);
  }
  return common;
}

// Oracle for ↦ straight from its definition: over the common witnesses,
// every stamp of a is <= b's and at least one is strictly smaller.
bool mapsto(const std::vector<WitnessEntry>& a, const std::vector<WitnessEntry>& b) {
  bool strict = false;
  for (const auto& x : a) {
    for (const auto& y : b) {
      if (x.witness != y.witness) continue;
      if (x.stamp > y.stamp) return false;
      if (x.stamp < y.stamp) strict = true;
    }
  }
  return strict;
}

WitnessSet member(int signer, std::vector<WitnessEntry> entries) {
  WitnessSet w;
  w.signer = signer;
  w.entries = std::move(entries);
  return w;
}

TEST(WsOf, IdenticalMembers) {
  const auto cfg = Config::make(4, 1);
  const auto e = ws({{1, 1}, {2, 1}, {3, 1}});
  InformSet is{{member(1, e), member(2, e), member(3, e)}};
  EXPECT_EQ(ws_of(is, cfg), e);
}

TEST(WsOf, ExtraEntryInOneMemberIsDropped) {
  const auto cfg = Config::make(4, 1);
  const auto e = ws({{1, 1}, {2, 1}, {3, 1}});
  auto wider = e;
  wider.push_back(entry(4, 1));
  InformSet is{{member(1, e), member(2, wider), member(3, e)}};
  const auto got = ws_of(is, cfg);
  const auto want = brute_intersection(is);
  EXPECT_EQ(std::set<WitnessEntry>(got.begin(), got.end()), want);
  EXPECT_EQ(got.size(), 3u);
}

TEST(WsOf, TwoCommonEntriesIsInvalid) {
  const auto cfg = Config::make(4, 1);
  InformSet is{{member(1, ws({{1, 1}, {2, 1}, {3, 1}})),
                member(2, ws({{1, 1}, {2, 1}, {4, 1}})),
                member(3, ws({{1, 1}, {2, 1}, {3, 1}, {4, 1}}))}};
  ASSERT_EQ(brute_intersection(is).size(), 2u);
  try {
    ws_of(is, cfg);
    FAIL() << "expected InvalidInformSet";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidInformSet);
  }
}

TEST(WsOf, TooFewMembersIsInvalid) {
  const auto cfg = Config::make(4, 1);
  const auto e = ws({{1, 1}, {2, 1}, {3, 1}});
  InformSet is{{member(1, e), member(2, e)}};
  EXPECT_THROW(ws_of(is, cfg), Error);
}

TEST(WsOf, RandomizedAgainstIntersection) {
  const auto cfg = Config::make(4, 1);
  std::mt19937_64 rng(7);
  for (int round = 0; round < 2000; ++round) {
    InformSet is;
    const int members = 3 + static_cast<int>(rng() % 2);
    for (int m = 1; m <= members; ++m) {
      std::vector<WitnessEntry> entries;
      for (int w = 1; w <= 4; ++w) {
        if (rng() % 5 == 0) continue;
        entries.push_back(entry(w, 1 + rng() % 2));
      }
      is.members.push_back(member(m, entries));
    }
    const auto want = brute_intersection(is);
    if (want.size() >= 3) {
      const auto got = ws_of(is, cfg);
      EXPECT_EQ(std::set<WitnessEntry>(got.begin(), got.end()), want);
    } else {
      EXPECT_THROW(ws_of(is, cfg), Error);
    }
  }
}

TEST(PartialTimestamp, ReadsOffWs) {
  const auto cfg = Config::make(4, 1);
  const auto e = ws({{1, 2}, {2, 2}, {3, 2}});
  EXPECT_EQ(partial_timestamp(e, cfg), pt({2, 2, 2, std::nullopt}));
}

TEST(PartialTimestamp, InitialSetIsAllZero) {
  const auto cfg = Config::make(4, 1);
  const auto init = initial_entries(cfg, "u0");
  InformSet is{{member(1, init), member(2, init), member(3, init), member(4, init)}};
  EXPECT_EQ(partial_timestamp(is, cfg), pt({0, 0, 0, 0}));
}

TEST(PartialTimestamp, MalformedInformSetPropagates) {
  const auto cfg = Config::make(4, 1);
  InformSet is;
  EXPECT_THROW(partial_timestamp(is, cfg), Error);
}

TEST(MapstoCompare, Examples) {
  const auto cfg = Config::make(4, 1);
  const auto a = ws({{1, 1}, {2, 1}, {3, 1}});
  const auto b = ws({{1, 2}, {2, 2}, {3, 2}}, 2, "b");
  ASSERT_TRUE(mapsto(a, b));
  EXPECT_EQ(mapsto_compare(a, b, cfg), OrderVerdict::kBefore);
  EXPECT_EQ(mapsto_compare(b, a, cfg), OrderVerdict::kAfter);
  EXPECT_EQ(mapsto_compare(a, a, cfg), OrderVerdict::kEqual);

  const auto c = ws({{1, 2}, {2, 1}, {3, 1}});
  const auto d = ws({{1, 1}, {2, 2}, {3, 1}}, 2, "b");
  ASSERT_FALSE(mapsto(c, d));
  ASSERT_FALSE(mapsto(d, c));
  EXPECT_EQ(mapsto_compare(c, d, cfg), OrderVerdict::kConcurrent);
}

TEST(MapstoCompare, CommonQuorumTooSmall) {
  const auto cfg = Config::make(4, 1);  // needs 2 common witnesses
  try {
    mapsto_compare(ws({{1, 1}, {2, 1}, {3, 1}}), ws({{3, 2}, {4, 2}}), cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCommonQuorumTooSmall);
  }
}

TEST(MapstoCompare, EqualStampsDifferentValues) {
  const auto cfg = Config::make(4, 1);
  try {
    mapsto_compare(ws({{1, 1}, {2, 1}, {3, 1}}), ws({{1, 1}, {2, 1}, {3, 1}}, 1, "b"), cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEqualStampsDifferentValue);
  }
}

TEST(MapstoCompare, RandomizedAgainstDefinition) {
  const auto cfg = Config::make(4, 1);
  std::mt19937_64 rng(11);
  auto random_ws = [&](std::uint64_t k) {
    std::vector<WitnessEntry> out;
    const int skip = static_cast<int>(rng() % 5);  // 0: keep all four
    for (int w = 1; w <= 4; ++w) {
      if (w != skip) out.push_back(entry(w, rng() % 3, k, "v" + std::to_string(k)));
    }
    return out;
  };
  int checked = 0;
  for (int round = 0; round < 5000; ++round) {
    const auto a = random_ws(1 + rng() % 2);
    const auto b = random_ws(1 + rng() % 2);
    const bool ab = mapsto(a, b);
    const bool ba = mapsto(b, a);
    OrderVerdict got;
    try {
      got = mapsto_compare(a, b, cfg);
    } catch (const Error& e) {
      // Only possible when every common stamp agrees and values differ.
      EXPECT_EQ(e.code(), ErrorCode::kEqualStampsDifferentValue);
      EXPECT_FALSE(ab || ba);
      EXPECT_NE(a.front().value, b.front().value);
      continue;
    }
    ++checked;
    if (ab) {
      EXPECT_EQ(got, OrderVerdict::kBefore);
    } else if (ba) {
      EXPECT_EQ(got, OrderVerdict::kAfter);
    } else if (got != OrderVerdict::kConcurrent) {
      EXPECT_EQ(got, OrderVerdict::kEqual);
    }
    // Symmetry under argument swap.
    EXPECT_EQ(mapsto_compare(b, a, cfg), reverse(got));
  }
  EXPECT_GT(checked, 1000);
}

TEST(MapstoCompare, TransitiveOnBefore) {
  const auto cfg = Config::make(4, 1);
  std::mt19937_64 rng(3);
  auto random_ws = [&] {
    std::vector<WitnessEntry> out;
    const Stamp base = rng() % 4;
    for (int w = 1; w <= 4; ++w) out.push_back(entry(w, base + rng() % 2));
    return out;
  };
  int chains = 0;
  for (int round = 0; round < 20000; ++round) {
    const auto a = random_ws(), b = random_ws(), c = random_ws();
    try {
      if (mapsto_compare(a, b, cfg) == OrderVerdict::kBefore &&
          mapsto_compare(b, c, cfg) == OrderVerdict::kBefore) {
        ++chains;
        EXPECT_EQ(mapsto_compare(a, c, cfg), OrderVerdict::kBefore);
      }
    } catch (const Error&) {
    }
  }
  EXPECT_GT(chains, 100);
}

TEST(VecCompare, Examples) {
  EXPECT_EQ(vec_compare({{1, 1, 1, 0}}, {{2, 2, 2, 0}}), OrderVerdict::kBefore);
  EXPECT_EQ(vec_compare({{0, 0, 0, 0}}, {{0, 0, 0, 0}}), OrderVerdict::kEqual);
  EXPECT_EQ(vec_compare({{1, 0, 0, 0}}, {{0, 1, 0, 0}}), OrderVerdict::kConcurrent);
  EXPECT_THROW(vec_compare({{1, 0}}, {{1, 0, 0}}), Error);
}

TEST(VecCompare, PartialOrderOnRandomTriples) {
  std::mt19937_64 rng(5);
  auto random_vec = [&] {
    FullTimestamp f;
    for (int i = 0; i < 3; ++i) f.vec.push_back(rng() % 3);
    return f;
  };
  for (int round = 0; round < 5000; ++round) {
    const auto a = random_vec(), b = random_vec(), c = random_vec();
    EXPECT_EQ(vec_compare(a, a), OrderVerdict::kEqual);
    EXPECT_EQ(vec_compare(a, b), reverse(vec_compare(b, a)));
    if (vec_compare(a, b) == OrderVerdict::kBefore && vec_compare(b, c) == OrderVerdict::kBefore) {
      EXPECT_EQ(vec_compare(a, c), OrderVerdict::kBefore);
    }
  }
}

TEST(FullTimestamps, HandExecutedChain) {
  const auto cfg = Config::make(4, 1);
  const auto full = build_full_timestamps(
      {pt({1, 1, 1, std::nullopt}), pt({2, 2, 2, std::nullopt})}, cfg);
  ASSERT_EQ(full.size(), 2u);
  EXPECT_EQ(full[0].vec, (std::vector<Stamp>{1, 1, 1, 0}));
  EXPECT_EQ(full[1].vec, (std::vector<Stamp>{2, 2, 2, 0}));
}

TEST(FullTimestamps, InheritsAbsentComponents) {
  const auto cfg = Config::make(4, 1);
  const auto full = build_full_timestamps(
      {pt({1, 1, 1, std::nullopt}), pt({std::nullopt, 2, 2, 2})}, cfg);
  ASSERT_EQ(full.size(), 2u);
  EXPECT_EQ(full[1].vec, (std::vector<Stamp>{1, 2, 2, 2}));
}

TEST(FullTimestamps, EmptyChain) {
  EXPECT_TRUE(build_full_timestamps({}, Config::make(4, 1)).empty());
}

TEST(FullTimestamps, NonIncreasingLinkIsAnInvariantBreak) {
  const auto cfg = Config::make(4, 1);
  try {
    build_full_timestamps({pt({2, 2, 2, std::nullopt}), pt({1, 2, 2, std::nullopt})}, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvariantBroken);
  }
}

}  // namespace
}  // namespace bzreg
