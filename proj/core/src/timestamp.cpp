#include "bzreg/timestamp.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "bzreg/error.hpp"

namespace bzreg {

std::vector<WitnessEntry> ws_of(const InformSet& is, const Config& cfg) {
  const auto quorum = static_cast<std::size_t>(cfg.quorum());
  if (is.members.size() < quorum || is.members.empty()) {
    throw Error(ErrorCode::kInvalidInformSet,
                "inform set has " + std::to_string(is.members.size()) +
                    " members, needs " + std::to_string(quorum));
  }
  std::vector<WitnessEntry> common = is.members.front().entries;
  for (std::size_t m = 1; m < is.members.size() && !common.empty(); ++m) {
    const auto& other = is.members[m].entries;
    std::erase_if(common, [&](const WitnessEntry& e) {
      return std::find(other.begin(), other.end(), e) == other.end();
    });
  }
  std::sort(common.begin(), common.end(),
            [](const auto& a, const auto& b) { return a.witness < b.witness; });
  common.erase(std::unique(common.begin(), common.end()), common.end());

  if (common.size() < quorum) {
    throw Error(ErrorCode::kInvalidInformSet,
                "only " + std::to_string(common.size()) +
                    " common entries, needs " + std::to_string(quorum));
  }
  for (std::size_t i = 1; i < common.size(); ++i) {
    if (common[i].value != common[0].value) {
      throw Error(ErrorCode::kInvalidInformSet,
                  "common entries carry different tagged values");
    }
    if (common[i].witness == common[i - 1].witness) {
      throw Error(ErrorCode::kInvalidInformSet,
                  "two common entries from one witness");
    }
  }
  return common;
}

PartialTimestamp partial_timestamp(std::span<const WitnessEntry> ws,
                                   const Config& cfg) {
  PartialTimestamp pt;
  pt.stamps.assign(cfg.n, std::nullopt);
  for (const auto& e : ws) {
    if (e.witness >= 1 && e.witness <= cfg.n) pt.stamps[e.witness - 1] = e.stamp;
  }
  return pt;
}

PartialTimestamp partial_timestamp(const InformSet& is, const Config& cfg) {
  return partial_timestamp(ws_of(is, cfg), cfg);
}

OrderVerdict mapsto_compare(std::span<const WitnessEntry> a,
                            std::span<const WitnessEntry> b,
                            const Config& cfg) {
  std::map<int, const WitnessEntry*> by_witness;
  for (const auto& e : a) by_witness[e.witness] = &e;

  int common = 0;
  bool some_less = false;
  bool some_greater = false;
  for (const auto& eb : b) {
    auto it = by_witness.find(eb.witness);
    if (it == by_witness.end()) continue;
    ++common;
    const Stamp sa = it->second->stamp;
    if (sa < eb.stamp) some_less = true;
    if (sa > eb.stamp) some_greater = true;
  }
  if (common < cfg.common_quorum()) {
    throw Error(ErrorCode::kCommonQuorumTooSmall,
                std::to_string(common) + " common witnesses, needs " +
                    std::to_string(cfg.common_quorum()));
  }
  if (some_less && some_greater) return OrderVerdict::kConcurrent;
  if (some_less) return OrderVerdict::kBefore;
  if (some_greater) return OrderVerdict::kAfter;
  if (a.front().value != b.front().value) {
    std::ostringstream os;
    os << "equal common stamps for " << a.front().value << " and "
       << b.front().value;
    throw Error(ErrorCode::kEqualStampsDifferentValue, os.str());
  }
  return OrderVerdict::kEqual;
}

OrderVerdict vec_compare(const FullTimestamp& a, const FullTimestamp& b) {
  if (a.vec.size() != b.vec.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                std::to_string(a.vec.size()) + " vs " +
                    std::to_string(b.vec.size()));
  }
  bool less = false;
  bool greater = false;
  for (std::size_t i = 0; i < a.vec.size(); ++i) {
    less |= a.vec[i] < b.vec[i];
    greater |= a.vec[i] > b.vec[i];
  }
  if (less && greater) return OrderVerdict::kConcurrent;
  if (less) return OrderVerdict::kBefore;
  if (greater) return OrderVerdict::kAfter;
  return OrderVerdict::kEqual;
}

}  // namespace bzreg
