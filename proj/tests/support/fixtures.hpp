#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "bzreg/crypto.hpp"
#include "bzreg/engine.hpp"
#include "bzreg/types.hpp"

namespace bzreg::testing {

inline std::filesystem::path scenario_path(const std::string& name) {
  return std::filesystem::path(BZREG_SCENARIO_DIR) / (name + ".json");
}

inline WitnessEntry entry(int witness, Stamp stamp, std::uint64_t k = 1, Bytes u = "a") {
  return WitnessEntry{TaggedValue{k, std::move(u)}, stamp, witness};
}

/// Entries of one value, one per (witness, stamp) pair.
inline std::vector<WitnessEntry> ws(std::initializer_list<std::pair<int, Stamp>> stamps,
                                    std::uint64_t k = 1, const Bytes& u = "a") {
  std::vector<WitnessEntry> out;
  for (auto [w, s] : stamps) out.push_back(entry(w, s, k, u));
  return out;
}

inline PartialTimestamp pt(std::initializer_list<std::optional<Stamp>> stamps) {
  return PartialTimestamp{std::vector<std::optional<Stamp>>(stamps)};
}

/// Fault-free spec: one write of each payload, `reads` reads per reader.
inline RunSpec fault_free(int n, int t, std::vector<Bytes> payloads, int reads_per_reader,
                          ScheduleSpec::Kind kind = ScheduleSpec::Kind::kRoundRobin,
                          std::uint64_t seed = 0) {
  RunSpec spec;
  spec.cfg = Config::make(n, t);
  for (auto& p : payloads) spec.workload.writes.push_back(WriteOp{std::move(p), 0});
  for (int i = 1; i <= n; ++i) {
    spec.workload.reads[i] = std::vector<ReadOp>(reads_per_reader, ReadOp{1});
  }
  spec.schedule.kind = kind;
  spec.schedule.seed = seed;
  spec.schedule.fairness = kind == ScheduleSpec::Kind::kSeededRandom ? 4 : 0;
  return spec;
}

}  // namespace bzreg::testing
