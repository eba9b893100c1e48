#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string_view>
#include <vector>

#include "bzreg/process.hpp"
#include "bzreg/protocol.hpp"
#include "bzreg/types.hpp"

namespace bzreg {

class KeyRing;

/// One Init write inside a scripted HLI write.
struct ScriptedInit {
  int reader = 0;
  TaggedValue kv;
};

struct WriterStrategy {
  enum class Kind : std::uint8_t {
    kCorrect,
    kSplitValue,       // <c, assignment[i]> to each listed reader only
    kPartialQuorum,    // <c, u> to `targets` only
    kMultiValueBurst,  // one fresh <c, v> per v in `values`, each to all
    kOverwriteEarly,   // <c, u> to all, then `delay` idle steps, no acks
    kStaleCounter,     // <k, u> to all with a fixed k, then await acks
    kScripted,         // explicit Init writes per HLI op
  };

  Kind kind = Kind::kCorrect;
  std::map<int, Bytes> assignment;
  std::vector<int> targets;
  std::vector<Bytes> values;
  int delay = 0;
  std::uint64_t k = 1;
  std::vector<std::vector<ScriptedInit>> script;
  bool await_acks = false;  // kScripted: wait for n-t fresh acks of the last kv

  bool byzantine() const noexcept { return kind != Kind::kCorrect; }
};

/// A witness-entry set the colluders co-sign, and where each colluder
/// writes the resulting inform set.
struct CollusionPlan {
  std::vector<WitnessEntry> entries;
  std::map<int, std::vector<int>> finals;  // colluder -> R_final targets
};

struct ReaderStrategy {
  enum class Kind : std::uint8_t {
    kCorrect,
    kSilent,                // never takes a step
    kFakeWitnessStamp,      // published stamps inflated by `offset`
    kOutOfOrderWitness,     // every `period` iterations republishes an older entry
    kForgeInformSet,        // inform/final rows carry unverifiable signatures
    kEquivocate,            // per-peer payloads under one stamp
    kCollaborateStabilize,  // acts as if a value seen from peers had reached its Init
    kAlternateWitness,      // cycles `values` every `period` iterations, fresh stamp each
    kColludeQuorum,         // co-signs `plans` with `colluders`, writes them to finals
  };

  Kind kind = Kind::kCorrect;
  Stamp offset = 10;
  int period = 3;
  std::map<int, Bytes> payloads;
  std::vector<TaggedValue> values;
  std::vector<int> colluders;
  std::vector<CollusionPlan> plans;

  bool byzantine() const noexcept { return kind != Kind::kCorrect; }
};

std::string_view to_string(WriterStrategy::Kind kind);
std::string_view to_string(ReaderStrategy::Kind kind);
/// Throw Error(kScenarioConfig) on unknown names.
WriterStrategy::Kind writer_kind_from_string(std::string_view name);
ReaderStrategy::Kind reader_kind_from_string(std::string_view name);

const std::vector<WriterStrategy::Kind>& all_writer_kinds();
const std::vector<ReaderStrategy::Kind>& all_reader_kinds();

/// Seeded parameters for campaign sweeps, so that every strategy actually
/// misbehaves. `ops` bounds the Scripted writer's script length.
WriterStrategy sample_writer_strategy(WriterStrategy::Kind kind, const Config& cfg,
                                      std::uint64_t seed, int ops = 20);
ReaderStrategy sample_reader_strategy(ReaderStrategy::Kind kind, const Config& cfg,
                                      int self, std::uint64_t seed);

std::shared_ptr<const WritePlanner> make_write_planner(const WriterStrategy& s);

/// The machine for reader `index`. Byzantine strategies other than the
/// hook-based ones ignore `reads`.
std::unique_ptr<ProcessMachine> make_reader_machine(const Config& cfg,
                                                    const Bytes& u0, int index,
                                                    const ReaderStrategy& s,
                                                    std::vector<ReadOp> reads,
                                                    const KeyRing& ring);

}  // namespace bzreg
