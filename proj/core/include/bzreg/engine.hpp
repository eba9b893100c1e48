#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "bzreg/adversary.hpp"
#include "bzreg/crypto.hpp"
#include "bzreg/process.hpp"
#include "bzreg/registers.hpp"
#include "bzreg/types.hpp"

namespace bzreg {

struct Workload {
  std::vector<WriteOp> writes;
  std::map<int, std::vector<ReadOp>> reads;  // reader index -> its reads
};

struct ScheduleSpec {
  enum class Kind : std::uint8_t { kSeededRandom, kRoundRobin, kScripted };

  Kind kind = Kind::kSeededRandom;
  std::uint64_t seed = 0;
  /// Fairness constant C: with C > 0 every enabled process is scheduled at
  /// least once per (n+1)*C scheduled steps. 0 disables the guarantee.
  int fairness = 0;
  /// kScripted: process slots (0 = writer, i = reader i). Entries naming a
  /// disabled process are skipped but still consume their script position.
  std::vector<int> script;
  /// kScripted: after the script, repeat it (true) or continue round-robin.
  bool repeat = false;
};

/// Everything needed to reproduce one run.
struct RunSpec {
  Config cfg;
  Bytes u0 = "u0";
  SignatureKind crypto = SignatureKind::kKeyedDigest;
  std::uint64_t key_seed = 0;
  WriterStrategy writer;
  std::map<int, ReaderStrategy> readers;  // absent index: Correct
  Workload workload;
  ScheduleSpec schedule;
  std::uint64_t step_limit = 200000;
  /// Scheduled steps to keep running after every obligation is met.
  std::uint64_t tail_steps = 0;

  std::vector<int> byzantine_readers() const;
  const ReaderStrategy& reader_strategy(int i) const;
};

enum class RunStatus : std::uint8_t { kComplete, kStepLimitExhausted, kDeadlock };

std::string_view to_string(RunStatus s);

struct ExecutionHistory {
  Config cfg;
  Bytes u0;
  bool writer_correct = true;
  std::vector<int> byzantine;  // sorted reader indices
  std::vector<HliEvent> hli;
  std::vector<TraceEvent> trace;
  std::vector<int> picks;  // scheduled slot per scheduled step
  std::vector<Diagnostic> diagnostics;
  RunStatus status = RunStatus::kComplete;
  std::uint64_t scheduled_steps = 0;

  bool correct_reader(int i) const;
};

/// Deterministic: identical spec and ring give an identical history.
ExecutionHistory run(const RunSpec& spec, const KeyRing& ring);

/// Builds the machines for `spec`, slot 0 the writer and slot i reader i.
std::vector<std::unique_ptr<ProcessMachine>> make_machines(const RunSpec& spec,
                                                           const KeyRing& ring);

struct WorkloadShape {
  int max_writes = 20;
  int max_reads = 40;
  int max_write_gap = 40;       // idle writer steps before each write
  int max_read_gap = 2;         // helper iterations before each read
};

/// Random workload: 1..max_writes writes with payloads "v1", "v2", ...,
/// and 1..max_reads reads spread over `readers`.
Workload random_workload(std::uint64_t seed, const std::vector<int>& readers,
                         const WorkloadShape& shape = {});

/// Newline-delimited JSON records: one meta record, then HLI events,
/// register operations and diagnostics, each in step order.
std::string export_records(const ExecutionHistory& h);
std::string history_digest(const ExecutionHistory& h);

struct EnumerationLimits {
  std::uint64_t depth_bound = 200;  // scheduled steps per history
  std::uint64_t max_nodes = 2'000'000;
  bool prune = true;
  /// Explore one order of each set of commuting steps.
  bool sleep_sets = true;
};

struct EnumerationStats {
  std::uint64_t histories = 0;  // complete histories visited
  std::uint64_t truncated = 0;  // branches cut by the depth bound
  std::uint64_t nodes = 0;
  std::uint64_t pruned = 0;
  std::uint64_t slept = 0;  // branches skipped as reorderings of explored ones
};

/// Depth-first enumeration of every interleaving of enabled steps, up to
/// reordering of commuting steps (distinct registers, or two reads; an HLI
/// invocation or response commutes with nothing), with convergent prefixes
/// (same registers, machine states and HLI outcome order) explored once. Throws Error(kBoundTooLarge) when more than
/// max_nodes states would be expanded.
EnumerationStats enumerate_schedules(
    const RunSpec& spec, const KeyRing& ring, const EnumerationLimits& limits,
    const std::function<void(const ExecutionHistory&)>& visit);

}  // namespace bzreg
