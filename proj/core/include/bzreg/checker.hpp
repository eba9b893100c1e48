#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bzreg/engine.hpp"
#include "bzreg/types.hpp"

namespace bzreg {

class KeyRing;

/// Property names, as used in verdicts and in scenario expectation blocks.
namespace property {
inline constexpr std::string_view kReplay = "Replay";
inline constexpr std::string_view kTotalOrder = "TotalOrder";
inline constexpr std::string_view kFullTimestamps = "FullTimestamps";
inline constexpr std::string_view kGenuineAdvance = "GenuineAdvance";
inline constexpr std::string_view kStabilizationClasses = "StabilizationClasses";
inline constexpr std::string_view kWriteStabilization = "WriteStabilization";
inline constexpr std::string_view kRegisterLinearizability = "RegisterLinearizability";
inline constexpr std::string_view kViewConsistency = "ViewConsistency";
inline constexpr std::string_view kTotalOrderingReads = "TotalOrderingReads";
inline constexpr std::string_view kByzantineLinearization = "ByzantineLinearization";
inline constexpr std::string_view kAckMonotonic = "AckMonotonic";
inline constexpr std::string_view kDiagnostics = "Diagnostics";
}  // namespace property

/// Every property check_all evaluates, in report order.
const std::vector<std::string_view>& all_properties();

/// An inform set that covered the whole R_final row of a correct reader.
struct StabilizationEvent {
  TaggedValue value;
  InformSet inform_set;
  std::vector<WitnessEntry> ws;  // WS(inform_set), sorted by witness
  PartialTimestamp pt;
  std::uint64_t step = 0;  // 0 for the initializer
  int row_owner = 0;       // reader whose row was covered; 0 for the initializer
};

/// One event per distinct WS, in step order. The initializer's inform set
/// is the first event. Members must verify through `ring`.
std::vector<StabilizationEvent> detect_stabilizations(const ExecutionHistory& h,
                                                      const KeyRing& ring);

enum class WriteClass : std::uint8_t {
  kCorrect,
  kPotentialPseudoCorrect,
  kPseudoCorrect,
  kNeither,
};

std::string_view to_string(WriteClass c);

struct InitWrite {
  int reader = 0;
  std::uint64_t step = 0;
  int op = -1;  // HLI write op index, -1 outside any op
};

struct ValueEvidence {
  TaggedValue value;
  WriteClass cls = WriteClass::kNeither;
  bool initial = false;
  bool stabilized = false;
  std::vector<InitWrite> inits;
  /// Readers counted toward the n-t quorum: correct readers whose Init got
  /// the value, and Byzantine readers whose Init got it or who published it.
  std::vector<int> support;
  int correct_op = -1;  // op that made it Correct
  int latest_op = -1;   // latest op contributing an Init write
  bool crosses_correct = false;
};

struct WriteClassification {
  std::vector<ValueEvidence> values;  // sorted by value

  const ValueEvidence* find(const TaggedValue& v) const;
};

WriteClassification classify_writes(const ExecutionHistory& h,
                                    const std::vector<StabilizationEvent>& stabs);

enum class VerdictStatus : std::uint8_t { kPass, kViolation, kSkipped };

std::string_view to_string(VerdictStatus s);

struct Verdict {
  std::string property;
  VerdictStatus status = VerdictStatus::kPass;
  std::string detail;
  std::vector<std::string> witness;  // minimal event subsequence

  bool violated() const noexcept { return status == VerdictStatus::kViolation; }
};

/// ↦ order over the stabilizations: a topological order of the strict
/// relation, cut into classes that are maximal runs of one value. Earliest
/// class first.
struct MapstoChain {
  std::vector<std::vector<std::size_t>> classes;  // indices into stabs
  std::vector<int> rank;                          // per stab: its class
};

Verdict check_total_order(const std::vector<StabilizationEvent>& stabs,
                          const Config& cfg);

/// Precondition: check_total_order passed.
MapstoChain build_chain(const std::vector<StabilizationEvent>& stabs,
                        const Config& cfg);

/// Full vectors for a ↦-ordered chain of partial vectors, starting from the
/// zero vector and inheriting absent components. Throws
/// Error(kInvariantBroken) when a link is not a strict increase.
std::vector<FullTimestamp> build_full_timestamps(
    const std::vector<PartialTimestamp>& chain, const Config& cfg);

/// The chain's classes after the initializer's, one partial vector each
/// (members of a class are merged, taking the larger stamp).
std::vector<PartialTimestamp> chain_partials(const std::vector<StabilizationEvent>& stabs,
                                             const MapstoChain& chain,
                                             const Config& cfg);

Verdict check_genuine_advance(const std::vector<StabilizationEvent>& stabs,
                              const MapstoChain& chain,
                              const std::vector<int>& byzantine,
                              const Config& cfg);

/// A completed read by a correct reader.
struct ReadRecord {
  int reader = 0;
  int op_index = 0;
  std::uint64_t invoke = 0;
  std::uint64_t response = 0;
  TaggedValue value;
  std::vector<WitnessEntry> evidence;
  int stab = -1;  // matching stabilization, -1 if none
  int rank = -1;  // its chain class, -1 if unknown
};

struct WriteRecord {
  int op_index = 0;
  std::uint64_t invoke = 0;
  std::uint64_t response = std::numeric_limits<std::uint64_t>::max();
  std::optional<TaggedValue> value;  // correct writer only
  bool completed = false;
};

std::vector<ReadRecord> collect_reads(const ExecutionHistory& h,
                                      const std::vector<StabilizationEvent>& stabs,
                                      const MapstoChain* chain);
std::vector<WriteRecord> collect_writes(const ExecutionHistory& h);

Verdict check_register_linearizability(const ExecutionHistory& h,
                                       const std::vector<StabilizationEvent>& stabs,
                                       const MapstoChain& chain,
                                       const WriteClassification& classes);
Verdict check_write_stabilization(const ExecutionHistory& h,
                                  const std::vector<StabilizationEvent>& stabs,
                                  const WriteClassification& classes);
Verdict check_stabilization_classes(const std::vector<StabilizationEvent>& stabs,
                                    const WriteClassification& classes);
Verdict check_view_consistency(const ExecutionHistory& h,
                               const std::vector<StabilizationEvent>& stabs,
                               const MapstoChain& chain);
Verdict check_total_ordering_reads(const ExecutionHistory& h,
                                   const std::vector<StabilizationEvent>& stabs,
                                   const MapstoChain& chain);
Verdict check_ack_monotonic(const ExecutionHistory& h,
                            const std::vector<StabilizationEvent>& stabs,
                            const MapstoChain& chain);
Verdict check_diagnostics(const ExecutionHistory& h);

struct LinearizedOp {
  enum class Kind : std::uint8_t { kWrite, kRead };
  Kind kind = Kind::kWrite;
  int process = 0;  // 0 writer, i reader i
  int op_index = -1;
  TaggedValue value;
  int rank = -1;
  bool synthetic = false;  // a Byzantine write inserted for a returned value
};

/// Sequential witness of Byzantine linearizability: correct reads ordered
/// by returned class, correct writes by their class, and one synthetic
/// write per returned class that no correct write explains. Verified
/// against the register's sequential specification and real-time order;
/// throws Error(kNoLinearization) otherwise.
std::vector<LinearizedOp> build_byzantine_linearization(
    const ExecutionHistory& h, const std::vector<StabilizationEvent>& stabs,
    const MapstoChain& chain);

struct CheckReport {
  std::vector<StabilizationEvent> stabs;
  WriteClassification classes;
  std::optional<MapstoChain> chain;
  std::vector<FullTimestamp> full;  // one per non-initial chain class
  std::vector<LinearizedOp> linearization;
  std::vector<Verdict> verdicts;  // all_properties() order
  std::vector<std::string> notes;

  const Verdict* verdict(std::string_view property) const;
  bool violated(std::string_view property) const;
  std::vector<std::string> violated_properties() const;
};

struct CheckOptions {
  std::size_t max_witness = 12;  // events kept per violation
};

/// Runs every check. Never throws for protocol-level problems; each one
/// becomes a violation of the matching property.
CheckReport check_all(const ExecutionHistory& h, const KeyRing& ring,
                      const CheckOptions& opts = {});

std::string describe(const HliEvent& e);
std::string describe(const StabilizationEvent& s);
std::string describe(const ReadRecord& r);

}  // namespace bzreg
