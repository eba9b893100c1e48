#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bzreg/types.hpp"

namespace bzreg {

class KeyRing;

enum class Family : std::uint8_t { kInit, kAck, kWitness, kInform, kFinal };

std::string_view to_string(Family f);

/// One SWSR register: its family and the two processes it connects.
struct RegisterId {
  Family family = Family::kInit;
  ProcessId writer_end;
  ProcessId reader_end;

  static RegisterId init(int reader) {
    return {Family::kInit, ProcessId::writer(), ProcessId::reader(reader)};
  }
  static RegisterId ack(int reader) {
    return {Family::kAck, ProcessId::reader(reader), ProcessId::writer()};
  }
  static RegisterId witness(int from, int to) {
    return {Family::kWitness, ProcessId::reader(from), ProcessId::reader(to)};
  }
  static RegisterId inform(int from, int to) {
    return {Family::kInform, ProcessId::reader(from), ProcessId::reader(to)};
  }
  static RegisterId final_(int from, int to) {
    return {Family::kFinal, ProcessId::reader(from), ProcessId::reader(to)};
  }

  auto operator<=>(const RegisterId&) const = default;
};

std::string to_string(const RegisterId& id);

enum class RegOp : std::uint8_t { kRead, kWrite };

/// Shared, immutable cell content. Cells, trace events and cloned banks
/// share the same buffers.
using CellBytes = std::shared_ptr<const Bytes>;

struct TraceEvent {
  std::uint64_t step = 0;
  RegOp op = RegOp::kRead;
  RegisterId reg;
  ProcessId caller;
  CellBytes value;  // value read or written
};

struct CellView {
  CellBytes content;
  /// Global step of the most recent write; 0 means "initializer value".
  std::uint64_t last_write_step = 0;
};

/// The 3n^2 + 2n SWSR registers of the construction, with caller checks on
/// every access and an append-only trace. Each access is one indivisible
/// step stamped from a global step counter that the engine also uses for
/// high-level events.
class RegisterBank {
 public:
  /// Allocates all five families with their initializer values. Initial
  /// witness sets are signed through `ring`; the initial inform set uses
  /// every reader as a member.
  static RegisterBank init(const Config& cfg, const Bytes& u0,
                           const KeyRing& ring);

  /// Throws Error(kAccessViolation) unless caller == id.writer_end.
  void write(const RegisterId& id, Bytes value, ProcessId caller);
  /// Throws Error(kAccessViolation) unless caller == id.reader_end.
  CellView read(const RegisterId& id, ProcessId caller);

  /// Untraced inspection for tests and the checker.
  const Bytes& peek(const RegisterId& id) const;
  std::uint64_t last_write_step(const RegisterId& id) const;

  /// Reserves a step index for an event that is not a register access.
  std::uint64_t tick() { return next_step_++; }
  std::uint64_t now() const noexcept { return next_step_; }

  const Config& config() const noexcept { return cfg_; }
  std::size_t size() const noexcept { return cells_.size(); }
  std::size_t count(Family f) const;
  const std::vector<TraceEvent>& trace() const noexcept { return trace_; }
  std::vector<TraceEvent> take_trace() { return std::move(trace_); }
  /// Disables trace recording; schedule enumeration replays instead.
  void set_tracing(bool on) noexcept { tracing_ = on; }

  /// The most recent read or write since clear_last_access(); schedule
  /// enumeration uses it to tell which steps commute.
  struct Access {
    RegOp op = RegOp::kRead;
    std::size_t cell = 0;
  };
  std::optional<Access> last_access() const noexcept { return last_access_; }
  void clear_last_access() noexcept { last_access_.reset(); }

  /// Hash of all cell contents (not the trace); used for state pruning.
  std::uint64_t content_hash() const;

  /// Every RegisterId in allocation order.
  std::vector<RegisterId> all_ids() const;

 private:
  struct Cell {
    CellBytes content;
    std::uint64_t last_write_step = 0;
  };

  explicit RegisterBank(const Config& cfg) : cfg_(cfg) {}
  std::size_t index_of(const RegisterId& id) const;

  Config cfg_;
  std::vector<Cell> cells_;
  std::vector<TraceEvent> trace_;
  std::uint64_t next_step_ = 1;
  bool tracing_ = true;
  std::optional<Access> last_access_;
};

/// Replays a trace against a freshly initialized bank: every read must
/// return the latest preceding write (or the initializer), steps must
/// strictly increase, and the replayed contents must equal `final_bank`.
/// Returns a description of the first discrepancy, or nullopt.
std::optional<std::string> verify_trace_replay(
    const Config& cfg, const Bytes& u0, const KeyRing& ring,
    const std::vector<TraceEvent>& trace, const RegisterBank* final_bank);

}  // namespace bzreg
