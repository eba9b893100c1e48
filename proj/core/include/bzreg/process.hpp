#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bzreg/error.hpp"
#include "bzreg/registers.hpp"
#include "bzreg/types.hpp"

namespace bzreg {

class KeyRing;

enum class HliKind : std::uint8_t { kInvoke, kResponse };
enum class HliOp : std::uint8_t { kRead, kWrite };

struct HliEvent {
  std::uint64_t step = 0;
  ProcessId process;
  HliKind kind = HliKind::kInvoke;
  HliOp op = HliOp::kRead;
  int op_index = 0;  // per-process sequence number, from 0
  /// Write invoke: the tagged value a correct writer issues (absent for
  /// Byzantine writers). Read response: the returned value.
  std::optional<TaggedValue> value;
  /// Write invoke: the payload argument.
  Bytes payload;
  /// Read response: WS of the inform set that backs the returned value.
  std::vector<WitnessEntry> evidence;
};

struct Diagnostic {
  std::uint64_t step = 0;
  ProcessId process;
  ErrorCode code = ErrorCode::kInvariantBroken;
  std::string message;
  int subject = 0;  // kSuspectedProcess: the suspected reader
};

/// Everything a machine may touch during one scheduled step.
struct StepContext {
  RegisterBank& bank;
  const KeyRing& ring;
  std::vector<HliEvent>& hli;
  std::vector<Diagnostic>& diagnostics;
};

struct WriteOp {
  Bytes payload;
  int idle_before = 0;  // local no-op steps before the invoke
};

struct ReadOp {
  int idle_iterations_before = 0;  // helper iterations before the invoke
};

/// A process driven one step at a time by the engine. A step performs at
/// most one register operation, or one local transition (HLI invoke or
/// response, idle tick).
class ProcessMachine {
 public:
  virtual ~ProcessMachine() = default;

  virtual ProcessId id() const = 0;
  virtual bool enabled() const = 0;
  /// True while an HLI operation is pending or still queued.
  virtual bool has_obligations() const = 0;
  virtual void step(StepContext& ctx) = 0;
  /// Hash of behavior-relevant state, excluding absolute step numbers
  /// where the machine can express them relative to `bank`.
  virtual std::uint64_t hash_state(const RegisterBank& bank) const = 0;
  virtual std::unique_ptr<ProcessMachine> clone() const = 0;
};

/// FNV-style accumulator used by hash_state implementations.
class StateHasher {
 public:
  void add(std::uint64_t v) {
    h_ ^= v + 0x9e3779b97f4a7c15ull + (h_ << 6) + (h_ >> 2);
  }
  void add(std::string_view s) { add(std::hash<std::string_view>{}(s)); }
  void add(const TaggedValue& v) {
    add(v.k);
    add(std::string_view(v.u));
  }
  void add(const WitnessEntry& e) {
    add(e.value);
    add(e.stamp);
    add(static_cast<std::uint64_t>(e.witness));
  }
  std::uint64_t value() const noexcept { return h_; }

 private:
  std::uint64_t h_ = 1469598103934665603ull;
};

}  // namespace bzreg
