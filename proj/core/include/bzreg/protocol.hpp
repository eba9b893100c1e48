#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "bzreg/process.hpp"
#include "bzreg/types.hpp"

namespace bzreg {

class KeyRing;

/// Index of the ↦-latest witness set in `ws_list`. Pairs are eliminated
/// left to right; on Equal the later operand is discarded. Throws
/// Error(kConcurrentFinalSets) on a Concurrent pair and propagates
/// mapsto_compare errors. Precondition: ws_list is non-empty.
std::size_t find_latest_index(std::span<const std::vector<WitnessEntry>> ws_list,
                              const Config& cfg);

/// find_latest over inform sets; each element must pass ws_of.
InformSet find_latest(const std::vector<InformSet>& z, const Config& cfg);

/// Entries of the value held by at least n-t slots of `t_witness`. If
/// several values qualify (possible only below the thresholds), picks the
/// one with most entries, then the highest stamp, then the smaller value.
std::optional<std::vector<WitnessEntry>> choose_witness_entries(
    std::span<const WitnessEntry> t_witness, const Config& cfg);

/// A subset of at least n-t verified slots whose common entries number at
/// least n-t. Larger subsets are preferred, then lexicographically smaller
/// signer sets. Members are sorted by signer.
std::optional<InformSet> choose_inform_set(
    std::span<const std::optional<WitnessSet>> t_inform, const Config& cfg);

// ---------------------------------------------------------------------------
// Writer

struct WriteAction {
  enum class Kind : std::uint8_t { kInit, kIdle, kAwaitAcks };
  Kind kind = Kind::kInit;
  int reader = 0;
  TaggedValue kv;
};

/// Turns one HLI WRITE into register actions. Planners are stateless; the
/// counter `c` lives in the machine and is passed by reference.
class WritePlanner {
 public:
  virtual ~WritePlanner() = default;
  virtual std::vector<WriteAction> plan(int op_index, const Bytes& payload,
                                        std::uint64_t& c,
                                        const Config& cfg) const = 0;
  /// Correct planners have their invoke events carry the issued value.
  virtual bool correct() const { return false; }
};

/// c := c+1; write <c,u> to every Init register in ascending order, then
/// wait for n-t fresh acks.
class CorrectWritePlanner final : public WritePlanner {
 public:
  std::vector<WriteAction> plan(int op_index, const Bytes& payload,
                                std::uint64_t& c,
                                const Config& cfg) const override;
  bool correct() const override { return true; }
};

class WriterMachine final : public ProcessMachine {
 public:
  WriterMachine(const Config& cfg, std::vector<WriteOp> ops,
                std::shared_ptr<const WritePlanner> planner =
                    std::make_shared<CorrectWritePlanner>());

  ProcessId id() const override { return ProcessId::writer(); }
  bool enabled() const override { return phase_ != Phase::kDone; }
  bool has_obligations() const override { return next_op_ < ops_.size(); }
  void step(StepContext& ctx) override;
  std::uint64_t hash_state(const RegisterBank& bank) const override;
  std::unique_ptr<ProcessMachine> clone() const override {
    return std::make_unique<WriterMachine>(*this);
  }

  std::uint64_t counter() const noexcept { return c_; }
  std::size_t completed() const noexcept { return next_op_; }

 private:
  enum class Phase : std::uint8_t { kGap, kActions, kRespond, kDone };

  void start_op();
  void poll_ack(StepContext& ctx, const TaggedValue& kv);

  Config cfg_;
  std::vector<WriteOp> ops_;
  std::shared_ptr<const WritePlanner> planner_;

  std::uint64_t c_ = 0;
  std::size_t next_op_ = 0;
  Phase phase_ = Phase::kGap;
  int gap_ = 0;
  std::vector<WriteAction> actions_;
  std::size_t pos_ = 0;
  std::uint64_t begin_step_ = 0;
  std::vector<bool> acked_;
  int acked_count_ = 0;
  int cursor_ = 0;
};

// ---------------------------------------------------------------------------
// Reader

/// A correct reader: the helper loop as an explicit state machine, one
/// register access per step, with READ() running exactly one iteration.
///
/// Byzantine strategies subclass this and override the protected hooks;
/// the default hooks are the correct behavior.
class ReaderMachine : public ProcessMachine {
 public:
  ReaderMachine(const Config& cfg, const Bytes& u0, int self,
                std::vector<ReadOp> reads, const KeyRing& ring);

  ProcessId id() const override { return ProcessId::reader(self_); }
  bool enabled() const override { return true; }
  bool has_obligations() const override { return next_read_ < reads_.size(); }
  void step(StepContext& ctx) override;
  std::uint64_t hash_state(const RegisterBank& bank) const override;
  std::unique_ptr<ProcessMachine> clone() const override {
    return std::make_unique<ReaderMachine>(*this);
  }

  Stamp clock() const noexcept { return s_; }
  const std::vector<WitnessEntry>& t_witness() const noexcept { return t_witness_; }
  const InformSet& inform_set() const noexcept { return inform_set_; }
  const TaggedValue& last_ack() const noexcept { return last_ack_; }
  const std::vector<bool>& suspected() const noexcept { return suspected_; }
  std::uint64_t iterations() const noexcept { return iterations_; }
  bool at_iteration_boundary() const noexcept { return phase_ == Phase::kBoundary; }

 protected:
  /// Called after reading R_init. Returns the entry to publish to the
  /// witness row this iteration, if any.
  virtual std::optional<WitnessEntry> next_publication(const TaggedValue& init);
  virtual Bytes witness_payload(const WitnessEntry& mine, int target) const;
  virtual Bytes inform_payload(int target, StepContext& ctx);
  virtual Bytes final_payload(int target, StepContext& ctx);
  virtual void hash_extra(StateHasher&) const {}

  const Config& cfg() const noexcept { return cfg_; }
  int self() const noexcept { return self_; }
  const Bytes& u0() const noexcept { return u0_; }

  Stamp s_ = 0;
  TaggedValue last_init_;
  std::vector<WitnessEntry> t_witness_;  // slot i-1 for reader i
  Bytes witness_set_bytes_;
  Bytes inform_set_bytes_;

 private:
  enum class Phase : std::uint8_t {
    kBoundary,
    kReadInit,
    kWriteWitness,
    kReadWitness,
    kWriteInform,
    kReadInform,
    kWriteFinalFormed,
    kWriteAckFormed,
    kReadFinal,
    kWriteFinalAdopted,
    kWriteAckAdopted,
    kRespond,
  };

  struct FinalSlot {
    Bytes bytes;
    std::optional<InformSet> is;
    std::vector<WitnessEntry> ws;
  };

  void register_step(StepContext& ctx);
  void after_witness_collection(StepContext& ctx);
  void after_inform_collection();
  void after_final_collection(StepContext& ctx);
  void write_ack(StepContext& ctx);
  void end_iteration();
  void suspect(int i, StepContext& ctx, std::string_view why);
  void set_inform_set(InformSet is, std::vector<WitnessEntry> ws);

  Config cfg_;
  Bytes u0_;
  int self_;
  std::vector<ReadOp> reads_;

  WitnessSet witness_set_;
  std::vector<std::optional<WitnessSet>> t_inform_;  // verified only
  std::vector<Bytes> t_inform_bytes_;
  bool inform_dirty_ = true;
  std::optional<InformSet> formed_;
  InformSet inform_set_;
  std::vector<WitnessEntry> inform_ws_;
  TaggedValue last_ack_;
  std::vector<WitnessEntry> last_ack_evidence_;
  std::vector<bool> suspected_;
  std::vector<FinalSlot> finals_;

  Phase phase_ = Phase::kBoundary;
  int idx_ = 1;
  std::optional<WitnessEntry> publish_;
  std::uint64_t iterations_ = 0;

  std::size_t next_read_ = 0;
  int idle_iterations_ = 0;
  bool in_read_ = false;
  std::string last_diag_;
};

}  // namespace bzreg
