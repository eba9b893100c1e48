#include "bzreg/adversary.hpp"

#include <algorithm>
#include <array>
#include <random>
#include <utility>

#include "bzreg/codec.hpp"
#include "bzreg/crypto.hpp"
#include "bzreg/error.hpp"

namespace bzreg {
namespace {

using WK = WriterStrategy::Kind;
using RK = ReaderStrategy::Kind;

constexpr std::array<std::pair<WK, std::string_view>, 7> kWriterNames{{
    {WK::kCorrect, "Correct"},
    {WK::kSplitValue, "SplitValue"},
    {WK::kPartialQuorum, "PartialQuorum"},
    {WK::kMultiValueBurst, "MultiValueBurst"},
    {WK::kOverwriteEarly, "OverwriteEarly"},
    {WK::kStaleCounter, "StaleCounter"},
    {WK::kScripted, "Scripted"},
}};

constexpr std::array<std::pair<RK, std::string_view>, 9> kReaderNames{{
    {RK::kCorrect, "Correct"},
    {RK::kSilent, "Silent"},
    {RK::kFakeWitnessStamp, "FakeWitnessStamp"},
    {RK::kOutOfOrderWitness, "OutOfOrderWitness"},
    {RK::kForgeInformSet, "ForgeInformSet"},
    {RK::kEquivocate, "Equivocate"},
    {RK::kCollaborateStabilize, "CollaborateStabilize"},
    {RK::kAlternateWitness, "AlternateWitness"},
    {RK::kColludeQuorum, "ColludeQuorum"},
}};

// --- writer planners -------------------------------------------------------

std::vector<WriteAction> write_all(const Config& cfg, const TaggedValue& kv) {
  std::vector<WriteAction> out;
  for (int i = 1; i <= cfg.n; ++i) out.push_back({WriteAction::Kind::kInit, i, kv});
  return out;
}

class SplitValuePlanner final : public WritePlanner {
 public:
  explicit SplitValuePlanner(std::map<int, Bytes> assignment)
      : assignment_(std::move(assignment)) {}
  std::vector<WriteAction> plan(int, const Bytes&, std::uint64_t& c,
                                const Config&) const override {
    ++c;
    std::vector<WriteAction> out;
    for (const auto& [reader, payload] : assignment_) {
      out.push_back({WriteAction::Kind::kInit, reader, TaggedValue{c, payload}});
    }
    return out;
  }

 private:
  std::map<int, Bytes> assignment_;
};

class PartialQuorumPlanner final : public WritePlanner {
 public:
  explicit PartialQuorumPlanner(std::vector<int> targets) : targets_(std::move(targets)) {
    std::sort(targets_.begin(), targets_.end());
  }
  std::vector<WriteAction> plan(int, const Bytes& payload, std::uint64_t& c,
                                const Config&) const override {
    ++c;
    std::vector<WriteAction> out;
    for (int r : targets_) out.push_back({WriteAction::Kind::kInit, r, TaggedValue{c, payload}});
    return out;
  }

 private:
  std::vector<int> targets_;
};

class MultiValueBurstPlanner final : public WritePlanner {
 public:
  explicit MultiValueBurstPlanner(std::vector<Bytes> values) : values_(std::move(values)) {}
  std::vector<WriteAction> plan(int, const Bytes& payload, std::uint64_t& c,
                                const Config& cfg) const override {
    std::vector<WriteAction> out;
    const std::vector<Bytes> fallback{payload};
    for (const auto& v : values_.empty() ? fallback : values_) {
      ++c;
      auto part = write_all(cfg, TaggedValue{c, v});
      out.insert(out.end(), part.begin(), part.end());
    }
    return out;
  }

 private:
  std::vector<Bytes> values_;
};

class OverwriteEarlyPlanner final : public WritePlanner {
 public:
  explicit OverwriteEarlyPlanner(int delay) : delay_(delay) {}
  std::vector<WriteAction> plan(int, const Bytes& payload, std::uint64_t& c,
                                const Config& cfg) const override {
    ++c;
    auto out = write_all(cfg, TaggedValue{c, payload});
    for (int i = 0; i < delay_; ++i) out.push_back({WriteAction::Kind::kIdle, 0, {}});
    return out;
  }

 private:
  int delay_;
};

class StaleCounterPlanner final : public WritePlanner {
 public:
  explicit StaleCounterPlanner(std::uint64_t k) : k_(k) {}
  std::vector<WriteAction> plan(int, const Bytes& payload, std::uint64_t& c,
                                const Config& cfg) const override {
    c = k_;
    const TaggedValue kv{k_, payload};
    auto out = write_all(cfg, kv);
    out.push_back({WriteAction::Kind::kAwaitAcks, 0, kv});
    return out;
  }

 private:
  std::uint64_t k_;
};

class ScriptedPlanner final : public WritePlanner {
 public:
  ScriptedPlanner(std::vector<std::vector<ScriptedInit>> script, bool await)
      : script_(std::move(script)), await_(await) {}
  std::vector<WriteAction> plan(int op_index, const Bytes&, std::uint64_t& c,
                                const Config&) const override {
    std::vector<WriteAction> out;
    if (op_index < 0 || static_cast<std::size_t>(op_index) >= script_.size()) return out;
    for (const auto& w : script_[op_index]) {
      out.push_back({WriteAction::Kind::kInit, w.reader, w.kv});
      c = std::max(c, w.kv.k);
    }
    if (await_ && !out.empty()) {
      out.push_back({WriteAction::Kind::kAwaitAcks, 0, out.back().kv});
    }
    return out;
  }

 private:
  std::vector<std::vector<ScriptedInit>> script_;
  bool await_;
};

// --- Byzantine readers -----------------------------------------------------

class SilentMachine final : public ProcessMachine {
 public:
  explicit SilentMachine(int self) : self_(self) {}
  ProcessId id() const override { return ProcessId::reader(self_); }
  bool enabled() const override { return false; }
  bool has_obligations() const override { return false; }
  void step(StepContext&) override {}
  std::uint64_t hash_state(const RegisterBank&) const override { return 0; }
  std::unique_ptr<ProcessMachine> clone() const override {
    return std::make_unique<SilentMachine>(*this);
  }

 private:
  int self_;
};

class FakeStampReader final : public ReaderMachine {
 public:
  FakeStampReader(const Config& cfg, const Bytes& u0, int self,
                  std::vector<ReadOp> reads, const KeyRing& ring, Stamp offset)
      : ReaderMachine(cfg, u0, self, std::move(reads), ring), offset_(offset) {}
  std::unique_ptr<ProcessMachine> clone() const override {
    return std::make_unique<FakeStampReader>(*this);
  }

 protected:
  std::optional<WitnessEntry> next_publication(const TaggedValue& init) override {
    auto e = ReaderMachine::next_publication(init);
    if (e) e->stamp += offset_;
    return e;
  }

 private:
  Stamp offset_;
};

class OutOfOrderReader final : public ReaderMachine {
 public:
  OutOfOrderReader(const Config& cfg, const Bytes& u0, int self,
                   std::vector<ReadOp> reads, const KeyRing& ring, int period)
      : ReaderMachine(cfg, u0, self, std::move(reads), ring),
        period_(std::max(1, period)),
        history_{initial_entry(u0, self)} {}
  std::unique_ptr<ProcessMachine> clone() const override {
    return std::make_unique<OutOfOrderReader>(*this);
  }

 protected:
  std::optional<WitnessEntry> next_publication(const TaggedValue& init) override {
    ++iter_;
    if (auto e = ReaderMachine::next_publication(init)) {
      history_.push_back(*e);
      return e;
    }
    if (history_.size() >= 2 && iter_ % period_ == 0) {
      return history_[history_.size() - 2];
    }
    return std::nullopt;
  }
  void hash_extra(StateHasher& h) const override {
    h.add(iter_ % static_cast<std::uint64_t>(period_));
    h.add(history_.size());
  }

 private:
  int period_;
  std::uint64_t iter_ = 0;
  std::vector<WitnessEntry> history_;
};

class ForgeReader final : public ReaderMachine {
 public:
  using ReaderMachine::ReaderMachine;
  std::unique_ptr<ProcessMachine> clone() const override {
    return std::make_unique<ForgeReader>(*this);
  }

 protected:
  Bytes inform_payload(int target, StepContext& ctx) override {
    return codec::encode(forged_set(target % 2 == 0 ? other() : self(), ctx));
  }
  Bytes final_payload(int, StepContext& ctx) override {
    InformSet is;
    for (int l = 1; l <= cfg().n; ++l) is.members.push_back(forged_set(l, ctx));
    return codec::encode(is);
  }

 private:
  int other() const { return self() % cfg().n + 1; }

  // Fabricated entries for every witness. Claiming another signer, the
  // set carries our own signature; claiming ourselves, a garbage one.
  WitnessSet forged_set(int claimed, StepContext& ctx) const {
    std::vector<WitnessEntry> entries;
    for (int w = 1; w <= cfg().n; ++w) {
      entries.push_back({TaggedValue{1u << 20, "forged"}, 1000 + s_, w});
    }
    WitnessSet ws;
    ws.signer = claimed;
    if (claimed == self()) {
      ws.signature = Bytes(32, '\x5a');
    } else {
      ws.signature = Signer(ctx.ring, id()).sign(codec::signing_payload(entries));
    }
    ws.entries = std::move(entries);
    return ws;
  }
};

class EquivocateReader final : public ReaderMachine {
 public:
  EquivocateReader(const Config& cfg, const Bytes& u0, int self,
                   std::vector<ReadOp> reads, const KeyRing& ring,
                   std::map<int, Bytes> payloads)
      : ReaderMachine(cfg, u0, self, std::move(reads), ring),
        payloads_(std::move(payloads)) {}
  std::unique_ptr<ProcessMachine> clone() const override {
    return std::make_unique<EquivocateReader>(*this);
  }

 protected:
  Bytes witness_payload(const WitnessEntry& mine, int target) const override {
    auto it = payloads_.find(target);
    if (it == payloads_.end()) return codec::encode(mine);
    WitnessEntry e = mine;
    e.value.u = it->second;
    return codec::encode(e);
  }

 private:
  std::map<int, Bytes> payloads_;
};

class CollaborateReader final : public ReaderMachine {
 public:
  using ReaderMachine::ReaderMachine;
  std::unique_ptr<ProcessMachine> clone() const override {
    return std::make_unique<CollaborateReader>(*this);
  }

 protected:
  // Pretends its own Init holds the value the lowest-indexed peer has
  // witnessed, once any peer has witnessed a non-initial value.
  std::optional<WitnessEntry> next_publication(const TaggedValue& init) override {
    const TaggedValue initial = initial_value(u0());
    for (int i = 1; i <= cfg().n; ++i) {
      if (i == self()) continue;
      const auto& e = t_witness_[i - 1];
      if (e.value != initial) return ReaderMachine::next_publication(e.value);
    }
    return ReaderMachine::next_publication(init);
  }
};

class AlternateReader final : public ReaderMachine {
 public:
  AlternateReader(const Config& cfg, const Bytes& u0, int self,
                  std::vector<ReadOp> reads, const KeyRing& ring,
                  std::vector<TaggedValue> values, int period)
      : ReaderMachine(cfg, u0, self, std::move(reads), ring),
        values_(std::move(values)),
        period_(std::max(1, period)) {}
  std::unique_ptr<ProcessMachine> clone() const override {
    return std::make_unique<AlternateReader>(*this);
  }

 protected:
  // Ignores its Init register: every `period` iterations it switches to the
  // next value and publishes it under a fresh stamp.
  std::optional<WitnessEntry> next_publication(const TaggedValue& init) override {
    if (values_.empty()) return ReaderMachine::next_publication(init);
    std::optional<WitnessEntry> out;
    if (iter_ % period_ == 0) {
      const auto& v = values_[(iter_ / period_) % values_.size()];
      last_init_ = v;
      ++s_;
      out = WitnessEntry{v, s_, self()};
    }
    ++iter_;
    return out;
  }
  void hash_extra(StateHasher& h) const override { h.add(iter_); }

 private:
  std::vector<TaggedValue> values_;
  std::uint64_t period_;
  std::uint64_t iter_ = 0;
};

class ColludeMachine final : public ProcessMachine {
 public:
  ColludeMachine(const Config& cfg, int self, std::vector<int> colluders,
                 std::vector<CollusionPlan> plans)
      : cfg_(cfg), self_(self), plans_(std::move(plans)) {
    for (int c : colluders) {
      if (c != self) peers_.push_back(c);
    }
    std::sort(peers_.begin(), peers_.end());
    peers_.erase(std::unique(peers_.begin(), peers_.end()), peers_.end());
    start_plan();
  }

  ProcessId id() const override { return ProcessId::reader(self_); }
  bool enabled() const override { return phase_ != Phase::kDone; }
  bool has_obligations() const override { return false; }
  std::unique_ptr<ProcessMachine> clone() const override {
    return std::make_unique<ColludeMachine>(*this);
  }

  void step(StepContext& ctx) override {
    const ProcessId me = id();
    const CollusionPlan& plan = plans_[plan_];
    switch (phase_) {
      case Phase::kPublish: {
        if (own_.signature.empty()) {
          own_ = make_witness_set(plan.entries, Signer(ctx.ring, me));
        }
        if (peers_.empty()) {
          finish_collect();
          return;
        }
        ctx.bank.write(RegisterId::inform(self_, peers_[idx_]), codec::encode(own_), me);
        if (++idx_ >= peers_.size()) {
          phase_ = Phase::kCollect;
          idx_ = 0;
        }
        return;
      }
      case Phase::kCollect: {
        while (got_[idx_]) idx_ = (idx_ + 1) % peers_.size();
        const int peer = peers_[idx_];
        const auto cv = ctx.bank.read(RegisterId::inform(peer, self_), me);
        auto ws = codec::decode_witness_set(*cv.content);
        if (ws && ws->entries == own_.entries && ws->signer == peer &&
            verify_witness_set(*ws, ctx.ring, cfg_, peer)) {
          got_[idx_] = true;
          collected_.push_back(std::move(*ws));
        }
        idx_ = (idx_ + 1) % peers_.size();
        if (std::all_of(got_.begin(), got_.end(), [](bool b) { return b; })) finish_collect();
        return;
      }
      case Phase::kWriteFinals:
        ctx.bank.write(RegisterId::final_(self_, targets_[idx_]), is_bytes_, me);
        if (++idx_ >= targets_.size()) {
          ++plan_;
          start_plan();
        }
        return;
      case Phase::kDone:
        return;
    }
  }

  std::uint64_t hash_state(const RegisterBank&) const override {
    StateHasher h;
    h.add(static_cast<std::uint64_t>(phase_));
    h.add(plan_);
    h.add(idx_);
    for (bool b : got_) h.add(static_cast<std::uint64_t>(b));
    return h.value();
  }

 private:
  enum class Phase : std::uint8_t { kPublish, kCollect, kWriteFinals, kDone };

  void start_plan() {
    own_ = WitnessSet{};
    collected_.clear();
    idx_ = 0;
    if (plan_ >= plans_.size()) {
      phase_ = Phase::kDone;
      return;
    }
    got_.assign(peers_.size(), false);
    auto it = plans_[plan_].finals.find(self_);
    targets_ = it == plans_[plan_].finals.end() ? std::vector<int>{} : it->second;
    phase_ = Phase::kPublish;
  }

  void finish_collect() {
    InformSet is;
    is.members = collected_;
    is.members.push_back(own_);
    std::sort(is.members.begin(), is.members.end(),
              [](const auto& a, const auto& b) { return a.signer < b.signer; });
    is_bytes_ = codec::encode(is);
    idx_ = 0;
    if (targets_.empty()) {
      ++plan_;
      start_plan();
      return;
    }
    phase_ = Phase::kWriteFinals;
  }

  Config cfg_;
  int self_;
  std::vector<int> peers_;
  std::vector<CollusionPlan> plans_;
  std::size_t plan_ = 0;
  Phase phase_ = Phase::kDone;
  std::size_t idx_ = 0;
  WitnessSet own_;
  std::vector<bool> got_;
  std::vector<WitnessSet> collected_;
  std::vector<int> targets_;
  Bytes is_bytes_;
};

}  // namespace

std::string_view to_string(WriterStrategy::Kind kind) {
  for (const auto& [k, name] : kWriterNames) {
    if (k == kind) return name;
  }
  return "?";
}

std::string_view to_string(ReaderStrategy::Kind kind) {
  for (const auto& [k, name] : kReaderNames) {
    if (k == kind) return name;
  }
  return "?";
}

WriterStrategy::Kind writer_kind_from_string(std::string_view name) {
  for (const auto& [k, n] : kWriterNames) {
    if (n == name) return k;
  }
  throw Error(ErrorCode::kScenarioConfig, "unknown writer strategy '" + std::string(name) + "'");
}

ReaderStrategy::Kind reader_kind_from_string(std::string_view name) {
  for (const auto& [k, n] : kReaderNames) {
    if (n == name) return k;
  }
  throw Error(ErrorCode::kScenarioConfig, "unknown reader strategy '" + std::string(name) + "'");
}

const std::vector<WriterStrategy::Kind>& all_writer_kinds() {
  static const std::vector<WK> kinds = [] {
    std::vector<WK> out;
    for (const auto& [k, name] : kWriterNames) out.push_back(k);
    return out;
  }();
  return kinds;
}

const std::vector<ReaderStrategy::Kind>& all_reader_kinds() {
  static const std::vector<RK> kinds = [] {
    std::vector<RK> out;
    for (const auto& [k, name] : kReaderNames) out.push_back(k);
    return out;
  }();
  return kinds;
}

WriterStrategy sample_writer_strategy(WriterStrategy::Kind kind, const Config& cfg,
                                      std::uint64_t seed, int ops) {
  std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ull + static_cast<std::uint64_t>(kind));
  auto coin = [&rng] { return (rng() & 1) != 0; };
  auto subset = [&](int min_size) {
    std::vector<int> all(cfg.n);
    for (int i = 0; i < cfg.n; ++i) all[i] = i + 1;
    std::shuffle(all.begin(), all.end(), rng);
    const int size = min_size + static_cast<int>(rng() % static_cast<std::uint64_t>(cfg.n - min_size + 1));
    all.resize(size);
    std::sort(all.begin(), all.end());
    return all;
  };

  WriterStrategy s;
  s.kind = kind;
  switch (kind) {
    case WriterStrategy::Kind::kCorrect:
      break;
    case WriterStrategy::Kind::kSplitValue:
      for (int i = 1; i <= cfg.n; ++i) {
        if (rng() % 5 != 0) s.assignment[i] = coin() ? "a" : "b";
      }
      break;
    case WriterStrategy::Kind::kPartialQuorum:
      s.targets = subset(std::max(1, cfg.n - 2 * cfg.t));
      break;
    case WriterStrategy::Kind::kMultiValueBurst:
      s.values = {"x", "y"};
      if (coin()) s.values.push_back("z");
      break;
    case WriterStrategy::Kind::kOverwriteEarly:
      s.delay = static_cast<int>(rng() % static_cast<std::uint64_t>(2 * cfg.n + 1));
      break;
    case WriterStrategy::Kind::kStaleCounter:
      s.k = 1 + rng() % 3;
      break;
    case WriterStrategy::Kind::kScripted: {
      // Fresh values to random reader subsets, sometimes topping up the
      // previous value so that a quorum accumulates across operations.
      std::vector<int> prev_readers;
      TaggedValue prev;
      for (int op = 0; op < ops; ++op) {
        std::vector<ScriptedInit> step;
        if (op > 0 && coin()) {
          for (int r = 1; r <= cfg.n; ++r) {
            if (!std::binary_search(prev_readers.begin(), prev_readers.end(), r) && coin()) {
              step.push_back({r, prev});
            }
          }
        }
        const TaggedValue kv{static_cast<std::uint64_t>(op + 1), "s" + std::to_string(op + 1)};
        auto readers = subset(1);
        for (int r : readers) step.push_back({r, kv});
        prev_readers = std::move(readers);
        prev = kv;
        s.script.push_back(std::move(step));
      }
      break;
    }
  }
  return s;
}

ReaderStrategy sample_reader_strategy(ReaderStrategy::Kind kind, const Config& cfg,
                                      int self, std::uint64_t seed) {
  std::mt19937_64 rng(seed * 0xbf58476d1ce4e5b9ull + static_cast<std::uint64_t>(kind) * 131 +
                      static_cast<std::uint64_t>(self));
  ReaderStrategy s;
  s.kind = kind;
  switch (kind) {
    case ReaderStrategy::Kind::kFakeWitnessStamp:
      s.offset = 1 + rng() % 20;
      break;
    case ReaderStrategy::Kind::kOutOfOrderWitness:
      s.period = 1 + static_cast<int>(rng() % 4);
      break;
    case ReaderStrategy::Kind::kEquivocate:
      for (int i = 1; i <= cfg.n; ++i) {
        if (i != self && (rng() & 1)) s.payloads[i] = "e" + std::to_string(i);
      }
      break;
    case ReaderStrategy::Kind::kAlternateWitness: {
      // Values a correct writer issues early in a random workload.
      const int count = 2 + static_cast<int>(rng() % 2);
      for (int i = 1; i <= count; ++i) {
        s.values.push_back(TaggedValue{static_cast<std::uint64_t>(i), "v" + std::to_string(i)});
      }
      s.period = 1 + static_cast<int>(rng() % 3);
      break;
    }
    case ReaderStrategy::Kind::kColludeQuorum: {
      // Alone it cannot gather n-t signers; the forged finals must be
      // rejected by every correct reader.
      s.colluders = {self};
      CollusionPlan plan;
      for (int i = 1; i <= cfg.n; ++i) {
        plan.entries.push_back(WitnessEntry{TaggedValue{1, "v1"}, 1 + rng() % 9, i});
      }
      for (int i = 1; i <= cfg.n; ++i) plan.finals[self].push_back(i);
      s.plans.push_back(std::move(plan));
      break;
    }
    default:
      break;
  }
  return s;
}

std::shared_ptr<const WritePlanner> make_write_planner(const WriterStrategy& s) {
  switch (s.kind) {
    case WK::kCorrect: return std::make_shared<CorrectWritePlanner>();
    case WK::kSplitValue: return std::make_shared<SplitValuePlanner>(s.assignment);
    case WK::kPartialQuorum: return std::make_shared<PartialQuorumPlanner>(s.targets);
    case WK::kMultiValueBurst: return std::make_shared<MultiValueBurstPlanner>(s.values);
    case WK::kOverwriteEarly: return std::make_shared<OverwriteEarlyPlanner>(s.delay);
    case WK::kStaleCounter: return std::make_shared<StaleCounterPlanner>(s.k);
    case WK::kScripted: return std::make_shared<ScriptedPlanner>(s.script, s.await_acks);
  }
  throw Error(ErrorCode::kScenarioConfig, "unhandled writer strategy");
}

std::unique_ptr<ProcessMachine> make_reader_machine(const Config& cfg,
                                                    const Bytes& u0, int index,
                                                    const ReaderStrategy& s,
                                                    std::vector<ReadOp> reads,
                                                    const KeyRing& ring) {
  switch (s.kind) {
    case RK::kCorrect:
      return std::make_unique<ReaderMachine>(cfg, u0, index, std::move(reads), ring);
    case RK::kSilent:
      return std::make_unique<SilentMachine>(index);
    case RK::kFakeWitnessStamp:
      return std::make_unique<FakeStampReader>(cfg, u0, index, std::move(reads), ring, s.offset);
    case RK::kOutOfOrderWitness:
      return std::make_unique<OutOfOrderReader>(cfg, u0, index, std::move(reads), ring, s.period);
    case RK::kForgeInformSet:
      return std::make_unique<ForgeReader>(cfg, u0, index, std::move(reads), ring);
    case RK::kEquivocate:
      return std::make_unique<EquivocateReader>(cfg, u0, index, std::move(reads), ring, s.payloads);
    case RK::kCollaborateStabilize:
      return std::make_unique<CollaborateReader>(cfg, u0, index, std::move(reads), ring);
    case RK::kAlternateWitness:
      return std::make_unique<AlternateReader>(cfg, u0, index, std::move(reads), ring,
                                               s.values, s.period);
    case RK::kColludeQuorum:
      return std::make_unique<ColludeMachine>(cfg, index, s.colluders, s.plans);
  }
  throw Error(ErrorCode::kScenarioConfig, "unhandled reader strategy");
}

}  // namespace bzreg
