#include "bzreg/protocol.hpp"

#include <algorithm>
#include <bit>
#include <map>

#include "bzreg/codec.hpp"
#include "bzreg/crypto.hpp"
#include "bzreg/error.hpp"
#include "bzreg/timestamp.hpp"

namespace bzreg {

std::size_t find_latest_index(std::span<const std::vector<WitnessEntry>> ws_list,
                              const Config& cfg) {
  std::size_t survivor = 0;
  for (std::size_t i = 1; i < ws_list.size(); ++i) {
    switch (mapsto_compare(ws_list[survivor], ws_list[i], cfg)) {
      case OrderVerdict::kBefore:
        survivor = i;
        break;
      case OrderVerdict::kAfter:
      case OrderVerdict::kEqual:
        break;
      case OrderVerdict::kConcurrent:
        throw Error(ErrorCode::kConcurrentFinalSets,
                    "candidates " + std::to_string(survivor) + " and " +
                        std::to_string(i) + " are concurrent");
    }
  }
  return survivor;
}

InformSet find_latest(const std::vector<InformSet>& z, const Config& cfg) {
  if (z.empty()) throw Error(ErrorCode::kInvalidInformSet, "empty candidate set");
  std::vector<std::vector<WitnessEntry>> ws;
  ws.reserve(z.size());
  for (const auto& is : z) ws.push_back(ws_of(is, cfg));
  return z[find_latest_index(ws, cfg)];
}

std::optional<std::vector<WitnessEntry>> choose_witness_entries(
    std::span<const WitnessEntry> t_witness, const Config& cfg) {
  std::map<TaggedValue, std::vector<WitnessEntry>> by_value;
  for (const auto& e : t_witness) by_value[e.value].push_back(e);

  const std::vector<WitnessEntry>* best = nullptr;
  Stamp best_stamp = 0;
  for (const auto& [value, entries] : by_value) {
    if (static_cast<int>(entries.size()) < cfg.quorum() || entries.empty()) continue;
    Stamp top = 0;
    for (const auto& e : entries) top = std::max(top, e.stamp);
    if (!best || entries.size() > best->size() ||
        (entries.size() == best->size() && top > best_stamp)) {
      best = &entries;
      best_stamp = top;
    }
  }
  if (!best) return std::nullopt;
  auto out = *best;
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.witness < b.witness; });
  return out;
}

namespace {

// Subsets of {0..n-1} ordered by size (descending), then lexicographically
// by their sorted member lists.
const std::vector<std::uint32_t>& subset_order(int n) {
  thread_local std::map<int, std::vector<std::uint32_t>> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<std::uint32_t> masks;
  for (std::uint32_t m = 1; m < (1u << n); ++m) masks.push_back(m);
  std::sort(masks.begin(), masks.end(), [](std::uint32_t a, std::uint32_t b) {
    const int pa = std::popcount(a), pb = std::popcount(b);
    if (pa != pb) return pa > pb;
    // Lexicographic on sorted member lists: the lowest differing bit
    // decides, and the mask containing it comes first.
    const std::uint32_t diff = a ^ b;
    const std::uint32_t low = diff & (~diff + 1);
    return (a & low) != 0;
  });
  return cache.emplace(n, std::move(masks)).first->second;
}

// Entries of `acc` that also appear, identically, in `entries`. Both are
// sorted by witness.
void intersect_into(std::vector<WitnessEntry>& acc,
                    const std::vector<WitnessEntry>& entries) {
  std::vector<WitnessEntry> out;
  auto it = entries.begin();
  for (auto& e : acc) {
    while (it != entries.end() && it->witness < e.witness) ++it;
    if (it != entries.end() && *it == e) out.push_back(std::move(e));
  }
  acc = std::move(out);
}

}  // namespace

std::optional<InformSet> choose_inform_set(
    std::span<const std::optional<WitnessSet>> t_inform, const Config& cfg) {
  const int n = static_cast<int>(t_inform.size());
  if (n > 20) throw Error(ErrorCode::kInvalidConfig, "too many readers for subset search");
  std::uint32_t present = 0;
  for (int i = 0; i < n; ++i) {
    if (t_inform[i]) present |= 1u << i;
  }
  const int q = cfg.quorum();
  if (std::popcount(present) < q) return std::nullopt;

  for (std::uint32_t mask : subset_order(n)) {
    if (std::popcount(mask) < q) break;
    if ((mask & ~present) != 0) continue;
    std::vector<WitnessEntry> acc;
    bool first = true;
    for (int i = 0; i < n && (first || static_cast<int>(acc.size()) >= q); ++i) {
      if (!(mask & (1u << i))) continue;
      if (first) {
        acc = t_inform[i]->entries;
        first = false;
      } else {
        intersect_into(acc, t_inform[i]->entries);
      }
    }
    if (static_cast<int>(acc.size()) < q || acc.empty()) continue;
    InformSet is;
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) is.members.push_back(*t_inform[i]);
    }
    return is;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Writer

std::vector<WriteAction> CorrectWritePlanner::plan(int, const Bytes& payload,
                                                   std::uint64_t& c,
                                                   const Config& cfg) const {
  ++c;
  const TaggedValue kv{c, payload};
  std::vector<WriteAction> actions;
  for (int i = 1; i <= cfg.n; ++i) {
    actions.push_back({WriteAction::Kind::kInit, i, kv});
  }
  actions.push_back({WriteAction::Kind::kAwaitAcks, 0, kv});
  return actions;
}

WriterMachine::WriterMachine(const Config& cfg, std::vector<WriteOp> ops,
                             std::shared_ptr<const WritePlanner> planner)
    : cfg_(cfg),
      ops_(std::move(ops)),
      planner_(std::move(planner)),
      acked_(static_cast<std::size_t>(cfg.n), false) {
  start_op();
}

void WriterMachine::start_op() {
  if (next_op_ >= ops_.size()) {
    phase_ = Phase::kDone;
    return;
  }
  phase_ = Phase::kGap;
  gap_ = ops_[next_op_].idle_before;
}

void WriterMachine::step(StepContext& ctx) {
  const auto me = ProcessId::writer();
  switch (phase_) {
    case Phase::kGap: {
      if (gap_ > 0) {
        --gap_;
        return;
      }
      begin_step_ = ctx.bank.tick();
      const auto& op = ops_[next_op_];
      actions_ = planner_->plan(static_cast<int>(next_op_), op.payload, c_, cfg_);
      pos_ = 0;
      std::fill(acked_.begin(), acked_.end(), false);
      acked_count_ = 0;
      HliEvent ev{begin_step_, me, HliKind::kInvoke, HliOp::kWrite,
                  static_cast<int>(next_op_), std::nullopt, op.payload, {}};
      if (planner_->correct() && !actions_.empty()) ev.value = actions_.front().kv;
      ctx.hli.push_back(std::move(ev));
      phase_ = actions_.empty() ? Phase::kRespond : Phase::kActions;
      return;
    }
    case Phase::kActions: {
      const WriteAction& act = actions_[pos_];
      switch (act.kind) {
        case WriteAction::Kind::kInit:
          ctx.bank.write(RegisterId::init(act.reader), codec::encode(act.kv), me);
          ++pos_;
          break;
        case WriteAction::Kind::kIdle:
          ++pos_;
          break;
        case WriteAction::Kind::kAwaitAcks:
          poll_ack(ctx, act.kv);
          break;
      }
      if (pos_ >= actions_.size()) phase_ = Phase::kRespond;
      return;
    }
    case Phase::kRespond: {
      const auto step = ctx.bank.tick();
      ctx.hli.push_back(HliEvent{step, me, HliKind::kResponse, HliOp::kWrite,
                                 static_cast<int>(next_op_), std::nullopt, {}, {}});
      ++next_op_;
      start_op();
      return;
    }
    case Phase::kDone:
      return;
  }
}

void WriterMachine::poll_ack(StepContext& ctx, const TaggedValue& kv) {
  const int n = cfg_.n;
  if (acked_count_ < cfg_.quorum()) {
    int i = cursor_;
    while (acked_[i]) i = (i + 1) % n;
    cursor_ = (i + 1) % n;
    const auto cv = ctx.bank.read(RegisterId::ack(i + 1), ProcessId::writer());
    const auto got = codec::decode_tagged(*cv.content);
    if (got && *got == kv && cv.last_write_step > begin_step_) {
      acked_[i] = true;
      ++acked_count_;
    }
  }
  if (acked_count_ >= cfg_.quorum()) {
    ++pos_;
    std::fill(acked_.begin(), acked_.end(), false);
    acked_count_ = 0;
  }
}

std::uint64_t WriterMachine::hash_state(const RegisterBank& bank) const {
  StateHasher h;
  h.add(static_cast<std::uint64_t>(phase_));
  h.add(next_op_);
  h.add(static_cast<std::uint64_t>(gap_));
  h.add(pos_);
  h.add(c_);
  h.add(static_cast<std::uint64_t>(cursor_));
  for (bool a : acked_) h.add(static_cast<std::uint64_t>(a));
  if (phase_ == Phase::kActions) {
    for (int i = 1; i <= cfg_.n; ++i) {
      h.add(static_cast<std::uint64_t>(
          bank.last_write_step(RegisterId::ack(i)) > begin_step_));
    }
  }
  return h.value();
}

// ---------------------------------------------------------------------------
// Reader

ReaderMachine::ReaderMachine(const Config& cfg, const Bytes& u0, int self,
                             std::vector<ReadOp> reads, const KeyRing& ring)
    : last_init_(initial_value(u0)),
      t_witness_(initial_entries(cfg, u0)),
      cfg_(cfg),
      u0_(u0),
      self_(self),
      reads_(std::move(reads)),
      t_inform_(static_cast<std::size_t>(cfg.n)),
      t_inform_bytes_(static_cast<std::size_t>(cfg.n)),
      last_ack_(initial_value(u0)),
      last_ack_evidence_(initial_entries(cfg, u0)),
      suspected_(static_cast<std::size_t>(cfg.n), false),
      finals_(static_cast<std::size_t>(cfg.n)) {
  if (self < 1 || self > cfg.n) {
    throw Error(ErrorCode::kUnknownProcess, "reader index " + std::to_string(self));
  }
  const auto init = initial_entries(cfg, u0);
  witness_set_ = make_witness_set(init, Signer(ring, id()));
  witness_set_bytes_ = codec::encode(witness_set_);
  InformSet is;
  for (int l = 1; l <= cfg.n; ++l) {
    is.members.push_back(make_witness_set(init, Signer(ring, ProcessId::reader(l))));
  }
  set_inform_set(std::move(is), init);
  if (!reads_.empty()) idle_iterations_ = reads_.front().idle_iterations_before;
}

void ReaderMachine::set_inform_set(InformSet is, std::vector<WitnessEntry> ws) {
  inform_set_ = std::move(is);
  inform_ws_ = std::move(ws);
  inform_set_bytes_ = codec::encode(inform_set_);
}

std::optional<WitnessEntry> ReaderMachine::next_publication(const TaggedValue& init) {
  if (init == last_init_) return std::nullopt;
  last_init_ = init;
  ++s_;
  return WitnessEntry{init, s_, self_};
}

Bytes ReaderMachine::witness_payload(const WitnessEntry& mine, int) const {
  return codec::encode(mine);
}

Bytes ReaderMachine::inform_payload(int, StepContext&) { return witness_set_bytes_; }

Bytes ReaderMachine::final_payload(int, StepContext&) { return inform_set_bytes_; }

void ReaderMachine::step(StepContext& ctx) {
  if (phase_ == Phase::kBoundary) {
    if (next_read_ < reads_.size() && idle_iterations_ == 0) {
      in_read_ = true;
      ctx.hli.push_back(HliEvent{ctx.bank.tick(), id(), HliKind::kInvoke,
                                 HliOp::kRead, static_cast<int>(next_read_),
                                 std::nullopt, {}, {}});
      phase_ = Phase::kReadInit;
      return;
    }
    phase_ = Phase::kReadInit;
  }
  if (phase_ == Phase::kRespond) {
    ctx.hli.push_back(HliEvent{ctx.bank.tick(), id(), HliKind::kResponse,
                               HliOp::kRead, static_cast<int>(next_read_),
                               last_ack_, {}, last_ack_evidence_});
    in_read_ = false;
    ++next_read_;
    if (next_read_ < reads_.size()) {
      idle_iterations_ = reads_[next_read_].idle_iterations_before;
    }
    phase_ = Phase::kBoundary;
    return;
  }
  register_step(ctx);
}

void ReaderMachine::register_step(StepContext& ctx) {
  RegisterBank& bank = ctx.bank;
  const ProcessId me = id();
  const int n = cfg_.n;
  switch (phase_) {
    case Phase::kReadInit: {
      const auto cv = bank.read(RegisterId::init(self_), me);
      const auto kv = codec::decode_tagged(*cv.content);
      publish_ = next_publication(kv ? *kv : last_init_);
      phase_ = publish_ ? Phase::kWriteWitness : Phase::kReadWitness;
      idx_ = 1;
      return;
    }
    case Phase::kWriteWitness:
      bank.write(RegisterId::witness(self_, idx_), witness_payload(*publish_, idx_), me);
      if (++idx_ > n) {
        phase_ = Phase::kReadWitness;
        idx_ = 1;
      }
      return;
    case Phase::kReadWitness: {
      const auto cv = bank.read(RegisterId::witness(idx_, self_), me);
      const auto e = codec::decode_entry(*cv.content);
      WitnessEntry& slot = t_witness_[idx_ - 1];
      if (!e || e->witness != idx_) {
        suspect(idx_, ctx, "malformed witness entry");
      } else if (e->stamp > slot.stamp) {
        slot = *e;
      } else if (e->stamp < slot.stamp) {
        suspect(idx_, ctx, "witness stamp regressed");
      } else if (e->value != slot.value) {
        suspect(idx_, ctx, "equal witness stamp with a different value");
      }
      if (++idx_ > n) after_witness_collection(ctx);
      return;
    }
    case Phase::kWriteInform:
      bank.write(RegisterId::inform(self_, idx_), inform_payload(idx_, ctx), me);
      if (++idx_ > n) {
        phase_ = Phase::kReadInform;
        idx_ = 1;
      }
      return;
    case Phase::kReadInform: {
      const auto cv = bank.read(RegisterId::inform(idx_, self_), me);
      auto& bytes = t_inform_bytes_[idx_ - 1];
      if (*cv.content != bytes || bytes.empty()) {
        bytes = *cv.content;
        auto ws = codec::decode_witness_set(bytes);
        if (ws && verify_witness_set(*ws, ctx.ring, cfg_, idx_)) {
          t_inform_[idx_ - 1] = std::move(ws);
        } else {
          t_inform_[idx_ - 1].reset();
        }
        inform_dirty_ = true;
      }
      if (!t_inform_[idx_ - 1]) suspect(idx_, ctx, "unverifiable witness set");
      if (++idx_ > n) after_inform_collection();
      return;
    }
    case Phase::kWriteFinalFormed:
    case Phase::kWriteFinalAdopted:
      bank.write(RegisterId::final_(self_, idx_), final_payload(idx_, ctx), me);
      if (++idx_ > n) {
        phase_ = phase_ == Phase::kWriteFinalFormed ? Phase::kWriteAckFormed
                                                    : Phase::kWriteAckAdopted;
      }
      return;
    case Phase::kWriteAckFormed:
      write_ack(ctx);
      phase_ = Phase::kReadFinal;
      idx_ = 1;
      return;
    case Phase::kReadFinal: {
      const auto cv = bank.read(RegisterId::final_(idx_, self_), me);
      FinalSlot& slot = finals_[idx_ - 1];
      if (*cv.content != slot.bytes || slot.bytes.empty()) {
        slot.bytes = *cv.content;
        slot.is = codec::decode_inform_set(slot.bytes);
        slot.ws.clear();
        if (slot.is && verify_inform_set(*slot.is, ctx.ring, cfg_)) {
          slot.ws = ws_of(*slot.is, cfg_);
        } else {
          slot.is.reset();
        }
      }
      if (!slot.is) suspect(idx_, ctx, "invalid final inform set");
      if (++idx_ > n) after_final_collection(ctx);
      return;
    }
    case Phase::kWriteAckAdopted:
      write_ack(ctx);
      end_iteration();
      return;
    case Phase::kBoundary:
    case Phase::kRespond:
      return;
  }
}

void ReaderMachine::after_witness_collection(StepContext& ctx) {
  idx_ = 1;
  auto entries = choose_witness_entries(t_witness_, cfg_);
  if (!entries) {
    phase_ = Phase::kReadFinal;
    return;
  }
  if (*entries != witness_set_.entries) {
    witness_set_ = make_witness_set(std::move(*entries), Signer(ctx.ring, id()));
    witness_set_bytes_ = codec::encode(witness_set_);
  }
  phase_ = Phase::kWriteInform;
}

void ReaderMachine::after_inform_collection() {
  idx_ = 1;
  if (inform_dirty_) {
    formed_ = choose_inform_set(t_inform_, cfg_);
    inform_dirty_ = false;
  }
  if (!formed_) {
    phase_ = Phase::kReadFinal;
    return;
  }
  set_inform_set(*formed_, ws_of(*formed_, cfg_));
  phase_ = Phase::kWriteFinalFormed;
}

void ReaderMachine::after_final_collection(StepContext& ctx) {
  idx_ = 1;
  std::vector<std::vector<WitnessEntry>> ws_list{inform_ws_};
  std::vector<const FinalSlot*> sources{nullptr};
  for (const auto& slot : finals_) {
    if (!slot.is) continue;
    ws_list.push_back(slot.ws);
    sources.push_back(&slot);
  }
  std::size_t pick = 0;
  try {
    pick = find_latest_index(ws_list, cfg_);
  } catch (const Error& err) {
    // Unreachable within the resilience thresholds; surfaced for the
    // checker instead of breaking the tie silently.
    if (last_diag_ != err.what()) {
      last_diag_ = err.what();
      ctx.diagnostics.push_back(
          Diagnostic{ctx.bank.now() - 1, id(), err.code(), err.what()});
    }
    end_iteration();
    return;
  }
  if (pick == 0 || sources[pick]->bytes == inform_set_bytes_) {
    end_iteration();
    return;
  }
  set_inform_set(*sources[pick]->is, sources[pick]->ws);
  phase_ = Phase::kWriteFinalAdopted;
}

void ReaderMachine::write_ack(StepContext& ctx) {
  const TaggedValue& v = inform_ws_.front().value;
  ctx.bank.write(RegisterId::ack(self_), codec::encode(v), id());
  last_ack_ = v;
  last_ack_evidence_ = inform_ws_;
}

void ReaderMachine::end_iteration() {
  ++iterations_;
  if (in_read_) {
    phase_ = Phase::kRespond;
    return;
  }
  if (idle_iterations_ > 0) --idle_iterations_;
  phase_ = Phase::kBoundary;
}

void ReaderMachine::suspect(int i, StepContext& ctx, std::string_view why) {
  if (suspected_[i - 1]) return;
  suspected_[i - 1] = true;
  ctx.diagnostics.push_back(Diagnostic{ctx.bank.now() - 1, id(),
                                       ErrorCode::kSuspectedProcess,
                                       "r" + std::to_string(i) + ": " + std::string(why), i});
}

std::uint64_t ReaderMachine::hash_state(const RegisterBank&) const {
  StateHasher h;
  h.add(static_cast<std::uint64_t>(phase_));
  h.add(static_cast<std::uint64_t>(idx_));
  h.add(s_);
  h.add(last_init_);
  for (const auto& e : t_witness_) h.add(e);
  for (const auto& b : t_inform_bytes_) h.add(std::string_view(b));
  h.add(std::string_view(witness_set_bytes_));
  h.add(std::string_view(inform_set_bytes_));
  for (const auto& f : finals_) h.add(std::string_view(f.bytes));
  h.add(last_ack_);
  for (bool b : suspected_) h.add(static_cast<std::uint64_t>(b));
  h.add(static_cast<std::uint64_t>(publish_.has_value()));
  if (publish_) h.add(*publish_);
  h.add(next_read_);
  h.add(static_cast<std::uint64_t>(idle_iterations_));
  h.add(static_cast<std::uint64_t>(in_read_));
  hash_extra(h);
  return h.value();
}

}  // namespace bzreg
