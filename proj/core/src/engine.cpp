#include "bzreg/engine.hpp"

#include <algorithm>
#include <random>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "bzreg/codec.hpp"
#include "bzreg/error.hpp"

namespace bzreg {
namespace {

using ordered_json = nlohmann::ordered_json;

class Scheduler {
 public:
  Scheduler(const ScheduleSpec& spec, int slots)
      : spec_(spec), rng_(spec.seed), last_run_(slots, 0), window_(0) {
    if (spec.fairness > 0) window_ = static_cast<std::uint64_t>(slots) * spec.fairness;
  }

  // Slot to run at scheduled step `now`, or -1 when nothing is enabled.
  int pick(const std::vector<bool>& enabled, std::uint64_t now) {
    const int slots = static_cast<int>(enabled.size());
    if (std::none_of(enabled.begin(), enabled.end(), [](bool b) { return b; })) return -1;
    int chosen = -1;
    switch (spec_.kind) {
      case ScheduleSpec::Kind::kScripted:
        chosen = scripted(enabled);
        if (chosen < 0) chosen = round_robin(enabled);
        break;
      case ScheduleSpec::Kind::kRoundRobin:
        chosen = round_robin(enabled);
        break;
      case ScheduleSpec::Kind::kSeededRandom: {
        chosen = starving(enabled, now);
        if (chosen < 0) {
          std::vector<int> live;
          for (int s = 0; s < slots; ++s) {
            if (enabled[s]) live.push_back(s);
          }
          chosen = live[rng_() % live.size()];
        }
        break;
      }
    }
    last_run_[chosen] = now;
    rr_last_ = chosen;
    return chosen;
  }

 private:
  int scripted(const std::vector<bool>& enabled) {
    const auto& script = spec_.script;
    std::size_t skipped_in_pass = 0;
    while (!script.empty()) {
      if (pos_ >= script.size()) {
        if (!spec_.repeat || skipped_in_pass >= script.size()) return -1;
        pos_ = 0;
      }
      const int s = script[pos_++];
      if (s >= 0 && s < static_cast<int>(enabled.size()) && enabled[s]) return s;
      ++skipped_in_pass;
    }
    return -1;
  }

  int round_robin(const std::vector<bool>& enabled) {
    const int slots = static_cast<int>(enabled.size());
    for (int d = 1; d <= slots; ++d) {
      const int s = (rr_last_ + d) % slots;
      if (enabled[s]) return s;
    }
    return -1;
  }

  int starving(const std::vector<bool>& enabled, std::uint64_t now) {
    if (window_ == 0) return -1;
    int worst = -1;
    for (int s = 0; s < static_cast<int>(enabled.size()); ++s) {
      if (!enabled[s] || now - last_run_[s] + 1 < window_) continue;
      if (worst < 0 || last_run_[s] < last_run_[worst]) worst = s;
    }
    return worst;
  }

  ScheduleSpec spec_;
  std::mt19937_64 rng_;
  std::vector<std::uint64_t> last_run_;
  std::uint64_t window_;
  std::size_t pos_ = 0;
  int rr_last_ = -1;
};

struct World {
  RegisterBank bank;
  std::vector<std::unique_ptr<ProcessMachine>> procs;
  std::vector<HliEvent> hli;
  std::vector<Diagnostic> diagnostics;
  std::uint64_t hli_hash = 0;

  World(RegisterBank b, std::vector<std::unique_ptr<ProcessMachine>> p)
      : bank(std::move(b)), procs(std::move(p)) {}

  World clone() const {
    std::vector<std::unique_ptr<ProcessMachine>> copy;
    copy.reserve(procs.size());
    for (const auto& m : procs) copy.push_back(m->clone());
    World w(bank, std::move(copy));
    w.hli = hli;
    w.hli_hash = hli_hash;
    return w;
  }

  bool obligations() const {
    return std::any_of(procs.begin(), procs.end(),
                       [](const auto& m) { return m->has_obligations(); });
  }

  std::vector<bool> enabled() const {
    std::vector<bool> out(procs.size());
    for (std::size_t i = 0; i < procs.size(); ++i) out[i] = procs[i]->enabled();
    return out;
  }

  void step(int slot, const KeyRing& ring) {
    const std::size_t before = hli.size();
    StepContext ctx{bank, ring, hli, diagnostics};
    procs[slot]->step(ctx);
    for (std::size_t i = before; i < hli.size(); ++i) {
      StateHasher h;
      h.add(hli_hash);
      h.add(static_cast<std::uint64_t>(hli[i].process.slot()));
      h.add(static_cast<std::uint64_t>(hli[i].kind));
      if (hli[i].value) h.add(*hli[i].value);
      for (const auto& e : hli[i].evidence) h.add(e);
      hli_hash = h.value();
    }
  }

  std::uint64_t state_hash() const {
    StateHasher h;
    h.add(bank.content_hash());
    h.add(hli_hash);
    for (const auto& m : procs) h.add(m->hash_state(bank));
    return h.value();
  }
};

World make_world(const RunSpec& spec, const KeyRing& ring) {
  return World(RegisterBank::init(spec.cfg, spec.u0, ring), make_machines(spec, ring));
}

ExecutionHistory finish(const RunSpec& spec, World& w, std::vector<int> picks,
                        RunStatus status) {
  ExecutionHistory h;
  h.cfg = spec.cfg;
  h.u0 = spec.u0;
  h.writer_correct = !spec.writer.byzantine();
  h.byzantine = spec.byzantine_readers();
  h.hli = std::move(w.hli);
  h.trace = w.bank.take_trace();
  h.diagnostics = std::move(w.diagnostics);
  h.scheduled_steps = picks.size();
  h.picks = std::move(picks);
  h.status = status;
  return h;
}

std::string printable(const Bytes& b) {
  const bool plain = std::all_of(b.begin(), b.end(), [](char c) {
    return c >= 0x20 && c < 0x7f;
  });
  if (plain) return b;
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out = "0x";
  for (unsigned char c : b) {
    out.push_back(kHex[c >> 4]);
    out.push_back(kHex[c & 0xf]);
  }
  return out;
}

ordered_json value_json(const TaggedValue& v) {
  return ordered_json::array({v.k, printable(v.u)});
}

}  // namespace

std::vector<int> RunSpec::byzantine_readers() const {
  std::vector<int> out;
  for (const auto& [i, s] : readers) {
    if (s.byzantine()) out.push_back(i);
  }
  return out;
}

const ReaderStrategy& RunSpec::reader_strategy(int i) const {
  static const ReaderStrategy kCorrect{};
  auto it = readers.find(i);
  return it == readers.end() ? kCorrect : it->second;
}

std::string_view to_string(RunStatus s) {
  switch (s) {
    case RunStatus::kComplete: return "complete";
    case RunStatus::kStepLimitExhausted: return "StepLimitExhausted";
    case RunStatus::kDeadlock: return "deadlock";
  }
  return "?";
}

bool ExecutionHistory::correct_reader(int i) const {
  return !std::binary_search(byzantine.begin(), byzantine.end(), i);
}

std::vector<std::unique_ptr<ProcessMachine>> make_machines(const RunSpec& spec,
                                                           const KeyRing& ring) {
  const Config& cfg = spec.cfg;
  for (const auto& [i, s] : spec.readers) {
    if (i < 1 || i > cfg.n) {
      throw Error(ErrorCode::kScenarioConfig, "reader index " + std::to_string(i) + " out of range");
    }
  }
  std::vector<std::unique_ptr<ProcessMachine>> procs;
  procs.push_back(std::make_unique<WriterMachine>(cfg, spec.workload.writes,
                                                  make_write_planner(spec.writer)));
  for (int i = 1; i <= cfg.n; ++i) {
    auto it = spec.workload.reads.find(i);
    std::vector<ReadOp> reads = it == spec.workload.reads.end() ? std::vector<ReadOp>{} : it->second;
    const ReaderStrategy& s = spec.reader_strategy(i);
    if (s.byzantine()) reads.clear();
    procs.push_back(make_reader_machine(cfg, spec.u0, i, s, std::move(reads), ring));
  }
  return procs;
}

ExecutionHistory run(const RunSpec& spec, const KeyRing& ring) {
  World w = make_world(spec, ring);
  Scheduler sched(spec.schedule, spec.cfg.n + 1);
  std::vector<int> picks;
  std::uint64_t tail = spec.tail_steps;
  RunStatus status = RunStatus::kComplete;
  while (true) {
    if (!w.obligations()) {
      if (tail == 0) break;
      --tail;
    }
    if (picks.size() >= spec.step_limit) {
      status = w.obligations() ? RunStatus::kStepLimitExhausted : RunStatus::kComplete;
      break;
    }
    const int slot = sched.pick(w.enabled(), picks.size());
    if (slot < 0) {
      status = w.obligations() ? RunStatus::kDeadlock : RunStatus::kComplete;
      break;
    }
    w.step(slot, ring);
    picks.push_back(slot);
  }
  return finish(spec, w, std::move(picks), status);
}

Workload random_workload(std::uint64_t seed, const std::vector<int>& readers,
                         const WorkloadShape& shape) {
  std::mt19937_64 rng(seed ^ 0x5bd1e9955bd1e995ull);
  auto uniform = [&rng](int lo, int hi) {
    return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
  };
  Workload w;
  const int writes = uniform(1, std::max(1, shape.max_writes));
  for (int i = 1; i <= writes; ++i) {
    w.writes.push_back(WriteOp{"v" + std::to_string(i), uniform(0, shape.max_write_gap)});
  }
  if (!readers.empty() && shape.max_reads > 0) {
    const int reads = uniform(1, shape.max_reads);
    for (int r = 0; r < reads; ++r) {
      const int who = readers[rng() % readers.size()];
      w.reads[who].push_back(ReadOp{uniform(0, shape.max_read_gap)});
    }
  }
  return w;
}

std::string export_records(const ExecutionHistory& h) {
  std::ostringstream os;
  ordered_json meta{{"kind", "meta"},
                    {"n", h.cfg.n},
                    {"t", h.cfg.t},
                    {"writer_byzantine", !h.writer_correct},
                    {"byzantine", h.byzantine},
                    {"u0", printable(h.u0)},
                    {"status", std::string(to_string(h.status))},
                    {"scheduled_steps", h.scheduled_steps}};
  os << meta.dump() << '\n';
  for (const auto& e : h.hli) {
    ordered_json r{{"kind", "hli"},
                   {"step", e.step},
                   {"process", to_string(e.process)},
                   {"event", e.kind == HliKind::kInvoke ? "invoke" : "response"},
                   {"op", e.op == HliOp::kRead ? "read" : "write"},
                   {"index", e.op_index}};
    if (e.value) r["value"] = value_json(*e.value);
    if (!e.payload.empty()) r["payload"] = printable(e.payload);
    if (!e.evidence.empty()) {
      ordered_json ev = ordered_json::array();
      for (const auto& w : e.evidence) ev.push_back({w.witness, w.stamp});
      r["evidence"] = std::move(ev);
    }
    os << r.dump() << '\n';
  }
  for (const auto& t : h.trace) {
    ordered_json r{{"kind", "reg"},
                   {"step", t.step},
                   {"op", t.op == RegOp::kRead ? "read" : "write"},
                   {"register", to_string(t.reg)},
                   {"caller", to_string(t.caller)},
                   {"digest", codec::digest_hex(*t.value)}};
    os << r.dump() << '\n';
  }
  for (const auto& d : h.diagnostics) {
    ordered_json r{{"kind", "diagnostic"},
                   {"step", d.step},
                   {"process", to_string(d.process)},
                   {"code", std::string(to_string(d.code))},
                   {"message", printable(d.message)}};
    os << r.dump() << '\n';
  }
  return os.str();
}

std::string history_digest(const ExecutionHistory& h) {
  return codec::digest_hex(export_records(h));
}

namespace {

// What one step touched. HLI events order against everything, so that
// reordering commuting steps never moves a register access across an
// invocation or response.
struct Footprint {
  enum class Kind : std::uint8_t { kLocal, kRead, kWrite, kGlobal };
  Kind kind = Kind::kLocal;
  std::size_t cell = 0;
};

bool commute(const Footprint& a, const Footprint& b) {
  using K = Footprint::Kind;
  if (a.kind == K::kGlobal || b.kind == K::kGlobal) return false;
  if (a.kind == K::kLocal || b.kind == K::kLocal) return true;
  if (a.cell != b.cell) return true;
  return a.kind == K::kRead && b.kind == K::kRead;
}

struct Asleep {
  int slot = 0;
  Footprint fp;
};

}  // namespace

EnumerationStats enumerate_schedules(
    const RunSpec& spec, const KeyRing& ring, const EnumerationLimits& limits,
    const std::function<void(const ExecutionHistory&)>& visit) {
  EnumerationStats stats;
  struct Seen {
    std::uint64_t depth = 0;
    std::uint64_t asleep = 0;  // slot mask
  };
  std::unordered_map<std::uint64_t, Seen> seen;
  std::vector<int> picks;

  // Histories are rebuilt by replaying the picks with tracing on, so the
  // search itself never copies traces.
  auto emit = [&](RunStatus status) {
    RunSpec replay = spec;
    replay.schedule = ScheduleSpec{ScheduleSpec::Kind::kScripted, 0, 0, picks, false};
    replay.step_limit = picks.size();
    replay.tail_steps = 0;
    ExecutionHistory h = run(replay, ring);
    h.status = status;
    visit(h);
  };

  // Depth-first search with sleep sets: after exploring slot s from a
  // state, s stays asleep in sibling subtrees until a step that does not
  // commute with it runs, since every schedule that runs it earlier has
  // already been covered.
  std::function<void(World&, std::vector<Asleep>)> dfs = [&](World& w,
                                                            std::vector<Asleep> sleep) {
    if (++stats.nodes > limits.max_nodes) {
      throw Error(ErrorCode::kBoundTooLarge,
                  "more than " + std::to_string(limits.max_nodes) + " states");
    }
    if (!w.obligations()) {
      ++stats.histories;
      emit(RunStatus::kComplete);
      return;
    }
    if (picks.size() >= limits.depth_bound) {
      ++stats.truncated;
      return;
    }
    if (limits.prune) {
      std::uint64_t mask = 0;
      for (const auto& a : sleep) mask |= std::uint64_t{1} << a.slot;
      const Seen here{picks.size(), mask};
      auto [it, inserted] = seen.emplace(w.state_hash(), here);
      if (!inserted) {
        // Covered when the earlier visit was no deeper and explored a
        // superset of what this one would.
        if (it->second.depth <= here.depth && (it->second.asleep & ~mask) == 0) {
          ++stats.pruned;
          return;
        }
        it->second = here;
      }
    }
    const auto enabled = w.enabled();
    for (int slot = 0; slot < static_cast<int>(enabled.size()); ++slot) {
      if (!enabled[slot]) continue;
      if (std::any_of(sleep.begin(), sleep.end(),
                      [&](const Asleep& a) { return a.slot == slot; })) {
        ++stats.slept;
        continue;
      }
      World child = w.clone();
      child.bank.clear_last_access();
      const std::size_t hli_before = child.hli.size();
      child.step(slot, ring);
      Footprint fp;
      if (child.hli.size() != hli_before) {
        fp.kind = Footprint::Kind::kGlobal;
      } else if (const auto acc = child.bank.last_access()) {
        fp.kind = acc->op == RegOp::kWrite ? Footprint::Kind::kWrite : Footprint::Kind::kRead;
        fp.cell = acc->cell;
      }
      std::vector<Asleep> next;
      if (limits.sleep_sets) {
        for (const auto& a : sleep) {
          if (commute(a.fp, fp)) next.push_back(a);
        }
      }
      picks.push_back(slot);
      dfs(child, std::move(next));
      picks.pop_back();
      if (limits.sleep_sets) sleep.push_back(Asleep{slot, fp});
    }
  };

  World root = make_world(spec, ring);
  root.bank.set_tracing(false);
  dfs(root, {});
  return stats;
}

}  // namespace bzreg
