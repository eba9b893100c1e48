#include "bzreg/checker.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "bzreg/codec.hpp"
#include "bzreg/crypto.hpp"
#include "bzreg/error.hpp"
#include "bzreg/registers.hpp"
#include "bzreg/timestamp.hpp"

namespace bzreg {
namespace {

constexpr std::uint64_t kNever = std::numeric_limits<std::uint64_t>::max();

Verdict pass(std::string_view name) { return Verdict{std::string(name), VerdictStatus::kPass, {}, {}}; }

Verdict violation(std::string_view name, std::string detail, std::vector<std::string> witness = {}) {
  return Verdict{std::string(name), VerdictStatus::kViolation, std::move(detail), std::move(witness)};
}

Verdict skipped(std::string_view name, std::string why) {
  return Verdict{std::string(name), VerdictStatus::kSkipped, std::move(why), {}};
}

std::string ws_string(const std::vector<WitnessEntry>& ws) {
  std::ostringstream os;
  os << "{";
  for (std::size_t i = 0; i < ws.size(); ++i) {
    if (i) os << ",";
    os << ws[i].witness << ":" << ws[i].stamp;
  }
  return os.str() + "}";
}

// Compare that folds comparison errors into Concurrent.
OrderVerdict safe_compare(const std::vector<WitnessEntry>& a, const std::vector<WitnessEntry>& b,
                          const Config& cfg, std::string* why = nullptr) {
  try {
    return mapsto_compare(a, b, cfg);
  } catch (const Error& e) {
    if (why) *why = e.what();
    return OrderVerdict::kConcurrent;
  }
}

int stab_index(const std::vector<StabilizationEvent>& stabs, const std::vector<WitnessEntry>& ws) {
  for (std::size_t i = 0; i < stabs.size(); ++i) {
    if (stabs[i].ws == ws) return static_cast<int>(i);
  }
  return -1;
}

std::string read_label(const ReadRecord& r) {
  return "r" + std::to_string(r.reader) + " read#" + std::to_string(r.op_index);
}

std::string class_label(const std::vector<StabilizationEvent>& stabs, const MapstoChain& chain,
                        int rank) {
  if (rank < 0) return "?";
  const auto& s = stabs[chain.classes[rank].front()];
  return "#" + std::to_string(rank) + " " + to_string(s.value) + " " + ws_string(s.ws);
}

}  // namespace

const std::vector<std::string_view>& all_properties() {
  static const std::vector<std::string_view> kAll{
      property::kReplay,
      property::kTotalOrder,
      property::kFullTimestamps,
      property::kGenuineAdvance,
      property::kStabilizationClasses,
      property::kWriteStabilization,
      property::kRegisterLinearizability,
      property::kViewConsistency,
      property::kTotalOrderingReads,
      property::kByzantineLinearization,
      property::kAckMonotonic,
      property::kDiagnostics,
  };
  return kAll;
}

std::string_view to_string(WriteClass c) {
  switch (c) {
    case WriteClass::kCorrect: return "Correct";
    case WriteClass::kPotentialPseudoCorrect: return "PotentialPseudoCorrect";
    case WriteClass::kPseudoCorrect: return "PseudoCorrect";
    case WriteClass::kNeither: return "NeitherClass";
  }
  return "?";
}

std::string_view to_string(VerdictStatus s) {
  switch (s) {
    case VerdictStatus::kPass: return "pass";
    case VerdictStatus::kViolation: return "violation";
    case VerdictStatus::kSkipped: return "skipped";
  }
  return "?";
}

std::string describe(const HliEvent& e) {
  std::ostringstream os;
  os << "@" << e.step << " " << e.process << " "
     << (e.op == HliOp::kRead ? "read#" : "write#") << e.op_index << " "
     << (e.kind == HliKind::kInvoke ? "invoke" : "response");
  if (e.value) os << " " << *e.value;
  if (!e.evidence.empty()) os << " ws" << ws_string(e.evidence);
  return os.str();
}

std::string describe(const StabilizationEvent& s) {
  std::ostringstream os;
  os << "@" << s.step << " stabilize " << s.value << " ws" << ws_string(s.ws);
  if (s.row_owner) os << " row r" << s.row_owner;
  return os.str();
}

std::string describe(const ReadRecord& r) {
  std::ostringstream os;
  os << read_label(r) << " [" << r.invoke << "," << r.response << "] -> " << r.value
     << " ws" << ws_string(r.evidence);
  return os.str();
}

// ---------------------------------------------------------------------------
// Stabilizations

std::vector<StabilizationEvent> detect_stabilizations(const ExecutionHistory& h,
                                                      const KeyRing& ring) {
  const Config& cfg = h.cfg;
  const int n = cfg.n;
  const RegisterBank init = RegisterBank::init(cfg, h.u0, ring);

  std::vector<std::vector<Bytes>> rows(n + 1, std::vector<Bytes>(n + 1));
  for (int l = 1; l <= n; ++l) {
    for (int j = 1; j <= n; ++j) rows[l][j] = init.peek(RegisterId::final_(l, j));
  }

  std::vector<StabilizationEvent> out;
  std::set<std::vector<WitnessEntry>> seen;
  std::map<Bytes, std::optional<std::pair<InformSet, std::vector<WitnessEntry>>>> cache;

  auto consider = [&](int owner, std::uint64_t step) {
    const auto& row = rows[owner];
    for (int j = 2; j <= n; ++j) {
      if (row[j] != row[1]) return;
    }
    auto it = cache.find(row[1]);
    if (it == cache.end()) {
      std::optional<std::pair<InformSet, std::vector<WitnessEntry>>> parsed;
      if (auto is = codec::decode_inform_set(row[1]); is && verify_inform_set(*is, ring, cfg)) {
        parsed.emplace(*is, ws_of(*is, cfg));
      }
      it = cache.emplace(row[1], std::move(parsed)).first;
    }
    if (!it->second) return;
    const auto& [is, ws] = *it->second;
    if (!seen.insert(ws).second) return;
    out.push_back(StabilizationEvent{ws.front().value, is, ws, partial_timestamp(ws, cfg), step,
                                     step == 0 ? 0 : owner});
  };

  for (int l = 1; l <= n; ++l) {
    if (h.correct_reader(l)) consider(l, 0);
  }
  for (const auto& ev : h.trace) {
    if (ev.op != RegOp::kWrite || ev.reg.family != Family::kFinal) continue;
    const int owner = ev.reg.writer_end.index;
    rows[owner][ev.reg.reader_end.index] = *ev.value;
    if (h.correct_reader(owner)) consider(owner, ev.step);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Classification

const ValueEvidence* WriteClassification::find(const TaggedValue& v) const {
  auto it = std::lower_bound(values.begin(), values.end(), v,
                             [](const ValueEvidence& e, const TaggedValue& x) { return e.value < x; });
  return it != values.end() && it->value == v ? &*it : nullptr;
}

std::vector<WriteRecord> collect_writes(const ExecutionHistory& h) {
  std::vector<WriteRecord> out;
  for (const auto& e : h.hli) {
    if (!e.process.is_writer()) continue;
    if (e.kind == HliKind::kInvoke) {
      WriteRecord w;
      w.op_index = e.op_index;
      w.invoke = e.step;
      w.value = e.value;
      out.push_back(w);
    } else if (!out.empty() && out.back().op_index == e.op_index) {
      out.back().response = e.step;
      out.back().completed = true;
    }
  }
  return out;
}

WriteClassification classify_writes(const ExecutionHistory& h,
                                    const std::vector<StabilizationEvent>& stabs) {
  const Config& cfg = h.cfg;
  const int n = cfg.n;
  const auto writes = collect_writes(h);

  auto op_at = [&writes](std::uint64_t step) {
    for (const auto& w : writes) {
      if (w.invoke < step && step < w.response) return w.op_index;
    }
    return -1;
  };

  std::map<TaggedValue, ValueEvidence> ev;
  auto entry = [&ev](const TaggedValue& v) -> ValueEvidence& {
    auto& e = ev[v];
    e.value = v;
    return e;
  };

  const TaggedValue init = initial_value(h.u0);
  entry(init).initial = true;

  // Per op: readers whose Init got each value, and readers whose fresh ack
  // of it the writer read.
  std::map<std::pair<int, TaggedValue>, std::set<int>> op_inits;
  std::map<std::pair<int, TaggedValue>, std::set<int>> op_acks;
  std::vector<std::uint64_t> ack_written(n + 1, 0);
  std::map<TaggedValue, std::set<int>> byz_published;

  for (const auto& t : h.trace) {
    const Family f = t.reg.family;
    if (t.op == RegOp::kWrite) {
      if (f == Family::kInit) {
        auto v = codec::decode_tagged(*t.value);
        if (!v) continue;
        const int r = t.reg.reader_end.index;
        const int op = op_at(t.step);
        entry(*v).inits.push_back(InitWrite{r, t.step, op});
        if (op >= 0) op_inits[{op, *v}].insert(r);
      } else if (f == Family::kAck) {
        ack_written[t.reg.writer_end.index] = t.step;
      } else if (!h.correct_reader(t.reg.writer_end.index)) {
        const int b = t.reg.writer_end.index;
        if (f == Family::kWitness) {
          if (auto e = codec::decode_entry(*t.value); e && e->witness == b) byz_published[e->value].insert(b);
        } else if (f == Family::kInform) {
          if (auto ws = codec::decode_witness_set(*t.value)) {
            for (const auto& e : ws->entries) {
              if (e.witness == b) byz_published[e.value].insert(b);
            }
          }
        }
      }
    } else if (f == Family::kAck && t.caller.is_writer()) {
      auto v = codec::decode_tagged(*t.value);
      const int r = t.reg.writer_end.index;
      const int op = op_at(t.step);
      if (!v || op < 0) continue;
      if (ack_written[r] > writes[op].invoke) op_acks[{op, *v}].insert(r);
    }
  }
  for (const auto& s : stabs) entry(s.value).stabilized = true;

  // Correct first: crossing is judged against correct values' stabilizations.
  std::vector<const StabilizationEvent*> correct_stabs;
  for (auto& [v, e] : ev) {
    for (const auto& iw : e.inits) e.latest_op = std::max(e.latest_op, iw.op);
    if (e.initial) {
      e.cls = WriteClass::kCorrect;
    } else {
      for (const auto& w : writes) {
        if (!w.completed) continue;
        auto ii = op_inits.find({w.op_index, v});
        auto ai = op_acks.find({w.op_index, v});
        if (ii != op_inits.end() && static_cast<int>(ii->second.size()) == n && ai != op_acks.end() &&
            static_cast<int>(ai->second.size()) >= cfg.quorum()) {
          e.cls = WriteClass::kCorrect;
          e.correct_op = w.op_index;
          break;
        }
      }
    }
    if (e.cls == WriteClass::kCorrect) {
      for (const auto& s : stabs) {
        if (s.value == v) correct_stabs.push_back(&s);
      }
    }
  }

  for (auto& [v, e] : ev) {
    if (e.cls == WriteClass::kCorrect) continue;
    std::set<int> support;
    for (const auto& iw : e.inits) support.insert(iw.reader);
    if (auto it = byz_published.find(v); it != byz_published.end()) support.insert(it->second.begin(), it->second.end());
    e.support.assign(support.begin(), support.end());
    for (const auto& s : stabs) {
      if (s.value != v) continue;
      for (const auto* c : correct_stabs) {
        if (safe_compare(s.ws, c->ws, cfg) == OrderVerdict::kConcurrent) e.crosses_correct = true;
      }
    }
    const bool potential = static_cast<int>(support.size()) >= cfg.quorum() && !e.crosses_correct;
    if (!potential) {
      e.cls = WriteClass::kNeither;
    } else {
      e.cls = e.stabilized ? WriteClass::kPseudoCorrect : WriteClass::kPotentialPseudoCorrect;
    }
  }
  for (auto& [v, e] : ev) {
    if (e.cls != WriteClass::kCorrect) continue;
    std::set<int> support;
    for (const auto& iw : e.inits) support.insert(iw.reader);
    e.support.assign(support.begin(), support.end());
  }

  WriteClassification out;
  for (auto& [v, e] : ev) out.values.push_back(std::move(e));
  return out;
}

// ---------------------------------------------------------------------------
// Order

Verdict check_total_order(const std::vector<StabilizationEvent>& stabs, const Config& cfg) {
  for (std::size_t i = 0; i < stabs.size(); ++i) {
    for (std::size_t j = i + 1; j < stabs.size(); ++j) {
      std::string why;
      if (safe_compare(stabs[i].ws, stabs[j].ws, cfg, &why) == OrderVerdict::kConcurrent) {
        return violation(property::kTotalOrder,
                         "incomparable stabilized sets" + (why.empty() ? std::string(" (Concurrent)") : ": " + why),
                         {describe(stabs[i]), describe(stabs[j])});
      }
    }
  }
  return pass(property::kTotalOrder);
}

MapstoChain build_chain(const std::vector<StabilizationEvent>& stabs, const Config& cfg) {
  // ↦-Equal is not transitive when two sets differ only outside their
  // common witnesses, so the chain is a topological order of the strict
  // relation (ties broken by stabilization step), cut into maximal runs of
  // one value.
  const std::size_t m = stabs.size();
  std::vector<std::vector<std::size_t>> succ(m);
  std::vector<std::size_t> indegree(m, 0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const OrderVerdict v = safe_compare(stabs[i].ws, stabs[j].ws, cfg);
      if (v == OrderVerdict::kConcurrent) {
        throw Error(ErrorCode::kInvariantBroken,
                    "incomparable: " + describe(stabs[i]) + " vs " + describe(stabs[j]));
      }
      if (v == OrderVerdict::kBefore) {
        succ[i].push_back(j);
        ++indegree[j];
      } else if (v == OrderVerdict::kAfter) {
        succ[j].push_back(i);
        ++indegree[i];
      }
    }
  }
  std::set<std::pair<std::uint64_t, std::size_t>> ready;
  for (std::size_t i = 0; i < m; ++i) {
    if (indegree[i] == 0) ready.emplace(stabs[i].step, i);
  }
  std::vector<std::size_t> order;
  while (!ready.empty()) {
    const std::size_t i = ready.begin()->second;
    ready.erase(ready.begin());
    order.push_back(i);
    for (std::size_t j : succ[i]) {
      if (--indegree[j] == 0) ready.emplace(stabs[j].step, j);
    }
  }
  if (order.size() != m) {
    throw Error(ErrorCode::kInvariantBroken, "the strict order among stabilized sets has a cycle");
  }

  MapstoChain chain;
  chain.rank.assign(m, -1);
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t i = order[k];
    if (k > 0 && stabs[i].value == stabs[order[k - 1]].value) {
      chain.classes.back().push_back(i);
    } else {
      chain.classes.push_back({i});
    }
    chain.rank[i] = static_cast<int>(chain.classes.size()) - 1;
  }
  return chain;
}

std::vector<PartialTimestamp> chain_partials(const std::vector<StabilizationEvent>& stabs,
                                             const MapstoChain& chain, const Config& cfg) {
  std::vector<PartialTimestamp> out;
  for (const auto& cls : chain.classes) {
    const auto& first = stabs[cls.front()];
    if (first.step == 0 && first.row_owner == 0) continue;  // initializer
    PartialTimestamp pt;
    pt.stamps.assign(cfg.n, std::nullopt);
    for (std::size_t idx : cls) {
      for (const auto& e : stabs[idx].ws) {
        auto& slot = pt.stamps[e.witness - 1];
        slot = std::max(slot.value_or(0), e.stamp);
      }
    }
    out.push_back(std::move(pt));
  }
  return out;
}

std::vector<FullTimestamp> build_full_timestamps(const std::vector<PartialTimestamp>& chain,
                                                 const Config& cfg) {
  std::vector<FullTimestamp> out;
  FullTimestamp current{std::vector<Stamp>(cfg.n, 0)};
  for (std::size_t k = 0; k < chain.size(); ++k) {
    const auto& pt = chain[k];
    if (static_cast<int>(pt.stamps.size()) != cfg.n) {
      throw Error(ErrorCode::kLengthMismatch, "partial timestamp of length " + std::to_string(pt.stamps.size()));
    }
    FullTimestamp next = current;
    for (int i = 0; i < cfg.n; ++i) {
      if (pt.stamps[i]) next.vec[i] = *pt.stamps[i];
    }
    if (vec_compare(current, next) != OrderVerdict::kBefore) {
      throw Error(ErrorCode::kInvariantBroken, "link " + std::to_string(k) + ": " + to_string(current) +
                                                   " then " + to_string(next) + " from " + to_string(pt));
    }
    out.push_back(next);
    current = std::move(next);
  }
  return out;
}

Verdict check_genuine_advance(const std::vector<StabilizationEvent>& stabs, const MapstoChain& chain,
                              const std::vector<int>& byzantine, const Config& /*cfg*/) {
  auto correct = [&byzantine](int i) { return !std::binary_search(byzantine.begin(), byzantine.end(), i); };
  for (std::size_t k = 1; k < chain.classes.size(); ++k) {
    for (std::size_t a : chain.classes[k - 1]) {
      for (std::size_t b : chain.classes[k]) {
        bool genuine = false;
        std::vector<int> advancing;
        for (const auto& ea : stabs[a].ws) {
          for (const auto& eb : stabs[b].ws) {
            if (ea.witness != eb.witness || eb.stamp <= ea.stamp) continue;
            advancing.push_back(ea.witness);
            if (correct(ea.witness)) genuine = true;
          }
        }
        if (!genuine) {
          std::string who;
          for (int i : advancing) who += (who.empty() ? "r" : ",r") + std::to_string(i);
          return violation(property::kGenuineAdvance,
                           "advance between classes " + std::to_string(k - 1) + " and " + std::to_string(k) +
                               " only at Byzantine witnesses {" + who + "}",
                           {describe(stabs[a]), describe(stabs[b])});
        }
      }
    }
  }
  return pass(property::kGenuineAdvance);
}

// ---------------------------------------------------------------------------
// Reads

std::vector<ReadRecord> collect_reads(const ExecutionHistory& h, const std::vector<StabilizationEvent>& stabs,
                                      const MapstoChain* chain) {
  std::vector<ReadRecord> out;
  std::map<std::pair<int, int>, std::uint64_t> invokes;
  for (const auto& e : h.hli) {
    if (e.process.is_writer() || e.op != HliOp::kRead || !h.correct_reader(e.process.index)) continue;
    if (e.kind == HliKind::kInvoke) {
      invokes[{e.process.index, e.op_index}] = e.step;
      continue;
    }
    ReadRecord r;
    r.reader = e.process.index;
    r.op_index = e.op_index;
    r.invoke = invokes[{r.reader, r.op_index}];
    r.response = e.step;
    r.value = e.value.value_or(TaggedValue{});
    r.evidence = e.evidence;
    r.stab = stab_index(stabs, r.evidence);
    if (chain && r.stab >= 0) r.rank = chain->rank[r.stab];
    out.push_back(std::move(r));
  }
  return out;
}

Verdict check_register_linearizability(const ExecutionHistory& h, const std::vector<StabilizationEvent>& stabs,
                                       const MapstoChain& chain, const WriteClassification& classes) {
  const auto reads = collect_reads(h, stabs, &chain);
  const auto name = property::kRegisterLinearizability;
  for (const auto& r : reads) {
    if (r.stab < 0) {
      return violation(name, read_label(r) + " returned a value backed by no stabilized set", {describe(r)});
    }
    const auto& s = stabs[r.stab];
    if (s.value != r.value) {
      return violation(name, read_label(r) + " returned a value its evidence does not carry", {describe(r), describe(s)});
    }
    const auto* ev = classes.find(r.value);
    if (!ev || !(ev->initial || ev->cls == WriteClass::kCorrect || ev->cls == WriteClass::kPseudoCorrect)) {
      return violation(name,
                       read_label(r) + " returned " + to_string(r.value) + " classified " +
                           std::string(ev ? to_string(ev->cls) : "unknown"),
                       {describe(r), describe(s)});
    }
    // Current value: nothing stabilized before the invoke may be newer.
    for (std::size_t i = 0; i < stabs.size(); ++i) {
      if (stabs[i].step < r.invoke && chain.rank[i] > r.rank) {
        return violation(name,
                         read_label(r) + " returned class " + std::to_string(r.rank) + " after class " +
                             std::to_string(chain.rank[i]) + " had stabilized",
                         {describe(stabs[i]), describe(r)});
      }
    }
  }
  // No new-old inversions.
  for (const auto& a : reads) {
    for (const auto& b : reads) {
      if (a.response < b.invoke && a.rank > b.rank) {
        return violation(name, "new-old inversion between " + read_label(a) + " and " + read_label(b),
                         {describe(a), describe(b)});
      }
    }
  }
  return pass(name);
}

Verdict check_write_stabilization(const ExecutionHistory& h, const std::vector<StabilizationEvent>& stabs,
                                  const WriteClassification& classes) {
  const auto writes = collect_writes(h);
  for (const auto& ev : classes.values) {
    if (ev.initial || ev.correct_op < 0) continue;
    const auto& w = writes[ev.correct_op];
    const StabilizationEvent* first = nullptr;
    for (const auto& s : stabs) {
      if (s.value == ev.value) {
        first = &s;
        break;
      }
    }
    if (!first || first->step > w.response) {
      std::vector<std::string> wit{"@" + std::to_string(w.invoke) + " w write#" + std::to_string(w.op_index) +
                                   " invoke " + to_string(ev.value),
                                   "@" + std::to_string(w.response) + " w write#" + std::to_string(w.op_index) +
                                       " response"};
      if (first) wit.push_back(describe(*first));
      return violation(property::kWriteStabilization,
                       "correct write of " + to_string(ev.value) + " responded before its value stabilized",
                       std::move(wit));
    }
  }
  return pass(property::kWriteStabilization);
}

Verdict check_stabilization_classes(const std::vector<StabilizationEvent>& stabs,
                                    const WriteClassification& classes) {
  for (const auto& s : stabs) {
    const auto* ev = classes.find(s.value);
    if (!ev || !(ev->cls == WriteClass::kCorrect || ev->cls == WriteClass::kPseudoCorrect)) {
      return violation(property::kStabilizationClasses,
                       to_string(s.value) + " stabilized but is " +
                           std::string(ev ? to_string(ev->cls) : "unclassified"),
                       {describe(s)});
    }
  }
  return pass(property::kStabilizationClasses);
}

Verdict check_view_consistency(const ExecutionHistory& h, const std::vector<StabilizationEvent>& stabs,
                               const MapstoChain& chain) {
  std::uint64_t last_init = 0;
  for (const auto& t : h.trace) {
    if (t.op == RegOp::kWrite && t.reg.family == Family::kInit) last_init = t.step;
  }
  const int top = static_cast<int>(chain.classes.size()) - 1;
  const auto reads = collect_reads(h, stabs, &chain);
  const ReadRecord* anchor = nullptr;
  for (const auto& r : reads) {
    if (r.invoke > last_init && r.rank == top && (!anchor || r.response < anchor->response)) anchor = &r;
  }
  if (!anchor) return pass(property::kViewConsistency);
  for (const auto& r : reads) {
    if (r.invoke > anchor->response && r.rank != top) {
      return violation(property::kViewConsistency,
                       read_label(r) + " missed the settled value returned by " + read_label(*anchor),
                       {describe(*anchor), describe(r)});
    }
  }
  return pass(property::kViewConsistency);
}

Verdict check_total_ordering_reads(const ExecutionHistory& h, const std::vector<StabilizationEvent>& stabs,
                                   const MapstoChain& chain) {
  const auto reads = collect_reads(h, stabs, &chain);
  std::map<int, std::vector<const ReadRecord*>> per_reader;
  for (const auto& r : reads) per_reader[r.reader].push_back(&r);
  // (earlier class, later class) as first seen by some reader, with its reads.
  std::map<std::pair<int, int>, std::pair<const ReadRecord*, const ReadRecord*>> first_seen;
  for (const auto& [reader, rs] : per_reader) {
    for (std::size_t i = 0; i < rs.size(); ++i) {
      for (std::size_t j = i + 1; j < rs.size(); ++j) {
        if (rs[i]->rank == rs[j]->rank) continue;
        const std::pair<int, int> key{rs[i]->rank, rs[j]->rank};
        auto rev = first_seen.find({key.second, key.first});
        if (rev != first_seen.end() && rev->second.first->reader != reader) {
          return violation(property::kTotalOrderingReads,
                           "r" + std::to_string(reader) + " and r" + std::to_string(rev->second.first->reader) +
                               " saw two values in opposite orders",
                           {describe(*rs[i]), describe(*rs[j]), describe(*rev->second.first),
                            describe(*rev->second.second)});
        }
        first_seen.emplace(key, std::make_pair(rs[i], rs[j]));
      }
    }
  }
  return pass(property::kTotalOrderingReads);
}

Verdict check_ack_monotonic(const ExecutionHistory& h, const std::vector<StabilizationEvent>& stabs,
                            const MapstoChain& chain) {
  const int n = h.cfg.n;
  std::vector<Bytes> row_last(n + 1);
  std::vector<int> last_rank(n + 1, -1);
  std::vector<std::uint64_t> last_step(n + 1, 0);
  std::map<Bytes, int> rank_of;
  for (const auto& t : h.trace) {
    if (t.op != RegOp::kWrite) continue;
    const int p = t.reg.writer_end.index;
    if (t.reg.writer_end.is_writer() || !h.correct_reader(p)) continue;
    if (t.reg.family == Family::kFinal) {
      row_last[p] = *t.value;
    } else if (t.reg.family == Family::kAck && !row_last[p].empty()) {
      auto it = rank_of.find(row_last[p]);
      if (it == rank_of.end()) {
        int rank = -1;
        if (auto is = codec::decode_inform_set(row_last[p])) {
          try {
            const int idx = stab_index(stabs, ws_of(*is, h.cfg));
            if (idx >= 0) rank = chain.rank[idx];
          } catch (const Error&) {
          }
        }
        it = rank_of.emplace(row_last[p], rank).first;
      }
      const std::string where = "@" + std::to_string(t.step) + " r" + std::to_string(p) + " ack";
      if (it->second < 0) {
        return violation(property::kAckMonotonic, where + " backs an unstabilized set", {where});
      }
      if (it->second < last_rank[p]) {
        return violation(property::kAckMonotonic,
                         "r" + std::to_string(p) + " acked class " + std::to_string(it->second) + " after class " +
                             std::to_string(last_rank[p]),
                         {"@" + std::to_string(last_step[p]) + " r" + std::to_string(p) + " ack " +
                              class_label(stabs, chain, last_rank[p]),
                          where + " " + class_label(stabs, chain, it->second)});
      }
      last_rank[p] = it->second;
      last_step[p] = t.step;
    }
  }
  return pass(property::kAckMonotonic);
}

Verdict check_diagnostics(const ExecutionHistory& h) {
  for (const auto& d : h.diagnostics) {
    if (d.process.is_writer() || !h.correct_reader(d.process.index)) continue;
    const bool benign = d.code == ErrorCode::kSuspectedProcess && d.subject > 0 && !h.correct_reader(d.subject);
    if (!benign) {
      std::ostringstream os;
      os << "@" << d.step << " " << d.process << " " << d.message;
      return violation(property::kDiagnostics, os.str(), {os.str()});
    }
  }
  return pass(property::kDiagnostics);
}

// ---------------------------------------------------------------------------
// Linearization

std::vector<LinearizedOp> build_byzantine_linearization(const ExecutionHistory& h,
                                                        const std::vector<StabilizationEvent>& stabs,
                                                        const MapstoChain& chain) {
  struct Node {
    LinearizedOp op;
    std::uint64_t invoke = 0;
    std::uint64_t response = kNever;
  };
  std::vector<Node> nodes;
  std::set<int> written;

  if (h.writer_correct) {
    for (const auto& w : collect_writes(h)) {
      if (!w.value) continue;
      int rank = -1;
      for (std::size_t i = 0; i < stabs.size(); ++i) {
        if (stabs[i].value == *w.value && (rank < 0 || chain.rank[i] < rank)) rank = chain.rank[i];
      }
      if (rank < 0) {
        if (w.completed) {
          throw Error(ErrorCode::kNoLinearization, "completed write of " + to_string(*w.value) + " never stabilized");
        }
        continue;  // pending and invisible: dropped from the completion
      }
      written.insert(rank);
      nodes.push_back(Node{{LinearizedOp::Kind::kWrite, 0, w.op_index, *w.value, rank, false}, w.invoke, w.response});
    }
  }
  const auto reads = collect_reads(h, stabs, &chain);
  const TaggedValue init = initial_value(h.u0);
  for (const auto& r : reads) {
    if (r.rank < 0) throw Error(ErrorCode::kNoLinearization, describe(r) + " has no stabilized class");
    nodes.push_back(Node{{LinearizedOp::Kind::kRead, r.reader, r.op_index, r.value, r.rank, false}, r.invoke,
                         r.response});
    if (r.value != init && !written.count(r.rank)) {
      written.insert(r.rank);
      nodes.push_back(Node{{LinearizedOp::Kind::kWrite, 0, -1, r.value, r.rank, true}, 0, kNever});
    }
  }
  std::stable_sort(nodes.begin(), nodes.end(), [](const Node& a, const Node& b) {
    if (a.op.rank != b.op.rank) return a.op.rank < b.op.rank;
    if (a.op.kind != b.op.kind) return a.op.kind == LinearizedOp::Kind::kWrite;
    if (a.op.synthetic != b.op.synthetic) return a.op.synthetic;
    return a.invoke < b.invoke;
  });

  TaggedValue current = init;
  for (const auto& nd : nodes) {
    if (nd.op.kind == LinearizedOp::Kind::kWrite) {
      current = nd.op.value;
    } else if (nd.op.value != current) {
      throw Error(ErrorCode::kNoLinearization, "r" + std::to_string(nd.op.process) + " read#" +
                                                   std::to_string(nd.op.op_index) + " returns " +
                                                   to_string(nd.op.value) + " but the latest write is " +
                                                   to_string(current));
    }
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].op.synthetic) continue;
    for (std::size_t j = i + 1; j < nodes.size(); ++j) {
      if (nodes[j].op.synthetic) continue;
      if (nodes[j].response < nodes[i].invoke) {
        auto label = [](const Node& nd) {
          return (nd.op.kind == LinearizedOp::Kind::kWrite ? std::string("w write#")
                                                           : "r" + std::to_string(nd.op.process) + " read#") +
                 std::to_string(nd.op.op_index) + " [" + std::to_string(nd.invoke) + "," +
                 std::to_string(nd.response) + "]";
        };
        throw Error(ErrorCode::kNoLinearization,
                    "real-time cycle: " + label(nodes[j]) + " precedes " + label(nodes[i]) + " but is ordered after it");
      }
    }
  }
  std::vector<LinearizedOp> out;
  out.reserve(nodes.size());
  for (auto& nd : nodes) out.push_back(std::move(nd.op));
  return out;
}

// ---------------------------------------------------------------------------

const Verdict* CheckReport::verdict(std::string_view name) const {
  for (const auto& v : verdicts) {
    if (v.property == name) return &v;
  }
  return nullptr;
}

bool CheckReport::violated(std::string_view name) const {
  const auto* v = verdict(name);
  return v && v->violated();
}

std::vector<std::string> CheckReport::violated_properties() const {
  std::vector<std::string> out;
  for (const auto& v : verdicts) {
    if (v.violated()) out.push_back(v.property);
  }
  return out;
}

CheckReport check_all(const ExecutionHistory& h, const KeyRing& ring, const CheckOptions& opts) {
  CheckReport rep;
  const Config& cfg = h.cfg;
  std::map<std::string, Verdict, std::less<>> got;
  auto put = [&got](Verdict v) { got[v.property] = std::move(v); };

  if (auto bad = verify_trace_replay(cfg, h.u0, ring, h.trace, nullptr)) {
    put(violation(property::kReplay, *bad));
  } else {
    put(pass(property::kReplay));
  }

  rep.stabs = detect_stabilizations(h, ring);
  rep.classes = classify_writes(h, rep.stabs);
  put(check_stabilization_classes(rep.stabs, rep.classes));
  put(check_write_stabilization(h, rep.stabs, rep.classes));
  put(check_diagnostics(h));

  Verdict total = check_total_order(rep.stabs, cfg);
  if (!total.violated()) {
    try {
      rep.chain = build_chain(rep.stabs, cfg);
    } catch (const Error& e) {
      total = violation(property::kTotalOrder, e.what());
    }
  }
  put(total);

  if (!rep.chain) {
    for (auto name : {property::kFullTimestamps, property::kGenuineAdvance, property::kRegisterLinearizability,
                      property::kViewConsistency, property::kTotalOrderingReads,
                      property::kByzantineLinearization, property::kAckMonotonic}) {
      put(skipped(name, "stabilized sets are not totally ordered"));
    }
  } else {
    const MapstoChain& chain = *rep.chain;
    try {
      rep.full = build_full_timestamps(chain_partials(rep.stabs, chain, cfg), cfg);
      Verdict v = pass(property::kFullTimestamps);
      for (std::size_t i = 0; i < rep.full.size() && !v.violated(); ++i) {
        for (std::size_t j = i + 1; j < rep.full.size(); ++j) {
          if (vec_compare(rep.full[i], rep.full[j]) != OrderVerdict::kBefore) {
            v = violation(property::kFullTimestamps, "full timestamps " + std::to_string(i) + " and " +
                                                         std::to_string(j) + " do not follow the chain order",
                          {to_string(rep.full[i]), to_string(rep.full[j])});
            break;
          }
        }
      }
      put(std::move(v));
    } catch (const Error& e) {
      put(violation(property::kFullTimestamps, e.what()));
    }
    put(check_genuine_advance(rep.stabs, chain, h.byzantine, cfg));
    put(check_register_linearizability(h, rep.stabs, chain, rep.classes));
    put(check_view_consistency(h, rep.stabs, chain));
    put(check_total_ordering_reads(h, rep.stabs, chain));
    put(check_ack_monotonic(h, rep.stabs, chain));
    try {
      rep.linearization = build_byzantine_linearization(h, rep.stabs, chain);
      put(pass(property::kByzantineLinearization));
    } catch (const Error& e) {
      put(violation(property::kByzantineLinearization, e.what()));
    }

    const auto reads = collect_reads(h, rep.stabs, &chain);
    std::set<int> returned;
    for (const auto& r : reads) {
      returned.insert(r.rank);
      if (r.stab >= 0 && rep.stabs[r.stab].step > r.response) {
        rep.notes.push_back(read_label(r) + " returned a value that stabilized only after its response");
      }
    }
    for (std::size_t k = 0; k < chain.classes.size(); ++k) {
      const auto& s = rep.stabs[chain.classes[k].front()];
      const auto* ev = rep.classes.find(s.value);
      if (!returned.count(static_cast<int>(k)) && ev && ev->cls == WriteClass::kPseudoCorrect) {
        rep.notes.push_back("invisible linearization point: " + to_string(s.value) + " stabilized but no read returned it");
      }
    }
  }

  for (auto name : all_properties()) {
    auto it = got.find(name);
    Verdict v = it == got.end() ? skipped(name, "not evaluated") : std::move(it->second);
    if (v.witness.size() > opts.max_witness) v.witness.resize(opts.max_witness);
    rep.verdicts.push_back(std::move(v));
  }
  return rep;
}

}  // namespace bzreg
