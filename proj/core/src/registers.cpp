#include "bzreg/registers.hpp"

#include <functional>
#include <sstream>

#include "bzreg/codec.hpp"
#include "bzreg/crypto.hpp"
#include "bzreg/error.hpp"

namespace bzreg {

std::string_view to_string(Family f) {
  switch (f) {
    case Family::kInit: return "init";
    case Family::kAck: return "ack";
    case Family::kWitness: return "witness";
    case Family::kInform: return "inform";
    case Family::kFinal: return "final";
  }
  return "?";
}

std::string to_string(const RegisterId& id) {
  std::ostringstream os;
  os << to_string(id.family) << "[" << id.writer_end << "->" << id.reader_end
     << "]";
  return os.str();
}

RegisterBank RegisterBank::init(const Config& cfg, const Bytes& u0,
                                const KeyRing& ring) {
  RegisterBank bank(cfg);
  const int n = cfg.n;
  bank.cells_.resize(static_cast<std::size_t>(cfg.register_count()));

  auto init_value = std::make_shared<const Bytes>(codec::encode(initial_value(u0)));
  std::vector<CellBytes> witness_init;
  std::vector<CellBytes> inform_init;
  InformSet initial_is;
  for (int i = 1; i <= n; ++i) {
    witness_init.push_back(
        std::make_shared<const Bytes>(codec::encode(initial_entry(u0, i))));
    WitnessSet ws = make_witness_set(initial_entries(cfg, u0),
                                     Signer(ring, ProcessId::reader(i)));
    inform_init.push_back(std::make_shared<const Bytes>(codec::encode(ws)));
    initial_is.members.push_back(std::move(ws));
  }
  auto final_init = std::make_shared<const Bytes>(codec::encode(initial_is));

  for (int i = 1; i <= n; ++i) {
    bank.cells_[bank.index_of(RegisterId::init(i))].content = init_value;
    bank.cells_[bank.index_of(RegisterId::ack(i))].content = init_value;
    for (int j = 1; j <= n; ++j) {
      bank.cells_[bank.index_of(RegisterId::witness(i, j))].content = witness_init[i - 1];
      bank.cells_[bank.index_of(RegisterId::inform(i, j))].content = inform_init[i - 1];
      bank.cells_[bank.index_of(RegisterId::final_(i, j))].content = final_init;
    }
  }
  return bank;
}

std::size_t RegisterBank::index_of(const RegisterId& id) const {
  const int n = cfg_.n;
  auto bad = [&] {
    return Error(ErrorCode::kAccessViolation, "no such register " + to_string(id));
  };
  auto reader_ok = [n](ProcessId p) {
    return !p.is_writer() && p.index >= 1 && p.index <= n;
  };
  const auto nn = static_cast<std::size_t>(n);
  switch (id.family) {
    case Family::kInit:
      if (!id.writer_end.is_writer() || !reader_ok(id.reader_end)) throw bad();
      return id.reader_end.index - 1;
    case Family::kAck:
      if (!reader_ok(id.writer_end) || !id.reader_end.is_writer()) throw bad();
      return nn + id.writer_end.index - 1;
    default:
      break;
  }
  if (!reader_ok(id.writer_end) || !reader_ok(id.reader_end)) throw bad();
  const std::size_t pair =
      (id.writer_end.index - 1) * nn + (id.reader_end.index - 1);
  switch (id.family) {
    case Family::kWitness: return 2 * nn + pair;
    case Family::kInform: return 2 * nn + nn * nn + pair;
    case Family::kFinal: return 2 * nn + 2 * nn * nn + pair;
    default: throw bad();
  }
}

void RegisterBank::write(const RegisterId& id, Bytes value, ProcessId caller) {
  const auto idx = index_of(id);
  if (caller != id.writer_end) {
    throw Error(ErrorCode::kAccessViolation,
                to_string(caller) + " may not write " + to_string(id));
  }
  auto content = std::make_shared<const Bytes>(std::move(value));
  const auto step = next_step_++;
  cells_[idx] = Cell{content, step};
  last_access_ = Access{RegOp::kWrite, idx};
  if (tracing_) {
    trace_.push_back(TraceEvent{step, RegOp::kWrite, id, caller, std::move(content)});
  }
}

CellView RegisterBank::read(const RegisterId& id, ProcessId caller) {
  const auto idx = index_of(id);
  if (caller != id.reader_end) {
    throw Error(ErrorCode::kAccessViolation,
                to_string(caller) + " may not read " + to_string(id));
  }
  const auto step = next_step_++;
  const Cell& cell = cells_[idx];
  last_access_ = Access{RegOp::kRead, idx};
  if (tracing_) trace_.push_back(TraceEvent{step, RegOp::kRead, id, caller, cell.content});
  return CellView{cell.content, cell.last_write_step};
}

const Bytes& RegisterBank::peek(const RegisterId& id) const {
  return *cells_[index_of(id)].content;
}

std::uint64_t RegisterBank::last_write_step(const RegisterId& id) const {
  return cells_[index_of(id)].last_write_step;
}

std::size_t RegisterBank::count(Family f) const {
  const auto nn = static_cast<std::size_t>(cfg_.n);
  return (f == Family::kInit || f == Family::kAck) ? nn : nn * nn;
}

std::uint64_t RegisterBank::content_hash() const {
  std::uint64_t h = 1469598103934665603ull;
  std::hash<std::string_view> hasher;
  for (const auto& c : cells_) {
    h ^= hasher(*c.content) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return h;
}

std::vector<RegisterId> RegisterBank::all_ids() const {
  std::vector<RegisterId> ids;
  const int n = cfg_.n;
  for (int i = 1; i <= n; ++i) ids.push_back(RegisterId::init(i));
  for (int i = 1; i <= n; ++i) ids.push_back(RegisterId::ack(i));
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) ids.push_back(RegisterId::witness(i, j));
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) ids.push_back(RegisterId::inform(i, j));
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) ids.push_back(RegisterId::final_(i, j));
  return ids;
}

std::optional<std::string> verify_trace_replay(
    const Config& cfg, const Bytes& u0, const KeyRing& ring,
    const std::vector<TraceEvent>& trace, const RegisterBank* final_bank) {
  RegisterBank replay = RegisterBank::init(cfg, u0, ring);
  std::uint64_t prev = 0;
  for (const auto& ev : trace) {
    if (ev.step <= prev) {
      return "step " + std::to_string(ev.step) + " does not increase";
    }
    prev = ev.step;
    if (ev.op == RegOp::kWrite) {
      replay.write(ev.reg, *ev.value, ev.caller);
    } else if (replay.peek(ev.reg) != *ev.value) {
      return "read of " + to_string(ev.reg) + " at step " +
             std::to_string(ev.step) + " is not the latest write";
    }
  }
  if (final_bank) {
    for (const auto& id : replay.all_ids()) {
      if (replay.peek(id) != final_bank->peek(id)) {
        return "replayed content of " + to_string(id) + " differs";
      }
    }
  }
  return std::nullopt;
}

}  // namespace bzreg
