#include "bzreg/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "bzreg/codec.hpp"
#include "bzreg/crypto.hpp"
#include "bzreg/error.hpp"
#include "bzreg/registers.hpp"
#include "bzreg/timestamp.hpp"

namespace bzreg {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::kScenarioConfig, what); }

void reject_unknown(const json& obj, std::initializer_list<std::string_view> known, const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      config_error(where + ": unknown key \"" + key + "\"");
    }
  }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception& e) {
    config_error(std::string(key) + ": " + e.what());
  }
}

int reader_index(const std::string& key, const Config& cfg) {
  int i = 0;
  try {
    std::size_t used = 0;
    i = std::stoi(key, &used);
    if (used != key.size()) throw std::invalid_argument(key);
  } catch (const std::exception&) {
    config_error("reader key \"" + key + "\" is not an index");
  }
  if (i < 1 || i > cfg.n) config_error("reader " + key + " out of range 1.." + std::to_string(cfg.n));
  return i;
}

TaggedValue parse_value(const json& v) {
  // [k, "u"] or {"k": k, "u": "u"}
  if (v.is_array() && v.size() == 2) return TaggedValue{v[0].get<std::uint64_t>(), v[1].get<std::string>()};
  if (v.is_object()) return TaggedValue{v.at("k").get<std::uint64_t>(), v.at("u").get<std::string>()};
  config_error("tagged value must be [k, \"u\"] or {\"k\", \"u\"}");
}

WriterStrategy parse_writer(const json& w, const Config& cfg, bool& sample) {
  reject_unknown(w, {"strategy", "sample", "assignment", "targets", "values", "delay", "k", "script", "await_acks"},
                 "writer");
  WriterStrategy s;
  s.kind = writer_kind_from_string(get_or<std::string>(w, "strategy", "Correct"));
  sample = get_or<bool>(w, "sample", false);
  if (auto it = w.find("assignment"); it != w.end()) {
    for (const auto& [key, val] : it->items()) s.assignment[reader_index(key, cfg)] = val.get<std::string>();
  }
  s.targets = get_or<std::vector<int>>(w, "targets", {});
  for (int r : s.targets) {
    if (r < 1 || r > cfg.n) config_error("writer target " + std::to_string(r) + " out of range");
  }
  s.values = get_or<std::vector<std::string>>(w, "values", {});
  s.delay = get_or<int>(w, "delay", 0);
  s.k = get_or<std::uint64_t>(w, "k", 1);
  s.await_acks = get_or<bool>(w, "await_acks", false);
  if (auto it = w.find("script"); it != w.end()) {
    for (const auto& op : *it) {
      std::vector<ScriptedInit> step;
      for (const auto& init : op) {
        const int r = init.at("reader").get<int>();
        if (r < 1 || r > cfg.n) config_error("script reader " + std::to_string(r) + " out of range");
        step.push_back(ScriptedInit{r, parse_value(init.at("value"))});
      }
      s.script.push_back(std::move(step));
    }
  }
  return s;
}

ReaderStrategy parse_reader(const json& r, const Config& cfg, bool& sample) {
  reject_unknown(r, {"strategy", "sample", "offset", "period", "payloads", "values", "colluders", "plans"}, "reader");
  ReaderStrategy s;
  s.kind = reader_kind_from_string(get_or<std::string>(r, "strategy", "Correct"));
  sample = get_or<bool>(r, "sample", false);
  s.offset = get_or<Stamp>(r, "offset", s.offset);
  s.period = get_or<int>(r, "period", s.period);
  if (auto it = r.find("payloads"); it != r.end()) {
    for (const auto& [key, val] : it->items()) s.payloads[reader_index(key, cfg)] = val.get<std::string>();
  }
  if (auto it = r.find("values"); it != r.end()) {
    for (const auto& v : *it) s.values.push_back(parse_value(v));
  }
  s.colluders = get_or<std::vector<int>>(r, "colluders", {});
  if (auto it = r.find("plans"); it != r.end()) {
    for (const auto& p : *it) {
      CollusionPlan plan;
      for (const auto& e : p.at("entries")) {
        WitnessEntry we;
        we.witness = e.at("witness").get<int>();
        we.value = parse_value(e.at("value"));
        we.stamp = e.at("stamp").get<Stamp>();
        if (we.witness < 1 || we.witness > cfg.n) config_error("plan witness out of range");
        plan.entries.push_back(we);
      }
      std::sort(plan.entries.begin(), plan.entries.end(),
                [](const auto& a, const auto& b) { return a.witness < b.witness; });
      if (auto f = p.find("finals"); f != p.end()) {
        for (const auto& [key, val] : f->items()) plan.finals[reader_index(key, cfg)] = val.get<std::vector<int>>();
      }
      s.plans.push_back(std::move(plan));
    }
  }
  return s;
}

// "w", "r3", "r3x10", "wx4", or a bare slot number.
void parse_script_token(const json& tok, int n, std::vector<int>& out) {
  if (tok.is_number_integer()) {
    const int slot = tok.get<int>();
    if (slot < 0 || slot > n) config_error("script slot " + std::to_string(slot) + " out of range");
    out.push_back(slot);
    return;
  }
  if (!tok.is_string()) config_error("script entries must be slots or strings");
  const std::string s = tok.get<std::string>();
  int slot = -1;
  std::size_t pos = 0;
  if (!s.empty() && s[0] == 'w') {
    slot = 0;
    pos = 1;
  } else if (!s.empty() && s[0] == 'r') {
    std::size_t used = 0;
    try {
      slot = std::stoi(s.substr(1), &used);
    } catch (const std::exception&) {
      config_error("bad script token \"" + s + "\"");
    }
    pos = 1 + used;
  }
  int count = 1;
  if (pos < s.size()) {
    if (s[pos] != 'x') config_error("bad script token \"" + s + "\"");
    try {
      count = std::stoi(s.substr(pos + 1));
    } catch (const std::exception&) {
      config_error("bad script token \"" + s + "\"");
    }
  }
  if (slot < 0 || slot > n || count < 0) config_error("bad script token \"" + s + "\"");
  out.insert(out.end(), static_cast<std::size_t>(count), slot);
}

std::string status_name(RunStatus s) { return std::string(to_string(s)); }

std::string ws_text(const std::vector<WitnessEntry>& ws) {
  std::ostringstream os;
  os << "{";
  for (std::size_t i = 0; i < ws.size(); ++i) os << (i ? "," : "") << ws[i].witness << ":" << ws[i].stamp;
  return os.str() + "}";
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.resize(width, ' ');
  return s;
}

std::string pad_left(const std::string& s, std::size_t width) {
  return s.size() < width ? std::string(width - s.size(), ' ') + s : s;
}

std::string dump(const ordered_json& j) { return j.dump(-1, ' ', false, json::error_handler_t::replace); }

}  // namespace

// ---------------------------------------------------------------------------
// Parsing

ScenarioConfig parse_scenario(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    config_error(std::string("not valid JSON: ") + e.what());
  }
  if (!j.is_object()) config_error("top level must be an object");
  reject_unknown(j,
                 {"name", "description", "n", "t", "writer_byzantine", "u0", "crypto", "key_seed", "writer",
                  "readers", "workload", "schedule", "seeds", "first_seed", "step_limit", "tail_steps",
                  "allow_excess_byzantine", "expect"},
                 "scenario");

  ScenarioConfig sc;
  try {
    sc.name = get_or<std::string>(j, "name", "unnamed");
    sc.description = get_or<std::string>(j, "description", "");
    if (!j.contains("n")) config_error("missing n");
    Config cfg;
    try {
      cfg = Config::make(j.at("n").get<int>(), get_or<int>(j, "t", 0));
    } catch (const Error& e) {
      config_error(e.what());
    }
    RunSpec& spec = sc.base;
    spec.u0 = get_or<std::string>(j, "u0", "u0");
    spec.crypto = signature_kind_from_string(get_or<std::string>(j, "crypto", "keyed-digest"));
    spec.key_seed = get_or<std::uint64_t>(j, "key_seed", 0);
    spec.step_limit = get_or<std::uint64_t>(j, "step_limit", spec.step_limit);
    if (spec.step_limit == 0) config_error("step_limit must be positive");
    spec.tail_steps = get_or<std::uint64_t>(j, "tail_steps", 0);
    sc.seeds = get_or<std::uint64_t>(j, "seeds", 1);
    sc.first_seed = get_or<std::uint64_t>(j, "first_seed", 0);
    sc.allow_excess_byzantine = get_or<bool>(j, "allow_excess_byzantine", false);

    if (auto it = j.find("writer"); it != j.end()) spec.writer = parse_writer(*it, cfg, sc.sample_writer);
    cfg.writer_byzantine = spec.writer.byzantine();
    if (auto it = j.find("writer_byzantine"); it != j.end() && it->get<bool>() != cfg.writer_byzantine) {
      config_error("writer_byzantine disagrees with the writer strategy");
    }
    spec.cfg = cfg;

    if (auto it = j.find("readers"); it != j.end()) {
      for (const auto& [key, val] : it->items()) {
        const int i = reader_index(key, cfg);
        bool sample = false;
        spec.readers[i] = parse_reader(val, cfg, sample);
        if (sample) sc.sampled_readers.push_back(i);
      }
    }
    for (const auto& [i, s] : spec.readers) {
      for (int c : s.colluders) {
        if (c < 1 || c > cfg.n) config_error("colluder " + std::to_string(c) + " out of range");
      }
    }

    if (auto it = j.find("workload"); it != j.end()) {
      const json& w = *it;
      reject_unknown(w, {"random", "writes", "reads"}, "workload");
      if (auto r = w.find("random"); r != w.end()) {
        reject_unknown(*r, {"max_writes", "max_reads", "max_write_gap", "max_read_gap"}, "workload.random");
        WorkloadShape shape;
        shape.max_writes = get_or<int>(*r, "max_writes", shape.max_writes);
        shape.max_reads = get_or<int>(*r, "max_reads", shape.max_reads);
        shape.max_write_gap = get_or<int>(*r, "max_write_gap", shape.max_write_gap);
        shape.max_read_gap = get_or<int>(*r, "max_read_gap", shape.max_read_gap);
        if (shape.max_writes < 0 || shape.max_reads < 0 || shape.max_write_gap < 0 || shape.max_read_gap < 0) {
          config_error("workload bounds must be non-negative");
        }
        sc.random_workload = shape;
      }
      if (auto ws = w.find("writes"); ws != w.end()) {
        for (const auto& op : *ws) {
          if (op.is_string()) {
            spec.workload.writes.push_back(WriteOp{op.get<std::string>(), 0});
          } else {
            spec.workload.writes.push_back(
                WriteOp{op.at("payload").get<std::string>(), get_or<int>(op, "idle_before", 0)});
          }
        }
      }
      if (auto rs = w.find("reads"); rs != w.end()) {
        for (const auto& [key, val] : rs->items()) {
          const int i = reader_index(key, cfg);
          for (const auto& op : val) {
            spec.workload.reads[i].push_back(
                ReadOp{op.is_number() ? op.get<int>() : get_or<int>(op, "idle_iterations_before", 0)});
          }
        }
      }
    }

    if (auto it = j.find("schedule"); it != j.end()) {
      const json& s = *it;
      reject_unknown(s, {"kind", "fairness", "script", "repeat", "depth_bound", "max_nodes", "prune", "sleep_sets"}, "schedule");
      const std::string kind = get_or<std::string>(s, "kind", "seeded-random");
      if (kind == "seeded-random") {
        spec.schedule.kind = ScheduleSpec::Kind::kSeededRandom;
      } else if (kind == "round-robin") {
        spec.schedule.kind = ScheduleSpec::Kind::kRoundRobin;
      } else if (kind == "scripted") {
        spec.schedule.kind = ScheduleSpec::Kind::kScripted;
      } else if (kind == "exhaustive") {
        sc.exhaustive = true;
      } else {
        config_error("unknown schedule kind \"" + kind + "\"");
      }
      spec.schedule.fairness = get_or<int>(s, "fairness", 0);
      spec.schedule.repeat = get_or<bool>(s, "repeat", false);
      if (auto sc_it = s.find("script"); sc_it != s.end()) {
        for (const auto& tok : *sc_it) parse_script_token(tok, cfg.n, spec.schedule.script);
      }
      sc.limits.depth_bound = get_or<std::uint64_t>(s, "depth_bound", sc.limits.depth_bound);
      sc.limits.max_nodes = get_or<std::uint64_t>(s, "max_nodes", sc.limits.max_nodes);
      sc.limits.prune = get_or<bool>(s, "prune", true);
      sc.limits.sleep_sets = get_or<bool>(s, "sleep_sets", true);
    }

    if (auto it = j.find("expect"); it != j.end()) {
      reject_unknown(*it, {"violations", "allow", "liveness"}, "expect");
      sc.expect.violations = get_or<std::vector<std::string>>(*it, "violations", {});
      sc.expect.allow = get_or<std::vector<std::string>>(*it, "allow", {});
      sc.expect.liveness = get_or<bool>(*it, "liveness", false);
      const auto& known = all_properties();
      for (const auto& names : {sc.expect.violations, sc.expect.allow}) {
        for (const auto& name : names) {
          if (std::find(known.begin(), known.end(), name) == known.end()) {
            config_error("expect: unknown property \"" + name + "\"");
          }
        }
      }
    }
  } catch (const json::exception& e) {
    config_error(e.what());
  }

  const Config& cfg = sc.base.cfg;
  const auto byz = sc.base.byzantine_readers();
  if (static_cast<int>(byz.size()) > cfg.t && !sc.allow_excess_byzantine) {
    config_error(std::to_string(byz.size()) + " Byzantine readers exceed t=" + std::to_string(cfg.t) +
                 " (set allow_excess_byzantine to run anyway)");
  }
  if (cfg.n <= 2 * cfg.t) {
    sc.warnings.push_back("n <= 2t: stabilized values need not be totally ordered");
  }
  if (cfg.n <= 3 * cfg.t) {
    sc.warnings.push_back("n <= 3t: advances may be driven by Byzantine stamps alone");
  }
  if (sc.exhaustive && sc.random_workload) config_error("exhaustive schedules need an explicit workload");
  return sc;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

RunSpec spec_for_seed(const ScenarioConfig& sc, std::uint64_t seed) {
  RunSpec spec = sc.base;
  spec.schedule.seed = seed;
  if (sc.random_workload) {
    std::vector<int> correct;
    for (int i = 1; i <= spec.cfg.n; ++i) {
      if (!spec.reader_strategy(i).byzantine()) correct.push_back(i);
    }
    spec.workload = random_workload(seed, correct, *sc.random_workload);
  }
  if (sc.sample_writer) {
    spec.writer = sample_writer_strategy(spec.writer.kind, spec.cfg, seed,
                                         static_cast<int>(std::max<std::size_t>(1, spec.workload.writes.size())));
  }
  for (int i : sc.sampled_readers) spec.readers[i] = sample_reader_strategy(spec.readers[i].kind, spec.cfg, i, seed);
  return spec;
}

// ---------------------------------------------------------------------------
// Campaign

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::kOk: return "ok";
    case Outcome::kUnexpectedViolation: return "unexpected-violation";
    case Outcome::kLiveness: return "liveness";
    case Outcome::kMissingExpected: return "missing-expected-violation";
    case Outcome::kInternal: return "internal-error";
  }
  return "?";
}

int exit_code(Outcome o) {
  switch (o) {
    case Outcome::kOk: return 0;
    case Outcome::kUnexpectedViolation:
    case Outcome::kMissingExpected: return 3;
    case Outcome::kLiveness: return 4;
    case Outcome::kInternal: return 5;
  }
  return 5;
}

std::string register_count_line(const RegisterBank& bank) {
  const int n = bank.config().n;
  std::ostringstream os;
  os << "registers: 3n²+2n = " << bank.size() << " at n=" << n << " (init " << bank.count(Family::kInit)
     << ", ack " << bank.count(Family::kAck) << ", witness " << bank.count(Family::kWitness) << ", inform "
     << bank.count(Family::kInform) << ", final " << bank.count(Family::kFinal) << ")";
  return os.str();
}

std::string_view register_count_footnote() {
  return "The init and ack families hold n registers each, 2n together; a figure of 2n² for these two "
         "families is an overcount. The three reader-to-reader families hold n² each.";
}

CampaignResult run_campaign(const ScenarioConfig& sc, const CampaignOptions& opts) {
  CampaignResult res;
  res.scenario = sc;
  const KeyRing ring(sc.base.cfg.n, sc.base.crypto, sc.base.key_seed);
  {
    const RegisterBank bank = RegisterBank::init(sc.base.cfg, sc.base.u0, ring);
    res.registers = bank.size();
    res.register_line = register_count_line(bank);
  }
  for (auto name : all_properties()) {
    PropertyTally t;
    t.property = std::string(name);
    res.tallies.push_back(std::move(t));
  }

  std::set<std::string> expected(sc.expect.violations.begin(), sc.expect.violations.end());
  std::set<std::string> allowed(sc.expect.allow.begin(), sc.expect.allow.end());
  allowed.insert(expected.begin(), expected.end());
  std::set<std::string> seen;
  std::set<std::string> unexpected;
  bool liveness_failed = false;
  bool stop = false;

  auto absorb = [&](std::uint64_t id, ExecutionHistory h) {
    RunResult rr;
    rr.seed = id;
    rr.status = h.status;
    rr.scheduled_steps = h.scheduled_steps;
    rr.history_digest = history_digest(h);
    rr.report = check_all(h, ring, opts.check);
    ++res.runs;
    res.run_digests.push_back(rr.history_digest);
    switch (h.status) {
      case RunStatus::kComplete: ++res.complete; break;
      case RunStatus::kStepLimitExhausted: ++res.step_limit; break;
      case RunStatus::kDeadlock: ++res.deadlock; break;
    }
    for (const auto& d : h.diagnostics) res.invariant_broken += d.code == ErrorCode::kInvariantBroken;
    bool interesting = res.kept.size() < opts.keep_reports;
    bool bad = false;
    for (std::size_t k = 0; k < rr.report.verdicts.size(); ++k) {
      const Verdict& v = rr.report.verdicts[k];
      auto& tally = res.tallies[k];
      if (v.status == VerdictStatus::kPass) ++tally.pass;
      if (v.status == VerdictStatus::kSkipped) ++tally.skipped;
      if (v.violated()) {
        ++tally.violation;
        if (!tally.first_violation) {
          tally.first_violation = id;
          interesting = true;
        }
        seen.insert(v.property);
        if (!allowed.count(v.property)) {
          unexpected.insert(v.property);
          bad = true;
        }
      }
    }
    if (h.status != RunStatus::kComplete && !sc.expect.liveness) {
      liveness_failed = true;
      bad = true;
    }
    if (interesting) res.kept.push_back(std::move(rr));
    if (bad && opts.fail_fast) stop = true;
  };

  try {
    if (sc.exhaustive) {
      std::uint64_t index = 0;
      enumerate_schedules(sc.base, ring, sc.limits, [&](const ExecutionHistory& h) {
        if (!stop) absorb(index, h);
        ++index;
      });
    } else {
      RunSpec spec;
      const std::uint64_t seeds = opts.seeds.value_or(sc.seeds);
      for (std::uint64_t k = 0; k < seeds && !stop; ++k) {
        const std::uint64_t seed = sc.first_seed + k;
        spec = spec_for_seed(sc, seed);
        if (opts.step_limit) spec.step_limit = *opts.step_limit;
        absorb(seed, run(spec, ring));
      }
    }
  } catch (const std::exception& e) {
    res.internal_error = e.what();
  }

  res.unexpected.assign(unexpected.begin(), unexpected.end());
  for (const auto& name : expected) {
    if (!seen.count(name)) res.missing.push_back(name);
  }
  if (!res.internal_error.empty()) {
    res.outcome = Outcome::kInternal;
  } else if (!res.unexpected.empty()) {
    res.outcome = Outcome::kUnexpectedViolation;
  } else if (!res.missing.empty() && !stop) {
    res.outcome = Outcome::kMissingExpected;
  } else if (liveness_failed) {
    res.outcome = Outcome::kLiveness;
  }
  return res;
}

// ---------------------------------------------------------------------------
// Reports

namespace {

ordered_json chain_json(const CheckReport& rep) {
  ordered_json classes = ordered_json::array();
  if (!rep.chain) return classes;
  std::size_t full_idx = 0;
  for (std::size_t k = 0; k < rep.chain->classes.size(); ++k) {
    const auto& members = rep.chain->classes[k];
    const auto& first = rep.stabs[members.front()];
    ordered_json c{{"rank", k}, {"value", to_string(first.value)}};
    ordered_json ws = ordered_json::array();
    for (std::size_t idx : members) ws.push_back(ws_text(rep.stabs[idx].ws));
    c["ws"] = std::move(ws);
    c["step"] = first.step;
    if (const auto* ev = rep.classes.find(first.value)) c["class"] = to_string(ev->cls);
    const bool initial = first.step == 0 && first.row_owner == 0;
    if (!initial && full_idx < rep.full.size()) c["full"] = rep.full[full_idx++].vec;
    classes.push_back(std::move(c));
  }
  return classes;
}

std::string chain_text(const CheckReport& rep) {
  if (!rep.chain) return "  (no chain: stabilized sets are not totally ordered)\n";
  std::ostringstream os;
  std::size_t full_idx = 0;
  for (std::size_t k = 0; k < rep.chain->classes.size(); ++k) {
    const auto& members = rep.chain->classes[k];
    const auto& first = rep.stabs[members.front()];
    os << "  " << (k ? "↦ " : "  ") << "#" << k << " " << first.value << " ws" << ws_text(first.ws);
    if (members.size() > 1) os << " (+" << members.size() - 1 << " more)";
    if (const auto* ev = rep.classes.find(first.value)) os << " " << to_string(ev->cls);
    const bool initial = first.step == 0 && first.row_owner == 0;
    if (!initial && full_idx < rep.full.size()) os << "  T=" << rep.full[full_idx++];
    os << "\n";
  }
  return os.str();
}

}  // namespace

std::string emit_report(const CampaignResult& r, ReportFormat format) {
  const ScenarioConfig& sc = r.scenario;
  const Config& cfg = sc.base.cfg;

  std::vector<std::string> readers;
  for (const auto& [i, s] : sc.base.readers) {
    readers.push_back("r" + std::to_string(i) + ":" + std::string(to_string(s.kind)));
  }

  if (format == ReportFormat::kRecords) {
    std::ostringstream os;
    ordered_json head{{"kind", "scenario"},
                      {"name", sc.name},
                      {"n", cfg.n},
                      {"t", cfg.t},
                      {"writer", std::string(to_string(sc.base.writer.kind))},
                      {"readers", readers},
                      {"exhaustive", sc.exhaustive},
                      {"registers", r.registers},
                      {"register_line", r.register_line},
                      {"footnote", std::string(register_count_footnote())},
                      {"warnings", sc.warnings}};
    os << dump(head) << '\n';
    for (std::size_t i = 0; i < r.run_digests.size(); ++i) {
      os << dump(ordered_json{{"kind", "run"}, {"index", i}, {"history_digest", r.run_digests[i]}}) << '\n';
    }
    for (const auto& t : r.tallies) {
      ordered_json rec{{"kind", "property"}, {"property", t.property}, {"pass", t.pass},
                       {"violation", t.violation}, {"skipped", t.skipped}};
      if (t.first_violation) rec["first_violation"] = *t.first_violation;
      os << dump(rec) << '\n';
    }
    for (const auto& run : r.kept) {
      os << dump(ordered_json{{"kind", "detail"},
                              {"seed", run.seed},
                              {"status", status_name(run.status)},
                              {"steps", run.scheduled_steps},
                              {"history_digest", run.history_digest},
                              {"chain", chain_json(run.report)}})
         << '\n';
      for (const auto& v : run.report.verdicts) {
        if (!v.violated()) continue;
        os << dump(ordered_json{{"kind", "violation"},
                                {"seed", run.seed},
                                {"property", v.property},
                                {"detail", v.detail},
                                {"witness", v.witness}})
           << '\n';
      }
      for (const auto& note : run.report.notes) {
        os << dump(ordered_json{{"kind", "note"}, {"seed", run.seed}, {"text", note}}) << '\n';
      }
    }
    ordered_json tail{{"kind", "outcome"},
                      {"runs", r.runs},
                      {"complete", r.complete},
                      {"step_limit", r.step_limit},
                      {"deadlock", r.deadlock},
                      {"invariant_broken", r.invariant_broken},
                      {"outcome", std::string(to_string(r.outcome))},
                      {"exit_code", exit_code(r.outcome)},
                      {"unexpected", r.unexpected},
                      {"missing", r.missing}};
    if (!r.internal_error.empty()) tail["internal_error"] = r.internal_error;
    os << dump(tail) << '\n';
    return os.str();
  }

  std::ostringstream os;
  os << "scenario " << sc.name << ": n=" << cfg.n << " t=" << cfg.t << " writer=" << to_string(sc.base.writer.kind);
  if (!readers.empty()) {
    os << " readers=";
    for (std::size_t i = 0; i < readers.size(); ++i) os << (i ? "," : "") << readers[i];
  }
  os << "\n";
  if (!sc.description.empty()) os << "  " << sc.description << "\n";
  for (const auto& w : sc.warnings) os << "warning: " << w << "\n";
  os << r.register_line << " [1]\n";
  os << "runs: " << r.runs << " (complete " << r.complete << ", step limit " << r.step_limit << ", deadlock "
     << r.deadlock << ")\n";
  if (r.invariant_broken) os << "invariant-broken diagnostics: " << r.invariant_broken << "\n";
  os << "\n";

  os << pad("property", 26) << pad_left("pass", 6) << pad_left("violation", 11) << pad_left("skipped", 9) << "\n";
  for (const auto& t : r.tallies) {
    os << "  " << pad(t.property, 24) << pad_left(std::to_string(t.pass), 6)
       << pad_left(std::to_string(t.violation), 11) << pad_left(std::to_string(t.skipped), 9);
    if (t.first_violation) os << "   first at run " << *t.first_violation;
    os << "\n";
  }

  for (const auto& run : r.kept) {
    os << "\nrun " << run.seed << " (" << status_name(run.status) << ", " << run.scheduled_steps << " steps, digest "
       << run.history_digest << ")\n";
    os << " ↦ chain:\n" << chain_text(run.report);
    for (const auto& v : run.report.verdicts) {
      if (!v.violated()) continue;
      os << " violation " << v.property << ": " << v.detail << "\n";
      for (const auto& w : v.witness) os << "    " << w << "\n";
    }
    for (const auto& note : run.report.notes) os << " note: " << note << "\n";
  }

  os << "\noutcome: " << to_string(r.outcome) << " (exit " << exit_code(r.outcome) << ")\n";
  if (!sc.expect.violations.empty()) {
    os << "  expected violations:";
    for (const auto& e : sc.expect.violations) os << " " << e;
    os << "\n";
  }
  if (!r.unexpected.empty()) {
    os << "  unexpected violations:";
    for (const auto& e : r.unexpected) os << " " << e;
    os << "\n";
  }
  if (!r.missing.empty()) {
    os << "  expected but not observed:";
    for (const auto& e : r.missing) os << " " << e;
    os << "\n";
  }
  if (!r.internal_error.empty()) os << "  internal error: " << r.internal_error << "\n";
  os << "\n[1] " << register_count_footnote() << "\n";
  os << "report digest " << report_digest(r) << "\n";
  return os.str();
}

std::string report_digest(const CampaignResult& r) {
  return codec::digest_hex(emit_report(r, ReportFormat::kRecords));
}

}  // namespace bzreg
