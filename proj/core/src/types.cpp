#include "bzreg/types.hpp"

#include <sstream>

#include "bzreg/error.hpp"

namespace bzreg {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kInvalidInformSet: return "InvalidInformSet";
    case ErrorCode::kCommonQuorumTooSmall: return "CommonQuorumTooSmall";
    case ErrorCode::kEqualStampsDifferentValue: return "EqualStampsDifferentValue";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kAccessViolation: return "AccessViolation";
    case ErrorCode::kUnknownProcess: return "UnknownProcess";
    case ErrorCode::kConcurrentFinalSets: return "ConcurrentFinalSets";
    case ErrorCode::kInvariantBroken: return "InvariantBroken";
    case ErrorCode::kNoLinearization: return "NoLinearization";
    case ErrorCode::kBoundTooLarge: return "BoundTooLarge";
    case ErrorCode::kScenarioConfig: return "ConfigError";
    case ErrorCode::kSuspectedProcess: return "SuspectedProcess";
    case ErrorCode::kStepLimitExhausted: return "StepLimitExhausted";
  }
  return "Unknown";
}

Config Config::make(int n, int t, bool writer_byzantine) {
  if (n < 1) throw Error(ErrorCode::kInvalidConfig, "n must be >= 1");
  if (t < 0 || t > n) {
    throw Error(ErrorCode::kInvalidConfig, "t must lie in [0, n]");
  }
  return Config{n, t, writer_byzantine};
}

std::ostream& operator<<(std::ostream& os, const ProcessId& p) {
  if (p.is_writer()) return os << "w";
  return os << "r" << p.index;
}

std::string to_string(const ProcessId& p) {
  std::ostringstream os;
  os << p;
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const TaggedValue& v) {
  return os << "<" << v.k << "," << v.u << ">";
}

std::string to_string(const TaggedValue& v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const WitnessEntry& e) {
  return os << "<" << e.value << "," << e.stamp << ",r" << e.witness << ">";
}

std::ostream& operator<<(std::ostream& os, const PartialTimestamp& pt) {
  os << "{";
  for (std::size_t i = 0; i < pt.stamps.size(); ++i) {
    if (i) os << ",";
    os << (i + 1) << ":";
    if (pt.stamps[i]) {
      os << *pt.stamps[i];
    } else {
      os << "_";
    }
  }
  return os << "}";
}

std::string to_string(const PartialTimestamp& pt) {
  std::ostringstream os;
  os << pt;
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const FullTimestamp& ft) {
  os << "[";
  for (std::size_t i = 0; i < ft.vec.size(); ++i) {
    if (i) os << ",";
    os << ft.vec[i];
  }
  return os << "]";
}

std::string to_string(const FullTimestamp& ft) {
  std::ostringstream os;
  os << ft;
  return os.str();
}

std::ostream& operator<<(std::ostream& os, OrderVerdict v) {
  switch (v) {
    case OrderVerdict::kBefore: return os << "Before";
    case OrderVerdict::kAfter: return os << "After";
    case OrderVerdict::kEqual: return os << "Equal";
    case OrderVerdict::kConcurrent: return os << "Concurrent";
  }
  return os;
}

OrderVerdict reverse(OrderVerdict v) noexcept {
  switch (v) {
    case OrderVerdict::kBefore: return OrderVerdict::kAfter;
    case OrderVerdict::kAfter: return OrderVerdict::kBefore;
    default: return v;
  }
}

TaggedValue initial_value(const Bytes& u0) { return TaggedValue{0, u0}; }

WitnessEntry initial_entry(const Bytes& u0, int witness) {
  return WitnessEntry{initial_value(u0), 0, witness};
}

std::vector<WitnessEntry> initial_entries(const Config& cfg, const Bytes& u0) {
  std::vector<WitnessEntry> out;
  out.reserve(cfg.n);
  for (int i = 1; i <= cfg.n; ++i) out.push_back(initial_entry(u0, i));
  return out;
}

}  // namespace bzreg
