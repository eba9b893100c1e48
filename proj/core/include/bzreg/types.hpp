#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace bzreg {

/// Opaque byte string. Payloads, encoded register cells and signatures all
/// use it; the construction never interprets payload bytes.
using Bytes = std::string;

/// Witness timestamp: a reader's logical clock value.
using Stamp = std::uint64_t;

/// Resilience parameters. Thresholds (n>3t, n>2t) are deliberately not
/// enforced here so that sub-threshold counterexamples can be built.
struct Config {
  int n = 1;
  int t = 0;
  bool writer_byzantine = false;

  /// Throws Error(kInvalidConfig) unless n >= 1 and 0 <= t <= n.
  static Config make(int n, int t, bool writer_byzantine = false);

  int quorum() const noexcept { return n - t; }
  /// Minimum number of witnesses two valid witness sets must share. Never
  /// below one: comparing over an empty common set is meaningless.
  int common_quorum() const noexcept { return n - 2 * t > 1 ? n - 2 * t : 1; }
  int register_count() const noexcept { return 3 * n * n + 2 * n; }

  bool operator==(const Config&) const = default;
};

enum class Role : std::uint8_t { kWriter, kReader };

struct ProcessId {
  Role role = Role::kWriter;
  int index = 0;  // 1..n for readers, 0 for the writer

  static constexpr ProcessId writer() { return {Role::kWriter, 0}; }
  static constexpr ProcessId reader(int i) { return {Role::kReader, i}; }

  bool is_writer() const noexcept { return role == Role::kWriter; }
  /// Schedule slot: 0 for the writer, i for reader i.
  int slot() const noexcept { return is_writer() ? 0 : index; }

  auto operator<=>(const ProcessId&) const = default;
};

std::ostream& operator<<(std::ostream& os, const ProcessId& p);
std::string to_string(const ProcessId& p);

/// The writer's <k,u> pair.
struct TaggedValue {
  std::uint64_t k = 0;
  Bytes u;

  auto operator<=>(const TaggedValue&) const = default;
};

std::ostream& operator<<(std::ostream& os, const TaggedValue& v);
std::string to_string(const TaggedValue& v);

/// <<k,u>, s, p>: reader p witnessed <k,u> at its logical time s.
struct WitnessEntry {
  TaggedValue value;
  Stamp stamp = 0;
  int witness = 0;

  auto operator<=>(const WitnessEntry&) const = default;
};

std::ostream& operator<<(std::ostream& os, const WitnessEntry& e);

/// A signed set of matching witness entries. Entries are kept sorted by
/// witness index; that order is also the canonical signing order.
struct WitnessSet {
  std::vector<WitnessEntry> entries;
  int signer = 0;
  Bytes signature;

  bool operator==(const WitnessSet&) const = default;
};

/// A set of signed witness sets, sorted by signer.
struct InformSet {
  std::vector<WitnessSet> members;

  bool operator==(const InformSet&) const = default;
};

/// Reader index -> witness stamp; std::nullopt is the absent marker, which
/// is distinct from the legitimate initial stamp 0.
struct PartialTimestamp {
  std::vector<std::optional<Stamp>> stamps;  // stamps[i-1] for reader i

  bool operator==(const PartialTimestamp&) const = default;
};

std::ostream& operator<<(std::ostream& os, const PartialTimestamp& pt);
std::string to_string(const PartialTimestamp& pt);

struct FullTimestamp {
  std::vector<Stamp> vec;

  bool operator==(const FullTimestamp&) const = default;
};

std::ostream& operator<<(std::ostream& os, const FullTimestamp& ft);
std::string to_string(const FullTimestamp& ft);

enum class OrderVerdict : std::uint8_t { kBefore, kAfter, kEqual, kConcurrent };

std::ostream& operator<<(std::ostream& os, OrderVerdict v);

/// Swaps Before and After; Equal and Concurrent are symmetric.
OrderVerdict reverse(OrderVerdict v) noexcept;

// Initial values every register family starts from.
TaggedValue initial_value(const Bytes& u0);
WitnessEntry initial_entry(const Bytes& u0, int witness);
/// Unsigned initial witness set: one initial entry per reader.
std::vector<WitnessEntry> initial_entries(const Config& cfg, const Bytes& u0);

}  // namespace bzreg
