#pragma once

#include <cstdint>
#include <memory>
#include <string_view>
#include <vector>

#include "bzreg/types.hpp"

namespace bzreg {

enum class SignatureKind : std::uint8_t {
  /// Keyed BLAKE2b per process. Fast; the default for campaigns.
  kKeyedDigest,
  /// Ed25519 with seed-derived key pairs.
  kEd25519,
};

std::string_view to_string(SignatureKind kind);
/// Accepts "keyed-digest" and "ed25519".
SignatureKind signature_kind_from_string(std::string_view name);

/// Per-process signing capability and verification material for the writer
/// and all n readers. Keys are derived deterministically from `seed`, so
/// two rings built from the same (n, kind, seed) sign identically.
///
/// Immutable after construction; safe to share across runs.
class KeyRing {
 public:
  KeyRing(int n, SignatureKind kind, std::uint64_t seed = 0);
  ~KeyRing();
  KeyRing(const KeyRing&) = delete;
  KeyRing& operator=(const KeyRing&) = delete;

  /// Throws Error(kUnknownProcess) if `p` is not in the ring.
  Bytes sign(ProcessId p, std::string_view payload) const;
  /// Never throws; false on unknown process or malformed signature.
  bool verify(ProcessId p, std::string_view payload,
              std::string_view signature) const;

  int n() const noexcept { return n_; }
  SignatureKind kind() const noexcept { return kind_; }

 private:
  struct Keys;
  const Keys* keys_for(ProcessId p) const;

  int n_;
  SignatureKind kind_;
  std::vector<std::unique_ptr<Keys>> keys_;  // slot 0: writer, i: reader i
};

/// A signing handle bound to one identity. Adversary strategies only ever
/// receive their own Signer, so they cannot sign as another process.
class Signer {
 public:
  Signer(const KeyRing& ring, ProcessId self) : ring_(&ring), self_(self) {}

  Bytes sign(std::string_view payload) const { return ring_->sign(self_, payload); }
  ProcessId self() const noexcept { return self_; }

 private:
  const KeyRing* ring_;
  ProcessId self_;
};

/// Signs `entries` (sorted by witness first) as `signer`.
WitnessSet make_witness_set(std::vector<WitnessEntry> entries,
                            const Signer& signer);

/// Structural validity plus a good signature from the claimed signer.
/// `expected_signer`, when nonzero, must match the claimed signer.
bool verify_witness_set(const WitnessSet& ws, const KeyRing& ring,
                        const Config& cfg, int expected_signer = 0);

/// Every member verifies, signers are distinct, and ws_of succeeds.
bool verify_inform_set(const InformSet& is, const KeyRing& ring,
                       const Config& cfg);

}  // namespace bzreg
