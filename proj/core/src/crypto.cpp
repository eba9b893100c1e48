#include "bzreg/crypto.hpp"

#include <sodium.h>

#include <algorithm>
#include <array>
#include <mutex>

#include "bzreg/codec.hpp"
#include "bzreg/error.hpp"
#include "bzreg/timestamp.hpp"

namespace bzreg {

struct KeyRing::Keys {
  // Keyed digest: `secret` is the MAC key. Ed25519: seed-derived pair.
  std::array<unsigned char, crypto_generichash_KEYBYTES> secret{};
  std::array<unsigned char, crypto_sign_PUBLICKEYBYTES> pk{};
  std::array<unsigned char, crypto_sign_SECRETKEYBYTES> sk{};
};

namespace {

void ensure_sodium() {
  static std::once_flag once;
  std::call_once(once, [] {
    if (sodium_init() < 0) throw std::runtime_error("libsodium init failed");
  });
}

std::array<unsigned char, 32> derive_seed(std::uint64_t seed, int slot,
                                          std::string_view domain) {
  Bytes material(domain);
  for (int i = 0; i < 8; ++i) material.push_back(static_cast<char>((seed >> (8 * i)) & 0xff));
  for (int i = 0; i < 4; ++i) material.push_back(static_cast<char>((slot >> (8 * i)) & 0xff));
  std::array<unsigned char, 32> out{};
  crypto_generichash(out.data(), out.size(),
                     reinterpret_cast<const unsigned char*>(material.data()),
                     material.size(), nullptr, 0);
  return out;
}

}  // namespace

std::string_view to_string(SignatureKind kind) {
  switch (kind) {
    case SignatureKind::kKeyedDigest: return "keyed-digest";
    case SignatureKind::kEd25519: return "ed25519";
  }
  return "unknown";
}

SignatureKind signature_kind_from_string(std::string_view name) {
  if (name == "keyed-digest") return SignatureKind::kKeyedDigest;
  if (name == "ed25519") return SignatureKind::kEd25519;
  throw Error(ErrorCode::kScenarioConfig,
              "unknown signature scheme '" + std::string(name) + "'");
}

KeyRing::KeyRing(int n, SignatureKind kind, std::uint64_t seed)
    : n_(n), kind_(kind) {
  ensure_sodium();
  keys_.reserve(n + 1);
  for (int slot = 0; slot <= n; ++slot) {
    auto keys = std::make_unique<Keys>();
    if (kind == SignatureKind::kKeyedDigest) {
      keys->secret = derive_seed(seed, slot, "bzreg/mac-key");
    } else {
      auto s = derive_seed(seed, slot, "bzreg/ed25519-seed");
      crypto_sign_seed_keypair(keys->pk.data(), keys->sk.data(), s.data());
    }
    keys_.push_back(std::move(keys));
  }
}

KeyRing::~KeyRing() = default;

const KeyRing::Keys* KeyRing::keys_for(ProcessId p) const {
  const int slot = p.slot();
  if (p.is_writer() ? p.index != 0 : (p.index < 1 || p.index > n_)) return nullptr;
  return keys_[slot].get();
}

Bytes KeyRing::sign(ProcessId p, std::string_view payload) const {
  const Keys* keys = keys_for(p);
  if (!keys) throw Error(ErrorCode::kUnknownProcess, to_string(p));
  const auto* msg = reinterpret_cast<const unsigned char*>(payload.data());
  if (kind_ == SignatureKind::kKeyedDigest) {
    Bytes sig(crypto_generichash_BYTES, '\0');
    crypto_generichash(reinterpret_cast<unsigned char*>(sig.data()), sig.size(),
                       msg, payload.size(), keys->secret.data(),
                       keys->secret.size());
    return sig;
  }
  Bytes sig(crypto_sign_BYTES, '\0');
  crypto_sign_detached(reinterpret_cast<unsigned char*>(sig.data()), nullptr,
                       msg, payload.size(), keys->sk.data());
  return sig;
}

bool KeyRing::verify(ProcessId p, std::string_view payload,
                     std::string_view signature) const {
  const Keys* keys = keys_for(p);
  if (!keys) return false;
  const auto* msg = reinterpret_cast<const unsigned char*>(payload.data());
  if (kind_ == SignatureKind::kKeyedDigest) {
    if (signature.size() != crypto_generichash_BYTES) return false;
    std::array<unsigned char, crypto_generichash_BYTES> expect{};
    crypto_generichash(expect.data(), expect.size(), msg, payload.size(),
                       keys->secret.data(), keys->secret.size());
    return sodium_memcmp(expect.data(), signature.data(), expect.size()) == 0;
  }
  if (signature.size() != crypto_sign_BYTES) return false;
  return crypto_sign_verify_detached(
             reinterpret_cast<const unsigned char*>(signature.data()), msg,
             payload.size(), keys->pk.data()) == 0;
}

WitnessSet make_witness_set(std::vector<WitnessEntry> entries,
                            const Signer& signer) {
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.witness < b.witness; });
  WitnessSet ws;
  ws.signer = signer.self().index;
  ws.signature = signer.sign(codec::signing_payload(entries));
  ws.entries = std::move(entries);
  return ws;
}

bool verify_witness_set(const WitnessSet& ws, const KeyRing& ring,
                        const Config& cfg, int expected_signer) {
  if (ws.signer < 1 || ws.signer > cfg.n) return false;
  if (expected_signer != 0 && ws.signer != expected_signer) return false;
  if (static_cast<int>(ws.entries.size()) < cfg.quorum() || ws.entries.empty()) {
    return false;
  }
  for (std::size_t i = 0; i < ws.entries.size(); ++i) {
    const auto& e = ws.entries[i];
    if (e.witness < 1 || e.witness > cfg.n) return false;
    if (e.value != ws.entries.front().value) return false;
    if (i > 0 && ws.entries[i - 1].witness >= e.witness) return false;
  }
  return ring.verify(ProcessId::reader(ws.signer),
                     codec::signing_payload(ws.entries), ws.signature);
}

bool verify_inform_set(const InformSet& is, const KeyRing& ring,
                       const Config& cfg) {
  std::vector<int> signers;
  for (const auto& m : is.members) {
    if (!verify_witness_set(m, ring, cfg)) return false;
    signers.push_back(m.signer);
  }
  std::sort(signers.begin(), signers.end());
  if (std::adjacent_find(signers.begin(), signers.end()) != signers.end()) {
    return false;
  }
  try {
    (void)ws_of(is, cfg);
  } catch (const Error&) {
    return false;
  }
  return true;
}

}  // namespace bzreg
