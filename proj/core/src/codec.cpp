#include "bzreg/codec.hpp"

#include <sodium.h>

#include <array>
#include <cstdint>
#include <span>

namespace bzreg::codec {
namespace {

// Hard caps keep a hostile cell from asking the decoder to allocate
// unbounded memory.
constexpr std::uint32_t kMaxPayload = 1u << 20;
constexpr std::uint32_t kMaxItems = 4096;

void put_u32(Bytes& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(Bytes& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_blob(Bytes& out, std::string_view blob) {
  put_u32(out, static_cast<std::uint32_t>(blob.size()));
  out.append(blob);
}

void put_tagged(Bytes& out, const TaggedValue& v) {
  put_u64(out, v.k);
  put_blob(out, v.u);
}

void put_entry(Bytes& out, const WitnessEntry& e) {
  put_tagged(out, e.value);
  put_u64(out, e.stamp);
  put_u32(out, static_cast<std::uint32_t>(e.witness));
}

void put_witness_set(Bytes& out, const WitnessSet& ws) {
  put_u32(out, static_cast<std::uint32_t>(ws.signer));
  put_u32(out, static_cast<std::uint32_t>(ws.entries.size()));
  for (const auto& e : ws.entries) put_entry(out, e);
  put_blob(out, ws.signature);
}

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}

  bool done() const { return pos_ == in_.size(); }

  std::optional<std::uint32_t> u32() {
    if (in_.size() - pos_ < 4) return std::nullopt;
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in_[pos_ + i])) << (8 * i);
    }
    pos_ += 4;
    return v;
  }

  std::optional<std::uint64_t> u64() {
    if (in_.size() - pos_ < 8) return std::nullopt;
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in_[pos_ + i])) << (8 * i);
    }
    pos_ += 8;
    return v;
  }

  std::optional<Bytes> blob() {
    auto len = u32();
    if (!len || *len > kMaxPayload || in_.size() - pos_ < *len) return std::nullopt;
    Bytes out(in_.substr(pos_, *len));
    pos_ += *len;
    return out;
  }

  std::optional<TaggedValue> tagged() {
    auto k = u64();
    if (!k) return std::nullopt;
    auto u = blob();
    if (!u) return std::nullopt;
    return TaggedValue{*k, std::move(*u)};
  }

  std::optional<WitnessEntry> entry() {
    auto v = tagged();
    if (!v) return std::nullopt;
    auto s = u64();
    auto w = u32();
    if (!s || !w || *w > kMaxItems) return std::nullopt;
    return WitnessEntry{std::move(*v), *s, static_cast<int>(*w)};
  }

  std::optional<WitnessSet> witness_set() {
    auto signer = u32();
    auto count = u32();
    if (!signer || !count || *signer > kMaxItems || *count > kMaxItems) {
      return std::nullopt;
    }
    WitnessSet ws;
    ws.signer = static_cast<int>(*signer);
    ws.entries.reserve(*count);
    for (std::uint32_t i = 0; i < *count; ++i) {
      auto e = entry();
      if (!e) return std::nullopt;
      if (!ws.entries.empty() && ws.entries.back().witness >= e->witness) {
        return std::nullopt;
      }
      ws.entries.push_back(std::move(*e));
    }
    auto sig = blob();
    if (!sig) return std::nullopt;
    ws.signature = std::move(*sig);
    return ws;
  }

 private:
  std::string_view in_;
  std::size_t pos_ = 0;
};

}  // namespace

Bytes encode(const TaggedValue& v) {
  Bytes out;
  put_tagged(out, v);
  return out;
}

Bytes encode(const WitnessEntry& e) {
  Bytes out;
  put_entry(out, e);
  return out;
}

Bytes encode(const WitnessSet& ws) {
  Bytes out;
  put_witness_set(out, ws);
  return out;
}

Bytes encode(const InformSet& is) {
  Bytes out;
  put_u32(out, static_cast<std::uint32_t>(is.members.size()));
  for (const auto& m : is.members) put_witness_set(out, m);
  return out;
}

std::optional<TaggedValue> decode_tagged(std::string_view bytes) {
  Reader r(bytes);
  auto v = r.tagged();
  if (!v || !r.done()) return std::nullopt;
  return v;
}

std::optional<WitnessEntry> decode_entry(std::string_view bytes) {
  Reader r(bytes);
  auto e = r.entry();
  if (!e || !r.done()) return std::nullopt;
  return e;
}

std::optional<WitnessSet> decode_witness_set(std::string_view bytes) {
  Reader r(bytes);
  auto ws = r.witness_set();
  if (!ws || !r.done()) return std::nullopt;
  return ws;
}

std::optional<InformSet> decode_inform_set(std::string_view bytes) {
  Reader r(bytes);
  auto count = r.u32();
  if (!count || *count > kMaxItems) return std::nullopt;
  InformSet is;
  is.members.reserve(*count);
  for (std::uint32_t i = 0; i < *count; ++i) {
    auto ws = r.witness_set();
    if (!ws) return std::nullopt;
    is.members.push_back(std::move(*ws));
  }
  if (!r.done()) return std::nullopt;
  return is;
}

Bytes signing_payload(const std::vector<WitnessEntry>& entries) {
  Bytes out = "bzreg/witness-set/v1";
  put_u32(out, static_cast<std::uint32_t>(entries.size()));
  for (const auto& e : entries) put_entry(out, e);
  return out;
}

std::string digest_hex(std::string_view bytes) {
  std::array<unsigned char, crypto_generichash_BYTES_MIN> h{};
  crypto_generichash(h.data(), h.size(),
                     reinterpret_cast<const unsigned char*>(bytes.data()),
                     bytes.size(), nullptr, 0);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(16);
  for (unsigned char c : std::span(h).first<8>()) {
    out.push_back(kHex[c >> 4]);
    out.push_back(kHex[c & 0xf]);
  }
  return out;
}

}  // namespace bzreg::codec
