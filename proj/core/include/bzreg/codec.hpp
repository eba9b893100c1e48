#pragma once

#include <optional>
#include <string_view>

#include "bzreg/types.hpp"

namespace bzreg::codec {

// Family-specific binary encodings for register cells. All integers are
// fixed-width little-endian. Decoders accept arbitrary bytes (a Byzantine
// owner may write anything) and return std::nullopt on malformed input,
// including trailing garbage.

Bytes encode(const TaggedValue& v);
Bytes encode(const WitnessEntry& e);
Bytes encode(const WitnessSet& ws);
Bytes encode(const InformSet& is);

std::optional<TaggedValue> decode_tagged(std::string_view bytes);
std::optional<WitnessEntry> decode_entry(std::string_view bytes);
/// Also rejects entries not strictly sorted by witness index.
std::optional<WitnessSet> decode_witness_set(std::string_view bytes);
std::optional<InformSet> decode_inform_set(std::string_view bytes);

/// Canonical bytes covered by a witness-set signature: a domain tag followed
/// by the entries in witness order. The signer's identity is bound by the
/// key, not the payload.
Bytes signing_payload(const std::vector<WitnessEntry>& entries);

/// Short hex digest used in trace exports (first 8 bytes of BLAKE2b).
std::string digest_hex(std::string_view bytes);

}  // namespace bzreg::codec
