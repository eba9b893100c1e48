#pragma once

#include <span>
#include <vector>

#include "bzreg/types.hpp"

namespace bzreg {

/// WS(IS): the entries present, bit-for-bit, in every member of the inform
/// set. Throws Error(kInvalidInformSet) when the set has fewer than n-t
/// members, when fewer than n-t entries are common, or when the common
/// entries disagree on the tagged value. Result is sorted by witness.
std::vector<WitnessEntry> ws_of(const InformSet& is, const Config& cfg);

/// Projects a WS onto an n-length partial vector.
PartialTimestamp partial_timestamp(std::span<const WitnessEntry> ws,
                                   const Config& cfg);
PartialTimestamp partial_timestamp(const InformSet& is, const Config& cfg);

/// The ↦ relation between two witness sets, judged over their common
/// witnesses only.
///
/// Throws Error(kCommonQuorumTooSmall) when fewer than cfg.common_quorum()
/// witnesses are shared, and Error(kEqualStampsDifferentValue) when every
/// common stamp agrees but the tagged values differ.
OrderVerdict mapsto_compare(std::span<const WitnessEntry> a,
                            std::span<const WitnessEntry> b,
                            const Config& cfg);

/// Componentwise order on full vectors. Throws Error(kLengthMismatch).
OrderVerdict vec_compare(const FullTimestamp& a, const FullTimestamp& b);

}  // namespace bzreg
