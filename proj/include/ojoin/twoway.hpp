#pragma once

#include <cstdint>

#include "ojoin/memory.hpp"

namespace ojoin {

// |r|*|s| slots visited by recursive halving of the larger side; each slot
// holds the joined pair or a dummy.
Relation nested_loop_join(EngineContext& ctx, const Relation& r, const Relation& s);

// tau slots whose reals are exactly r join s on their shared attributes.
Relation relaxed_two_way(EngineContext& ctx, const Relation& r, const Relation& s, std::uint64_t tau);

}  // namespace ojoin
