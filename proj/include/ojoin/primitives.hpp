#pragma once

#include <cstdint>
#include <functional>
#include <span>

#include "ojoin/memory.hpp"

namespace ojoin {

// Side markers carried in Tuple::tag while two inputs share a work array.
inline constexpr std::uint8_t kTagFirst = 0;
inline constexpr std::uint8_t kTagSecond = 1;
inline constexpr std::uint8_t kTagPad = 2;

std::uint64_t next_pow2(std::uint64_t n);
// Compare-exchange count of the bitonic network on a power-of-two length.
std::uint64_t bitonic_comparators(std::uint64_t padded);

template <class Less>
struct FillerLast {
  Less less;
  bool operator()(const Tuple& a, const Tuple& b) const {
    const bool fa = a.tag == kTagFiller, fb = b.tag == kTagFiller;
    if (fa || fb) return !fa && fb;
    return less(a, b);
  }
};

// Bitonic network over a power-of-two array. Each comparator reads both
// slots and writes both back, whatever the comparison says.
template <class Less>
void bitonic_sort(TracedArray& a, Less less) {
  RegisterScope regs(a.context(), 2);
  const std::uint64_t n = a.size();
  for (std::uint64_t k = 2; k <= n; k <<= 1) {
    for (std::uint64_t j = k >> 1; j > 0; j >>= 1) {
      for (std::uint64_t i = 0; i < n; ++i) {
        const std::uint64_t l = i ^ j;
        if (l <= i) continue;
        const bool up = (i & k) == 0;
        Tuple x = a.read(i);
        Tuple y = a.read(l);
        const bool swap = up ? less(y, x) : less(x, y);
        a.write(i, swap ? y : x);
        a.write(l, swap ? x : y);
      }
    }
  }
}

// Power-of-two work array holding `logical` tuples followed by fillers. put()
// stamps each tuple with its position so every sort is stable.
class SortBuffer {
 public:
  SortBuffer(EngineContext& ctx, std::uint64_t logical)
      : logical_(logical), a_(ctx, next_pow2(logical)) {}

  void put(std::uint64_t i, Tuple t) {
    t.seq = i;
    a_.write(i, t);
  }
  Tuple get(std::uint64_t i) const { return a_.read(i); }
  std::uint64_t logical() const { return logical_; }
  EngineContext& context() const { return a_.context(); }

  template <class Less>
  void sort(Less less) {
    Tuple filler;
    filler.tag = kTagFiller;
    for (std::uint64_t i = logical_; i < a_.size(); ++i) a_.write(i, filler);
    bitonic_sort(a_, FillerLast<Less>{less});
  }

 private:
  std::uint64_t logical_;
  TracedArray a_;
};

// Orders: real before dummy, then `key`, then original position.
Relation oblivious_sort(EngineContext& ctx, const Relation& r, AttrSet key);
// Stable move of reals to the front, truncated to `keep` slots.
Relation oblivious_compact(EngineContext& ctx, const Relation& r, std::uint64_t keep);

// Concatenation of the parts, compacted to `keep` slots.
Relation concat_compact(EngineContext& ctx, std::span<const Relation* const> parts, AttrSet schema,
                        std::uint64_t keep);

Relation semi_join(EngineContext& ctx, const Relation& r, const Relation& s, AttrSet x);

using WeightFn = std::function<std::uint64_t(const Tuple&)>;
using CombineFn = std::function<std::uint64_t(std::uint64_t, std::uint64_t)>;

// One (key, aggregate) tuple per distinct key, aggregate in ann[0]; length |r|.
Relation reduce_by_key(EngineContext& ctx, const Relation& r, AttrSet x, const WeightFn& weight = {},
                       const CombineFn& combine = {});

enum class AnnotateMode { kDropUnmatched, kAbsentAsZero };

// Copies s.ann[0] of the matching key into ann[slot] of each r-tuple.
Relation annotate(EngineContext& ctx, const Relation& r, const Relation& s, AttrSet x,
                  std::size_t slot = 0, AnnotateMode mode = AnnotateMode::kDropUnmatched);

// Sorted by x; Tuple::num = rank within its key group, from 1.
Relation multi_number(EngineContext& ctx, const Relation& r, AttrSet x);

Relation project(EngineContext& ctx, const Relation& r, AttrSet x);
Relation intersect(EngineContext& ctx, const Relation& r, const Relation& s);

// ann[first_slot + i] = number of s_list[i] tuples agreeing with the tuple on x.
Relation augment(EngineContext& ctx, const Relation& r, std::span<const Relation* const> s_list,
                 AttrSet x, std::size_t first_slot = 0);
Relation augment(EngineContext& ctx, const Relation& r, const Relation& s, AttrSet x,
                 std::size_t slot);

// tau slots holding ann[weight_slot] contiguous copies of each real tuple,
// in input order, then dummies.
Relation expand(EngineContext& ctx, const Relation& r, std::size_t weight_slot, std::uint64_t tau);

}  // namespace ojoin
