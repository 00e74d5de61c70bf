#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <limits>

#include "ojoin/attrset.hpp"

namespace ojoin {

using Value = std::uint64_t;

// Largest code is reserved for dummies; ingestion rejects it.
inline constexpr Value kReservedCode = std::numeric_limits<Value>::max();
inline constexpr std::size_t kMaxAnnotations = 4;
inline constexpr std::uint64_t kInfinity = std::numeric_limits<std::uint64_t>::max();

// Work-array slots beyond the logical length while sorting.
inline constexpr std::uint8_t kTagFiller = 0xFF;

namespace detail {
constexpr std::array<Value, kMaxAttributes> reserved_values() {
  std::array<Value, kMaxAttributes> v{};
  for (auto& x : v) x = kReservedCode;
  return v;
}
}  // namespace detail

// Values are indexed by attribute id, so tuples of different schemas combine
// by copying the other side's columns. Slots outside the owning schema are
// ignored by every comparison.
struct Tuple {
  std::array<Value, kMaxAttributes> values = detail::reserved_values();
  std::array<std::uint64_t, kMaxAnnotations> ann{};
  std::uint64_t pos = 0;
  std::uint64_t num = 0;
  std::uint64_t seq = 0;
  std::uint8_t tag = 0;
  bool dummy = true;

  static Tuple bottom() { return Tuple{}; }
  bool real() const { return !dummy; }
};

inline int compare_on(const Tuple& a, const Tuple& b, AttrSet key) {
  for (std::uint32_t m = key.bits(); m != 0; m &= m - 1) {
    const int x = std::countr_zero(m);
    if (a.values[x] != b.values[x]) return a.values[x] < b.values[x] ? -1 : 1;
  }
  return 0;
}

inline bool equal_on(const Tuple& a, const Tuple& b, AttrSet key) {
  return compare_on(a, b, key) == 0;
}

// Tuple over sa | sb carrying both sides' values; annotations cleared.
inline Tuple join_tuples(const Tuple& a, const Tuple& b, AttrSet sb) {
  Tuple t;
  t.values = a.values;
  for (std::uint32_t m = sb.bits(); m != 0; m &= m - 1) {
    const int x = std::countr_zero(m);
    t.values[x] = b.values[x];
  }
  t.dummy = false;
  return t;
}

inline Tuple project_tuple(const Tuple& t, AttrSet keep) {
  Tuple p;
  for (std::uint32_t m = keep.bits(); m != 0; m &= m - 1) {
    const int x = std::countr_zero(m);
    p.values[x] = t.values[x];
  }
  p.dummy = t.dummy;
  return p;
}

}  // namespace ojoin
