#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace ojoin {

inline constexpr std::size_t kMaxAttributes = 16;
inline constexpr std::size_t kMaxEdges = 16;

using AttrId = std::uint8_t;

// Set of attribute ids, stored as a bitmask. Iteration is ascending, which is
// the canonical attribute order.
class AttrSet {
 public:
  constexpr AttrSet() = default;
  constexpr explicit AttrSet(std::uint32_t bits) : bits_(bits) {}

  static AttrSet of(std::initializer_list<AttrId> ids) {
    AttrSet s;
    for (AttrId id : ids) s.insert(id);
    return s;
  }
  static constexpr AttrSet single(AttrId id) { return AttrSet(1u << id); }
  static constexpr AttrSet first_n(std::size_t n) {
    return AttrSet(n >= 32 ? ~0u : ((1u << n) - 1));
  }

  constexpr bool contains(AttrId id) const { return (bits_ >> id) & 1u; }
  constexpr void insert(AttrId id) { bits_ |= 1u << id; }
  constexpr void erase(AttrId id) { bits_ &= ~(1u << id); }
  constexpr std::size_t size() const { return static_cast<std::size_t>(std::popcount(bits_)); }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::uint32_t bits() const { return bits_; }
  constexpr bool subset_of(AttrSet o) const { return (bits_ & ~o.bits_) == 0; }

  // Smallest / largest member. Undefined on the empty set.
  constexpr AttrId front() const { return static_cast<AttrId>(std::countr_zero(bits_)); }
  constexpr AttrId back() const { return static_cast<AttrId>(31 - std::countl_zero(bits_)); }

  std::vector<AttrId> ids() const {
    std::vector<AttrId> out;
    for (std::uint32_t b = bits_; b != 0; b &= b - 1) {
      out.push_back(static_cast<AttrId>(std::countr_zero(b)));
    }
    return out;
  }

  friend constexpr AttrSet operator|(AttrSet a, AttrSet b) { return AttrSet(a.bits_ | b.bits_); }
  friend constexpr AttrSet operator&(AttrSet a, AttrSet b) { return AttrSet(a.bits_ & b.bits_); }
  friend constexpr AttrSet operator-(AttrSet a, AttrSet b) { return AttrSet(a.bits_ & ~b.bits_); }
  friend constexpr bool operator==(AttrSet a, AttrSet b) = default;
  friend constexpr bool operator<(AttrSet a, AttrSet b) { return a.bits_ < b.bits_; }

 private:
  std::uint32_t bits_ = 0;
};

}  // namespace ojoin
