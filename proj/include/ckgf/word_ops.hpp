#pragma once

// SWAR (SIMD-within-a-register) kernels over 64-bit words holding packed
// fingerprint lanes. A word of lane width f carries 64/f lanes; lane 0 sits
// in the least-significant f bits.

#include <bit>
#include <cassert>
#include <cstdint>
#include <optional>

#include "ckgf/errors.hpp"

namespace ckgf {

using Word = std::uint64_t;
using LaneMask = std::uint64_t;
using Tag = std::uint32_t;

constexpr bool is_supported_lane_width(unsigned f) noexcept {
  return f == 8 || f == 16 || f == 32;
}

inline void require_lane_width(unsigned f) {
  if (!is_supported_lane_width(f)) {
    throw ConfigError("fingerprint_bits must be one of {8, 16, 32}");
  }
}

// Per-width constants. Built once per filter so the hot paths never branch on f.
struct LaneLayout {
  unsigned bits = 16;
  unsigned lanes_per_word = 4;
  Word lane_mask = 0xFFFF;  // low f bits
  Word low_ones = 0;        // 1 in the lowest bit of every lane
  Word high_ones = 0;       // 1 in the highest bit of every lane

  constexpr explicit LaneLayout(unsigned f) noexcept
      : bits(f),
        lanes_per_word(64 / f),
        lane_mask((Word{1} << f) - 1),
        low_ones(~Word{0} / lane_mask),
        high_ones(low_ones << (f - 1)) {}
};

constexpr Word broadcast_tag(const LaneLayout& layout, Tag tag) noexcept {
  return layout.low_ones * (Word{tag} & layout.lane_mask);
}

// Top bit of lane i is set iff lane i of w is zero. Unlike the shorter
// (w - low) & ~w & high form, this never marks a lane because of a borrow
// out of a lower zero lane, so the mask is exact for every lane.
constexpr LaneMask zero_mask(const LaneLayout& layout, Word w) noexcept {
  const Word low_bits = ~layout.high_ones;
  const Word t = (w & low_bits) + low_bits;
  return ~(t | w | low_bits);
}

constexpr bool has_zero_lane(const LaneLayout& layout, Word w) noexcept {
  return zero_mask(layout, w) != 0;
}

// Lanes of w equal to tag; `pattern` is broadcast_tag(tag).
constexpr LaneMask match_mask(const LaneLayout& layout, Word w, Word pattern) noexcept {
  return zero_mask(layout, w ^ pattern);
}

constexpr std::optional<unsigned> first_set_lane(const LaneLayout& layout,
                                                 LaneMask mask) noexcept {
  if (mask == 0) return std::nullopt;
  return static_cast<unsigned>(std::countr_zero(mask)) / layout.bits;
}

constexpr Tag extract_tag(const LaneLayout& layout, Word w, unsigned slot) noexcept {
  assert(slot < layout.lanes_per_word);
  return static_cast<Tag>((w >> (slot * layout.bits)) & layout.lane_mask);
}

constexpr Word replace_tag(const LaneLayout& layout, Word w, unsigned slot, Tag tag) noexcept {
  assert(slot < layout.lanes_per_word);
  assert((Word{tag} & ~layout.lane_mask) == 0);
  const unsigned shift = slot * layout.bits;
  return (w & ~(layout.lane_mask << shift)) | ((Word{tag} & layout.lane_mask) << shift);
}

// Convenience overloads taking the lane width directly. These validate f and
// are meant for tests and tooling; the filter uses a cached LaneLayout.
inline Word broadcast_tag(Tag tag, unsigned f) {
  require_lane_width(f);
  return broadcast_tag(LaneLayout{f}, tag);
}

inline LaneMask zero_mask(Word w, unsigned f) {
  require_lane_width(f);
  return zero_mask(LaneLayout{f}, w);
}

inline std::optional<unsigned> first_set_lane(LaneMask mask, unsigned f) {
  require_lane_width(f);
  return first_set_lane(LaneLayout{f}, mask);
}

inline Tag extract_tag(Word w, unsigned slot, unsigned f) {
  require_lane_width(f);
  return extract_tag(LaneLayout{f}, w, slot);
}

inline Word replace_tag(Word w, unsigned slot, Tag tag, unsigned f) {
  require_lane_width(f);
  return replace_tag(LaneLayout{f}, w, slot, tag);
}

}  // namespace ckgf
