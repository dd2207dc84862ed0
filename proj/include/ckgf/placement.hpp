#pragma once

// Key hashing, fingerprint derivation and the two bucket-placement policies.
//
// XOR policy (partial-key cuckoo hashing): i2 = i1 ^ tag_hash(fp), masked to
// the power-of-two bucket count. The map is an involution, so a displaced
// tag finds its other bucket from (current bucket, tag) alone.
//
// OFFSET policy: i2 = (i1 + offset(fp)) mod m for any m >= 2. The top bit of
// each stored lane is a choice bit recording which of the two buckets the tag
// lives in; the remaining f-1 bits hold the fingerprint payload.

#include <cstdint>

#include "ckgf/config.hpp"
#include "ckgf/word_ops.hpp"

namespace ckgf {

// xxHash64 of the key's 8 little-endian bytes.
std::uint64_t hash_key(std::uint64_t key, std::uint64_t seed) noexcept;

// Fibonacci-style scrambler of a fingerprint into index space (high 32 bits
// of fp times a fixed odd constant).
constexpr std::uint64_t tag_hash(Tag fp) noexcept {
  return (std::uint64_t{fp} * 0x9E3779B97F4A7C15ull) >> 32;
}

struct Placement {
  Tag fp = 0;  // payload fingerprint, never 0
  std::uint64_t i1 = 0;
  std::uint64_t i2 = 0;
};

struct AltIndex {
  std::uint64_t index = 0;
  bool choice = false;  // residency bit after the move (OFFSET only)
};

// Placement arithmetic specialised for one configuration.
class Placer {
 public:
  explicit Placer(const FilterConfig& cfg);

  Placement place(std::uint64_t key) const noexcept { return place_hash(hash_key(key, seed_)); }
  Placement place_hash(std::uint64_t hash) const noexcept;

  // Other candidate bucket of a payload currently at `index`. `choice` is the
  // residency bit of the stored lane and is ignored under XOR.
  AltIndex alt_index(std::uint64_t index, Tag fp, bool choice) const noexcept;

  // Distance from primary to alternate bucket under OFFSET; always in [1, m-1].
  std::uint64_t offset(Tag fp) const noexcept { return 1 + tag_hash(fp) % (bucket_count_ - 1); }

  // Stored lane value for a payload resident in its primary (choice=false)
  // or alternate (choice=true) bucket.
  Tag encode(Tag fp, bool choice) const noexcept {
    return choice && offset_policy_ ? (fp | choice_bit_) : fp;
  }
  Tag payload(Tag stored) const noexcept { return stored & payload_mask_; }
  bool choice(Tag stored) const noexcept { return offset_policy_ && (stored & choice_bit_) != 0; }

  unsigned payload_bits() const noexcept { return payload_bits_; }
  std::uint64_t bucket_count() const noexcept { return bucket_count_; }
  PlacementPolicy policy() const noexcept {
    return offset_policy_ ? PlacementPolicy::kOffset : PlacementPolicy::kXor;
  }

  // Reduce 32 hash bits to [0, m): mask for powers of two, multiply-shift otherwise.
  std::uint64_t reduce(std::uint32_t h) const noexcept {
    return pow2_ ? (h & index_mask_) : ((std::uint64_t{h} * bucket_count_) >> 32);
  }

 private:
  std::uint64_t seed_;
  std::uint64_t bucket_count_;
  std::uint64_t index_mask_;
  bool pow2_;
  bool offset_policy_;
  unsigned payload_bits_;
  Tag payload_mask_;
  Tag choice_bit_;
};

Placement derive_placement(std::uint64_t key, const FilterConfig& cfg);
AltIndex alt_index(std::uint64_t index, Tag fp, bool choice, const FilterConfig& cfg);

}  // namespace ckgf
