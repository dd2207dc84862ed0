#include "ckgf/placement.hpp"

#include <bit>

namespace ckgf {
namespace {

constexpr std::uint64_t kPrime1 = 0x9E3779B185EBCA87ull;
constexpr std::uint64_t kPrime2 = 0xC2B2AE3D27D4EB4Full;
constexpr std::uint64_t kPrime3 = 0x165667B19E3779F9ull;
constexpr std::uint64_t kPrime4 = 0x85EBCA77C2B2AE63ull;
constexpr std::uint64_t kPrime5 = 0x27D4EB2F165667C5ull;

}  // namespace

std::uint64_t hash_key(std::uint64_t key, std::uint64_t seed) noexcept {
  // XXH64 specialised to an 8-byte input.
  std::uint64_t acc = key * kPrime2;
  acc = std::rotl(acc, 31) * kPrime1;

  std::uint64_t h = seed + kPrime5 + 8;
  h ^= acc;
  h = std::rotl(h, 27) * kPrime1 + kPrime4;

  h ^= h >> 33;
  h *= kPrime2;
  h ^= h >> 29;
  h *= kPrime3;
  h ^= h >> 32;
  return h;
}

Placer::Placer(const FilterConfig& cfg)
    : seed_((cfg.validate(), cfg.seed)),
      bucket_count_(cfg.bucket_count),
      index_mask_(cfg.bucket_count - 1),
      pow2_(std::has_single_bit(cfg.bucket_count)),
      offset_policy_(cfg.policy == PlacementPolicy::kOffset),
      payload_bits_(offset_policy_ ? cfg.fingerprint_bits - 1 : cfg.fingerprint_bits),
      payload_mask_(static_cast<Tag>((std::uint64_t{1} << payload_bits_) - 1)),
      choice_bit_(offset_policy_ ? Tag{1} << payload_bits_ : 0) {}

Placement Placer::place_hash(std::uint64_t hash) const noexcept {
  Placement p;
  p.fp = static_cast<Tag>(hash >> 32) & payload_mask_;
  if (p.fp == 0) p.fp = 1;  // 0 is the empty-slot sentinel
  p.i1 = reduce(static_cast<std::uint32_t>(hash));
  p.i2 = alt_index(p.i1, p.fp, false).index;
  return p;
}

AltIndex Placer::alt_index(std::uint64_t index, Tag fp, bool choice) const noexcept {
  if (!offset_policy_) {
    return {(index ^ tag_hash(fp)) & index_mask_, false};
  }
  const std::uint64_t off = offset(fp);
  if (!choice) {
    const std::uint64_t fwd = index + off;
    return {fwd >= bucket_count_ ? fwd - bucket_count_ : fwd, true};
  }
  return {index >= off ? index - off : index + bucket_count_ - off, false};
}

Placement derive_placement(std::uint64_t key, const FilterConfig& cfg) {
  return Placer(cfg).place(key);
}

AltIndex alt_index(std::uint64_t index, Tag fp, bool choice, const FilterConfig& cfg) {
  return Placer(cfg).alt_index(index, fp, choice);
}

}  // namespace ckgf
