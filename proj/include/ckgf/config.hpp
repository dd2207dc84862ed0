#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace ckgf {

enum class PlacementPolicy : std::uint32_t { kXor = 0, kOffset = 1 };
enum class EvictionStrategy : std::uint32_t { kDfs = 0, kBfs = 1 };

std::string_view to_string(PlacementPolicy policy) noexcept;
std::string_view to_string(EvictionStrategy strategy) noexcept;
PlacementPolicy parse_policy(std::string_view name);
EvictionStrategy parse_eviction(std::string_view name);

struct FilterConfig {
  unsigned fingerprint_bits = 16;
  unsigned bucket_slots = 16;
  std::uint64_t bucket_count = 1u << 16;
  PlacementPolicy policy = PlacementPolicy::kXor;
  EvictionStrategy eviction = EvictionStrategy::kDfs;
  unsigned max_evictions = 500;
  std::uint64_t seed = 0;

  std::uint64_t total_slots() const noexcept { return bucket_count * bucket_slots; }
  unsigned words_per_bucket() const noexcept { return bucket_slots * fingerprint_bits / 64; }
  unsigned tags_per_word() const noexcept { return 64 / fingerprint_bits; }

  // Throws ConfigError naming the first violated constraint.
  void validate() const;

  friend bool operator==(const FilterConfig&, const FilterConfig&) = default;
};

}  // namespace ckgf
