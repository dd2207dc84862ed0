#include "ckgf/config.hpp"

#include <bit>
#include <string>

#include "ckgf/errors.hpp"
#include "ckgf/word_ops.hpp"

namespace ckgf {

std::string_view to_string(PlacementPolicy policy) noexcept {
  return policy == PlacementPolicy::kXor ? "xor" : "offset";
}

std::string_view to_string(EvictionStrategy strategy) noexcept {
  return strategy == EvictionStrategy::kDfs ? "dfs" : "bfs";
}

PlacementPolicy parse_policy(std::string_view name) {
  if (name == "xor") return PlacementPolicy::kXor;
  if (name == "offset") return PlacementPolicy::kOffset;
  throw ConfigError("unknown placement policy '" + std::string(name) + "' (expected xor|offset)");
}

EvictionStrategy parse_eviction(std::string_view name) {
  if (name == "dfs") return EvictionStrategy::kDfs;
  if (name == "bfs") return EvictionStrategy::kBfs;
  throw ConfigError("unknown eviction strategy '" + std::string(name) + "' (expected dfs|bfs)");
}

void FilterConfig::validate() const {
  require_lane_width(fingerprint_bits);
  if (bucket_slots < 1) {
    throw ConfigError("bucket_slots must be >= 1");
  }
  if ((std::uint64_t{bucket_slots} * fingerprint_bits) % 64 != 0) {
    throw ConfigError("bucket_slots * fingerprint_bits must be a multiple of 64 (got " +
                      std::to_string(bucket_slots) + " * " + std::to_string(fingerprint_bits) +
                      ")");
  }
  // Primary indices come from 32 hash bits.
  if (bucket_count < 1 || bucket_count > (std::uint64_t{1} << 32)) {
    throw ConfigError("bucket_count must be in [1, 2^32]");
  }
  if (policy == PlacementPolicy::kXor && !std::has_single_bit(bucket_count)) {
    throw ConfigError("xor placement requires a power-of-two bucket_count (got " +
                      std::to_string(bucket_count) + ")");
  }
  if (policy == PlacementPolicy::kOffset && bucket_count < 2) {
    throw ConfigError("offset placement requires bucket_count >= 2");
  }
  if (max_evictions < 1) {
    throw ConfigError("max_evictions must be >= 1");
  }
}

}  // namespace ckgf
