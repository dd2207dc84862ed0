#pragma once

#include <cstdint>
#include <vector>

namespace ckgf {

// Per-insert eviction chain lengths for a measured insert phase.
struct EvictionStats {
  std::vector<std::uint32_t> samples;

  // Nearest-rank percentile, p in [0, 100]. Returns 0 for an empty sample set.
  std::uint32_t percentile(double p) const;

  std::uint32_t max() const;
  double mean() const;
};

}  // namespace ckgf
