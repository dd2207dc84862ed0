#include "ckgf/eviction_stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ckgf/errors.hpp"

namespace ckgf {

std::uint32_t EvictionStats::percentile(double p) const {
  if (!(p >= 0.0 && p <= 100.0)) {
    throw ConfigError("percentile must be in [0, 100]");
  }
  if (samples.empty()) return 0;
  std::vector<std::uint32_t> sorted = samples;
  const auto n = sorted.size();
  auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(n)));
  rank = std::clamp<std::size_t>(rank, 1, n);
  std::nth_element(sorted.begin(), sorted.begin() + (rank - 1), sorted.end());
  return sorted[rank - 1];
}

std::uint32_t EvictionStats::max() const {
  return samples.empty() ? 0 : *std::max_element(samples.begin(), samples.end());
}

double EvictionStats::mean() const {
  if (samples.empty()) return 0.0;
  const double total = std::accumulate(samples.begin(), samples.end(), 0.0);
  return total / static_cast<double>(samples.size());
}

}  // namespace ckgf
