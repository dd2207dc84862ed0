#include "ckgf/analytics.hpp"

#include <bit>
#include <cmath>

#include "ckgf/errors.hpp"

namespace ckgf {

double analytic_fpr(unsigned fingerprint_bits, unsigned bucket_slots, double alpha) {
  if (fingerprint_bits < 1 || fingerprint_bits > 63) {
    throw ConfigError("analytic_fpr: fingerprint_bits must be in [1, 63]");
  }
  if (bucket_slots < 1) throw ConfigError("analytic_fpr: bucket_slots must be >= 1");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("analytic_fpr: alpha must be in [0, 1]");

  const double per_slot = std::ldexp(1.0, -static_cast<int>(fingerprint_bits));
  const double probes = 2.0 * bucket_slots * alpha;
  return -std::expm1(probes * std::log1p(-per_slot));
}

unsigned effective_fingerprint_bits(const FilterConfig& cfg) noexcept {
  return cfg.policy == PlacementPolicy::kOffset ? cfg.fingerprint_bits - 1 : cfg.fingerprint_bits;
}

std::uint64_t size_for(std::uint64_t items, double alpha_target, unsigned bucket_slots,
                       PlacementPolicy policy) {
  if (items < 1) throw ConfigError("size_for: item count must be >= 1");
  if (!(alpha_target > 0.0 && alpha_target <= 1.0)) {
    throw ConfigError("size_for: alpha_target must be in (0, 1]");
  }
  if (bucket_slots < 1) throw ConfigError("size_for: bucket_slots must be >= 1");

  const double needed_slots = static_cast<double>(items) / alpha_target;
  auto m = static_cast<std::uint64_t>(std::ceil(needed_slots / bucket_slots));
  // Guard against ceil landing one short through rounding of the division.
  while (static_cast<double>(m) * bucket_slots * alpha_target < static_cast<double>(items)) ++m;
  while (m > 1 && static_cast<double>(m - 1) * bucket_slots * alpha_target >=
                      static_cast<double>(items)) {
    --m;
  }
  if (policy == PlacementPolicy::kXor) return std::bit_ceil(std::max<std::uint64_t>(m, 1));
  return std::max<std::uint64_t>(m, 2);
}

}  // namespace ckgf
