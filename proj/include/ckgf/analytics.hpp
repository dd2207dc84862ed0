#pragma once

#include <cstdint>

#include "ckgf/config.hpp"

namespace ckgf {

// Expected false-positive rate of a cuckoo filter with f-bit fingerprints,
// b-slot buckets and load factor alpha: 1 - (1 - 2^-f)^(2 b alpha).
// Evaluated as -expm1(2 b alpha * log1p(-2^-f)) to stay accurate for large f.
double analytic_fpr(unsigned fingerprint_bits, unsigned bucket_slots, double alpha);

// Fingerprint bits that discriminate keys: f for XOR, f - 1 for OFFSET (one
// bit of each lane is the choice bit).
unsigned effective_fingerprint_bits(const FilterConfig& cfg) noexcept;

// Smallest bucket count m with m * b >= n / alpha_target; rounded up to a
// power of two for XOR placement. OFFSET results are at least 2.
std::uint64_t size_for(std::uint64_t items, double alpha_target, unsigned bucket_slots,
                       PlacementPolicy policy);

}  // namespace ckgf
