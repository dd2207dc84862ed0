#pragma once

// Lock-free cuckoo filter over packed fingerprint words.
//
// Storage is one contiguous array of 64-bit words; bucket i owns words
// [i * wpb, (i + 1) * wpb) with wpb = bucket_slots * fingerprint_bits / 64.
// Every mutation is a single-word compare-and-swap, so any number of threads
// may insert and remove concurrently.
//
// Phase contract: contains() reads words without synchronisation and must not
// overlap insert()/remove() on the same filter. Callers separate the phases
// with a happens-before edge (joining the mutating threads is enough). Build
// with CKGF_PHASE_CHECKS to assert this at runtime.

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "ckgf/config.hpp"
#include "ckgf/eviction_stats.hpp"
#include "ckgf/placement.hpp"
#include "ckgf/word_ops.hpp"

namespace ckgf {

enum class InsertStatus { kSuccess, kFilterFull };
enum class RemoveStatus { kSuccess, kNotFound };

struct InsertResult {
  InsertStatus status = InsertStatus::kSuccess;
  // Displacement rounds performed (0 for a direct insert).
  std::uint32_t evictions = 0;
  // On kFilterFull: the stored lane value that was displaced and could not be
  // re-placed. It may belong to a different item than the requested key.
  Tag lost_tag = 0;

  bool ok() const noexcept { return status == InsertStatus::kSuccess; }
};

class CuckooFilter {
 public:
  static constexpr std::uint32_t kFormatVersion = 1;
  static constexpr std::size_t kHeaderBytes = 44;

  explicit CuckooFilter(const FilterConfig& cfg);

  CuckooFilter(CuckooFilter&&) noexcept = default;
  CuckooFilter& operator=(CuckooFilter&&) noexcept = default;

  const FilterConfig& config() const noexcept { return cfg_; }
  const Placer& placer() const noexcept { return placer_; }

  // `worker` selects the occupancy shard and seeds the victim-selection PRNG.
  InsertResult insert(std::uint64_t key, unsigned worker = 0);
  bool contains(std::uint64_t key) const;
  RemoveStatus remove(std::uint64_t key, unsigned worker = 0);

  // Place a stored lane value into a free slot of `bucket` (no eviction).
  bool try_insert_bucket(std::uint64_t bucket, Tag stored);
  // Clear one lane of `bucket` equal to `stored`.
  bool try_remove_bucket(std::uint64_t bucket, Tag stored);
  bool bucket_contains(std::uint64_t bucket, Tag stored) const;

  // Batch operations split `keys` into contiguous chunks, one per thread.
  // Results are index-aligned with the input.
  std::vector<InsertResult> insert_batch(std::span<const std::uint64_t> keys,
                                         unsigned threads = 1);
  std::vector<std::uint8_t> contains_batch(std::span<const std::uint64_t> keys,
                                           unsigned threads = 1) const;
  std::vector<RemoveStatus> remove_batch(std::span<const std::uint64_t> keys,
                                         unsigned threads = 1);

  std::uint64_t occupancy() const noexcept;
  std::uint64_t capacity() const noexcept { return cfg_.total_slots(); }
  double load_factor() const noexcept;

  std::size_t word_count() const noexcept { return word_count_; }
  Word word(std::size_t index) const noexcept {
    return words_[index].load(std::memory_order_relaxed);
  }
  std::vector<Word> snapshot() const;
  // Number of nonzero lanes in the table; equals occupancy() when quiescent.
  std::uint64_t count_stored_tags() const;

  // Binary image: 44-byte little-endian header ("CKGF", version, f, b, m,
  // policy, occupancy, seed) followed by the word array, little-endian. The
  // eviction settings are not part of the image and are supplied on load.
  void save(std::ostream& out) const;
  std::vector<std::uint8_t> serialize() const;
  static CuckooFilter load(std::istream& in, EvictionStrategy eviction = EvictionStrategy::kDfs,
                           unsigned max_evictions = 500);
  static CuckooFilter deserialize(std::span<const std::uint8_t> bytes,
                                  EvictionStrategy eviction = EvictionStrategy::kDfs,
                                  unsigned max_evictions = 500);

 private:
  struct alignas(64) CounterShard {
    std::atomic<std::int64_t> value{0};
  };
  static constexpr unsigned kShards = 64;

  std::atomic<Word>* bucket_words(std::uint64_t bucket) const noexcept {
    return words_.get() + bucket * words_per_bucket_;
  }
  unsigned start_word(Tag stored) const noexcept {
    return (stored % cfg_.bucket_slots) / layout_.lanes_per_word;
  }
  bool find(std::uint64_t bucket, Tag stored) const noexcept;

  InsertResult insert_dfs(const Placement& p, std::uint64_t rng_seed);
  InsertResult insert_bfs(const Placement& p, std::uint64_t rng_seed);
  // Overwrite lane `slot` of `bucket` with `tag` and return what was there.
  Tag swap_slot(std::uint64_t bucket, unsigned slot, Tag tag);

  void add_occupancy(unsigned worker, std::int64_t delta) noexcept {
    shards_[worker % kShards].value.fetch_add(delta, std::memory_order_relaxed);
  }

  FilterConfig cfg_;
  Placer placer_;
  LaneLayout layout_;
  unsigned words_per_bucket_;
  std::size_t word_count_;
  std::unique_ptr<std::atomic<Word>[]> words_;
  std::unique_ptr<CounterShard[]> shards_;
#ifdef CKGF_PHASE_CHECKS
  std::unique_ptr<std::atomic<int>> active_mutators_ = std::make_unique<std::atomic<int>>(0);
#endif
};

// Insert keys[0, prefill) untimed and uninstrumented, then insert the rest and
// record one eviction-count sample per measured insert.
struct EvictionRun {
  EvictionStats stats;
  std::uint64_t failures = 0;
  double tail_seconds = 0.0;
  std::size_t tail_items = 0;
};

EvictionRun collect_eviction_stats(CuckooFilter& filter, std::span<const std::uint64_t> keys,
                                   double prefill_fraction, unsigned threads = 1);

}  // namespace ckgf
