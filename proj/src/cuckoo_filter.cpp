#include "ckgf/cuckoo_filter.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <chrono>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <thread>

#include "ckgf/errors.hpp"

namespace ckgf {
namespace {

constexpr std::array<char, 4> kMagic = {'C', 'K', 'G', 'F'};

// Per-insert victim selection stream.
struct SplitMix64 {
  std::uint64_t state;

  std::uint64_t next() noexcept {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  unsigned below(unsigned n) noexcept { return static_cast<unsigned>(next() % n); }
};

std::uint64_t victim_seed(std::uint64_t seed, unsigned worker, std::uint64_t key_hash) noexcept {
  SplitMix64 mix{seed ^ (std::uint64_t{worker} * 0xD6E8FEB86659FD93ull)};
  return mix.next() ^ key_hash;
}

// Runs fn(worker, begin, end) over contiguous chunks of [0, n).
template <typename Fn>
void for_each_chunk(std::size_t n, unsigned threads, Fn&& fn) {
  threads = std::max(1u, threads);
  if (threads == 1 || n < threads) {
    fn(0u, std::size_t{0}, n);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  const std::size_t chunk = (n + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t begin = std::min(n, t * chunk);
    const std::size_t end = std::min(n, begin + chunk);
    pool.emplace_back([&fn, t, begin, end] { fn(t, begin, end); });
  }
}

void put_u32(std::uint8_t* out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out[i] = static_cast<std::uint8_t>(v >> (8 * i));
}
void put_u64(std::uint8_t* out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out[i] = static_cast<std::uint8_t>(v >> (8 * i));
}
std::uint32_t get_u32(const std::uint8_t* in) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t{in[i]} << (8 * i);
  return v;
}
std::uint64_t get_u64(const std::uint8_t* in) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t{in[i]} << (8 * i);
  return v;
}

#ifdef CKGF_PHASE_CHECKS
struct MutationScope {
  std::atomic<int>& count;
  explicit MutationScope(std::atomic<int>& c) : count(c) { count.fetch_add(1); }
  ~MutationScope() { count.fetch_sub(1); }
};
#define CKGF_MUTATION_SCOPE() MutationScope mutation_scope_(*active_mutators_)
#define CKGF_ASSERT_QUERY_PHASE() assert(active_mutators_->load() == 0)
#else
#define CKGF_MUTATION_SCOPE() (void)0
#define CKGF_ASSERT_QUERY_PHASE() (void)0
#endif

}  // namespace

CuckooFilter::CuckooFilter(const FilterConfig& cfg)
    : cfg_(cfg),
      placer_(cfg),
      layout_(cfg.fingerprint_bits),
      words_per_bucket_(cfg.words_per_bucket()),
      word_count_(static_cast<std::size_t>(cfg.bucket_count) * words_per_bucket_),
      words_(std::make_unique<std::atomic<Word>[]>(word_count_)),
      shards_(std::make_unique<CounterShard[]>(kShards)) {}

bool CuckooFilter::try_insert_bucket(std::uint64_t bucket, Tag stored) {
  assert(stored != 0);
  std::atomic<Word>* words = bucket_words(bucket);
  const unsigned start = start_word(stored);
  for (unsigned i = 0; i < words_per_bucket_; ++i) {
    unsigned idx = start + i;
    if (idx >= words_per_bucket_) idx -= words_per_bucket_;
    Word w = words[idx].load(std::memory_order_acquire);
    LaneMask mask = zero_mask(layout_, w);
    while (mask != 0) {
      const unsigned slot = *first_set_lane(layout_, mask);
      const Word desired = replace_tag(layout_, w, slot, stored);
      // On failure w is reloaded with the current value.
      if (words[idx].compare_exchange_weak(w, desired, std::memory_order_acq_rel,
                                           std::memory_order_acquire)) {
        return true;
      }
      mask = zero_mask(layout_, w);
    }
  }
  return false;
}

bool CuckooFilter::try_remove_bucket(std::uint64_t bucket, Tag stored) {
  std::atomic<Word>* words = bucket_words(bucket);
  const Word pattern = broadcast_tag(layout_, stored);
  const unsigned start = start_word(stored);
  for (unsigned i = 0; i < words_per_bucket_; ++i) {
    unsigned idx = start + i;
    if (idx >= words_per_bucket_) idx -= words_per_bucket_;
    Word w = words[idx].load(std::memory_order_acquire);
    LaneMask mask = match_mask(layout_, w, pattern);
    while (mask != 0) {
      const unsigned slot = *first_set_lane(layout_, mask);
      const Word desired = replace_tag(layout_, w, slot, 0);
      if (words[idx].compare_exchange_weak(w, desired, std::memory_order_acq_rel,
                                           std::memory_order_acquire)) {
        return true;
      }
      mask = match_mask(layout_, w, pattern);
    }
  }
  return false;
}

bool CuckooFilter::find(std::uint64_t bucket, Tag stored) const noexcept {
  const std::atomic<Word>* words = bucket_words(bucket);
  const Word pattern = broadcast_tag(layout_, stored);
  const unsigned start = start_word(stored);
  for (unsigned i = 0; i < words_per_bucket_; ++i) {
    unsigned idx = start + i;
    if (idx >= words_per_bucket_) idx -= words_per_bucket_;
    if (match_mask(layout_, words[idx].load(std::memory_order_relaxed), pattern) != 0) {
      return true;
    }
  }
  return false;
}

bool CuckooFilter::bucket_contains(std::uint64_t bucket, Tag stored) const {
  return find(bucket, stored);
}

bool CuckooFilter::contains(std::uint64_t key) const {
  CKGF_ASSERT_QUERY_PHASE();
  const Placement p = placer_.place(key);
  return find(p.i1, placer_.encode(p.fp, false)) || find(p.i2, placer_.encode(p.fp, true));
}

RemoveStatus CuckooFilter::remove(std::uint64_t key, unsigned worker) {
  CKGF_MUTATION_SCOPE();
  const Placement p = placer_.place(key);
  if (try_remove_bucket(p.i1, placer_.encode(p.fp, false)) ||
      try_remove_bucket(p.i2, placer_.encode(p.fp, true))) {
    add_occupancy(worker, -1);
    return RemoveStatus::kSuccess;
  }
  return RemoveStatus::kNotFound;
}

InsertResult CuckooFilter::insert(std::uint64_t key, unsigned worker) {
  CKGF_MUTATION_SCOPE();
  const std::uint64_t h = hash_key(key, cfg_.seed);
  const Placement p = placer_.place_hash(h);

  InsertResult result;
  if (try_insert_bucket(p.i1, placer_.encode(p.fp, false)) ||
      try_insert_bucket(p.i2, placer_.encode(p.fp, true))) {
    add_occupancy(worker, 1);
    return result;
  }

  const std::uint64_t rng_seed = victim_seed(cfg_.seed, worker, h);
  result = cfg_.eviction == EvictionStrategy::kDfs ? insert_dfs(p, rng_seed)
                                                   : insert_bfs(p, rng_seed);
  if (result.ok()) add_occupancy(worker, 1);
  return result;
}

Tag CuckooFilter::swap_slot(std::uint64_t bucket, unsigned slot, Tag tag) {
  std::atomic<Word>& cell = bucket_words(bucket)[slot / layout_.lanes_per_word];
  const unsigned lane = slot % layout_.lanes_per_word;
  Word w = cell.load(std::memory_order_acquire);
  Tag evicted = 0;
  do {
    evicted = extract_tag(layout_, w, lane);
  } while (!cell.compare_exchange_weak(w, replace_tag(layout_, w, lane, tag),
                                       std::memory_order_acq_rel, std::memory_order_acquire));
  return evicted;
}

InsertResult CuckooFilter::insert_dfs(const Placement& p, std::uint64_t rng_seed) {
  SplitMix64 rng{rng_seed};
  bool choice = (rng.next() & 1) != 0;
  std::uint64_t bucket = choice ? p.i2 : p.i1;
  Tag tag = placer_.encode(p.fp, choice);

  InsertResult result;
  for (unsigned n = 1; n <= cfg_.max_evictions; ++n) {
    const Tag evicted = swap_slot(bucket, rng.below(cfg_.bucket_slots), tag);
    result.evictions = n;
    // The slot was emptied concurrently; the carried tag is now stored.
    if (evicted == 0) return result;

    const Tag fp = placer_.payload(evicted);
    const AltIndex alt = placer_.alt_index(bucket, fp, placer_.choice(evicted));
    bucket = alt.index;
    tag = placer_.encode(fp, alt.choice);
    if (try_insert_bucket(bucket, tag)) return result;
  }
  result.status = InsertStatus::kFilterFull;
  result.lost_tag = tag;
  return result;
}

InsertResult CuckooFilter::insert_bfs(const Placement& p, std::uint64_t rng_seed) {
  struct Candidate {
    unsigned slot;
    Tag stored;
    std::uint64_t alt_bucket;
    Tag moved;  // stored value once relocated to alt_bucket
  };
  thread_local std::vector<Candidate> candidates;

  SplitMix64 rng{rng_seed};
  bool choice = (rng.next() & 1) != 0;
  std::uint64_t bucket = choice ? p.i2 : p.i1;
  Tag tag = placer_.encode(p.fp, choice);

  const unsigned slots = cfg_.bucket_slots;
  const unsigned wanted = std::max(1u, slots / 2);

  InsertResult result;
  unsigned rounds = 0;
  while (rounds < cfg_.max_evictions) {
    // Inspect up to half the bucket, starting at a random slot.
    candidates.clear();
    const unsigned start = rng.below(slots);
    bool saw_empty = false;
    for (unsigned k = 0; k < slots && candidates.size() < wanted; ++k) {
      unsigned slot = start + k;
      if (slot >= slots) slot -= slots;
      const Word w = bucket_words(bucket)[slot / layout_.lanes_per_word].load(
          std::memory_order_acquire);
      const Tag stored = extract_tag(layout_, w, slot % layout_.lanes_per_word);
      if (stored == 0) {
        saw_empty = true;
        continue;
      }
      const Tag fp = placer_.payload(stored);
      const AltIndex alt = placer_.alt_index(bucket, fp, placer_.choice(stored));
      candidates.push_back({slot, stored, alt.index, placer_.encode(fp, alt.choice)});
      __builtin_prefetch(bucket_words(alt.index));
    }
    // A concurrent remove freed space in this bucket.
    if (saw_empty && try_insert_bucket(bucket, tag)) {
      result.evictions = rounds;
      return result;
    }

    for (const Candidate& c : candidates) {
      if (!try_insert_bucket(c.alt_bucket, c.moved)) continue;

      // Step two: swap the carried tag into the candidate's old slot, but only
      // while that slot still holds the candidate.
      ++rounds;
      std::atomic<Word>& cell = bucket_words(bucket)[c.slot / layout_.lanes_per_word];
      const unsigned lane = c.slot % layout_.lanes_per_word;
      Word w = cell.load(std::memory_order_acquire);
      while (extract_tag(layout_, w, lane) == c.stored) {
        if (cell.compare_exchange_weak(w, replace_tag(layout_, w, lane, tag),
                                       std::memory_order_acq_rel, std::memory_order_acquire)) {
          result.evictions = rounds;
          return result;
        }
      }
      // Lost the race: undo the copy made in step one.
      try_remove_bucket(c.alt_bucket, c.moved);
      if (rounds >= cfg_.max_evictions) break;
    }
    if (rounds >= cfg_.max_evictions) break;

    ++rounds;
    if (candidates.empty()) {
      // Nothing to evict in this pass; the bucket drained concurrently.
      if (try_insert_bucket(bucket, tag)) {
        result.evictions = rounds;
        return result;
      }
      continue;
    }

    // Every inspected candidate's alternate bucket was full: evict the last one.
    const Tag evicted = swap_slot(bucket, candidates.back().slot, tag);
    result.evictions = rounds;
    if (evicted == 0) return result;

    const Tag fp = placer_.payload(evicted);
    const AltIndex alt = placer_.alt_index(bucket, fp, placer_.choice(evicted));
    bucket = alt.index;
    tag = placer_.encode(fp, alt.choice);
    if (try_insert_bucket(bucket, tag)) return result;
  }
  result.evictions = rounds;
  result.status = InsertStatus::kFilterFull;
  result.lost_tag = tag;
  return result;
}

std::vector<InsertResult> CuckooFilter::insert_batch(std::span<const std::uint64_t> keys,
                                                     unsigned threads) {
  std::vector<InsertResult> out(keys.size());
  for_each_chunk(keys.size(), threads, [&](unsigned worker, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) out[i] = insert(keys[i], worker);
  });
  return out;
}

std::vector<std::uint8_t> CuckooFilter::contains_batch(std::span<const std::uint64_t> keys,
                                                       unsigned threads) const {
  std::vector<std::uint8_t> out(keys.size());
  for_each_chunk(keys.size(), threads, [&](unsigned, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) out[i] = contains(keys[i]) ? 1 : 0;
  });
  return out;
}

std::vector<RemoveStatus> CuckooFilter::remove_batch(std::span<const std::uint64_t> keys,
                                                     unsigned threads) {
  std::vector<RemoveStatus> out(keys.size());
  for_each_chunk(keys.size(), threads, [&](unsigned worker, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) out[i] = remove(keys[i], worker);
  });
  return out;
}

std::uint64_t CuckooFilter::occupancy() const noexcept {
  std::int64_t total = 0;
  for (unsigned s = 0; s < kShards; ++s) total += shards_[s].value.load(std::memory_order_relaxed);
  return static_cast<std::uint64_t>(total);
}

double CuckooFilter::load_factor() const noexcept {
  return static_cast<double>(occupancy()) / static_cast<double>(capacity());
}

std::vector<Word> CuckooFilter::snapshot() const {
  std::vector<Word> out(word_count_);
  for (std::size_t i = 0; i < word_count_; ++i) out[i] = word(i);
  return out;
}

std::uint64_t CuckooFilter::count_stored_tags() const {
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < word_count_; ++i) {
    const Word w = word(i);
    total += layout_.lanes_per_word -
             static_cast<unsigned>(std::popcount(zero_mask(layout_, w)));
  }
  return total;
}

std::vector<std::uint8_t> CuckooFilter::serialize() const {
  std::vector<std::uint8_t> out(kHeaderBytes + word_count_ * 8);
  std::uint8_t* p = out.data();
  std::memcpy(p, kMagic.data(), kMagic.size());
  put_u32(p + 4, kFormatVersion);
  put_u32(p + 8, cfg_.fingerprint_bits);
  put_u32(p + 12, cfg_.bucket_slots);
  put_u64(p + 16, cfg_.bucket_count);
  put_u32(p + 24, static_cast<std::uint32_t>(cfg_.policy));
  put_u64(p + 28, occupancy());
  put_u64(p + 36, cfg_.seed);
  p += kHeaderBytes;
  for (std::size_t i = 0; i < word_count_; ++i, p += 8) put_u64(p, word(i));
  return out;
}

void CuckooFilter::save(std::ostream& out) const {
  const auto bytes = serialize();
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed to write filter image");
}

CuckooFilter CuckooFilter::deserialize(std::span<const std::uint8_t> bytes,
                                       EvictionStrategy eviction, unsigned max_evictions) {
  if (bytes.size() < kHeaderBytes) throw FormatError("filter image truncated: header incomplete");
  const std::uint8_t* p = bytes.data();
  if (std::memcmp(p, kMagic.data(), kMagic.size()) != 0) {
    throw FormatError("filter image has bad magic (expected CKGF)");
  }
  const std::uint32_t version = get_u32(p + 4);
  if (version != kFormatVersion) {
    throw FormatError("unsupported filter image version " + std::to_string(version));
  }
  const std::uint32_t policy = get_u32(p + 24);
  if (policy > 1) throw FormatError("unknown placement policy id " + std::to_string(policy));

  FilterConfig cfg;
  cfg.fingerprint_bits = get_u32(p + 8);
  cfg.bucket_slots = get_u32(p + 12);
  cfg.bucket_count = get_u64(p + 16);
  cfg.policy = static_cast<PlacementPolicy>(policy);
  cfg.seed = get_u64(p + 36);
  cfg.eviction = eviction;
  cfg.max_evictions = max_evictions;
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw FormatError(std::string("filter image has invalid configuration: ") + e.what());
  }
  const std::uint64_t occupancy = get_u64(p + 28);

  CuckooFilter filter(cfg);
  if (bytes.size() != kHeaderBytes + filter.word_count_ * 8) {
    throw FormatError("filter image size mismatch: expected " +
                      std::to_string(kHeaderBytes + filter.word_count_ * 8) + " bytes, got " +
                      std::to_string(bytes.size()));
  }
  p += kHeaderBytes;
  for (std::size_t i = 0; i < filter.word_count_; ++i, p += 8) {
    filter.words_[i].store(get_u64(p), std::memory_order_relaxed);
  }
  filter.shards_[0].value.store(static_cast<std::int64_t>(occupancy), std::memory_order_relaxed);
  return filter;
}

CuckooFilter CuckooFilter::load(std::istream& in, EvictionStrategy eviction,
                                unsigned max_evictions) {
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return deserialize(bytes, eviction, max_evictions);
}

EvictionRun collect_eviction_stats(CuckooFilter& filter, std::span<const std::uint64_t> keys,
                                   double prefill_fraction, unsigned threads) {
  if (!(prefill_fraction >= 0.0 && prefill_fraction <= 1.0)) {
    throw ConfigError("prefill_fraction must be in [0, 1]");
  }
  const auto prefill =
      static_cast<std::size_t>(prefill_fraction * static_cast<double>(keys.size()));
  filter.insert_batch(keys.first(prefill), threads);

  const auto tail = keys.subspan(prefill);
  const auto t0 = std::chrono::steady_clock::now();
  const auto results = filter.insert_batch(tail, threads);
  const auto t1 = std::chrono::steady_clock::now();

  EvictionRun run;
  run.tail_seconds = std::chrono::duration<double>(t1 - t0).count();
  run.tail_items = tail.size();
  run.stats.samples.reserve(results.size());
  for (const auto& r : results) {
    run.stats.samples.push_back(r.evictions);
    if (!r.ok()) ++run.failures;
  }
  return run;
}

}  // namespace ckgf
