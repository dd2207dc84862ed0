// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "ckgf/analytics.hpp"
#include "ckgf/bench.hpp"
#include "ckgf/cuckoo_filter.hpp"
#include "ckgf/kmer.hpp"
#include "ckgf/word_ops.hpp"
#include "oracles.hpp"

namespace {

using namespace ckgf;
using ckgf::testing::SetModel;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (ok) return;
    pass = false;
    if (detail.size() < 400) detail += (detail.empty() ? "" : "; ") + what;
  }
};

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

FilterConfig config(unsigned f, unsigned b, std::uint64_t m, PlacementPolicy policy,
                    EvictionStrategy eviction, std::uint64_t seed = 0) {
  FilterConfig cfg;
  cfg.fingerprint_bits = f;
  cfg.bucket_slots = b;
  cfg.bucket_count = m;
  cfg.policy = policy;
  cfg.eviction = eviction;
  cfg.seed = seed;
  return cfg;
}

// Fill m*b = 2^20 slots to 0.95 with positive keys, probe 10^7 negatives.
double measured_fpr(PlacementPolicy policy, std::uint64_t* failures) {
  const FilterConfig cfg = config(16, 16, 1u << 16, policy, EvictionStrategy::kDfs, 42);
  CuckooFilter filter(cfg);
  *failures = 0;
  for (auto k : positive_keys(cfg.seed, fill_count(cfg, 0.95))) *failures += !filter.insert(k).ok();
  std::uint64_t hits = 0;
  const auto probes = negative_keys(cfg.seed, 10'000'000);
  for (auto k : probes) hits += filter.contains(k);
  return static_cast<double>(hits) / static_cast<double>(probes.size());
}

struct FprPair {
  double xor_fpr = 0, offset_fpr = 0;
  std::uint64_t xor_failures = 0, offset_failures = 0;
  double xor_seconds = 0;
};

FprPair fpr_pair() {
  FprPair out;
  const auto t0 = std::chrono::steady_clock::now();
  out.xor_fpr = measured_fpr(PlacementPolicy::kXor, &out.xor_failures);
  out.xor_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.offset_fpr = measured_fpr(PlacementPolicy::kOffset, &out.offset_failures);
  return out;
}

Outcome criterion1(const FprPair& fpr) {
  Outcome o;
  const double target = 4.64e-4;
  o.require(fpr.xor_failures == 0, fmt("%llu insert failures", (unsigned long long)fpr.xor_failures));
  o.require(std::fabs(fpr.xor_fpr / target - 1.0) <= 0.25,
            fmt("FPR %.4e outside +-25%% of %.3e", fpr.xor_fpr, target));
  o.require(fpr.xor_seconds < 60.0, fmt("took %.1f s", fpr.xor_seconds));
  if (o.pass) {
    o.detail = fmt("empirical FPR %.4e vs 4.64e-4 (%.1f s)", fpr.xor_fpr, fpr.xor_seconds);
  }
  return o;
}

Outcome criterion2() {
  Outcome o;
  const double v = analytic_fpr(16, 16, 0.95);
  o.require(std::fabs(v - 4.6377e-4) <= 1e-7, fmt("analytic_fpr(16,16,0.95) = %.6e", v));
  std::mt19937_64 rng(2);
  int violations = 0;
  for (int i = 0; i < 1000; ++i) {
    const unsigned f = 1 + static_cast<unsigned>(rng() % 40);
    const unsigned b = 1 + static_cast<unsigned>(rng() % 64);
    const double a = std::uniform_real_distribution<double>(0.0, 0.99)(rng);
    const double base = analytic_fpr(f, b, a);
    const long double oracle =
        1.0L - std::pow(1.0L - std::ldexp(1.0L, -static_cast<int>(f)), 2.0L * b * a);
    violations += !(base >= 0.0 && base <= 1.0);
    violations += std::fabs(base - static_cast<double>(oracle)) > 1e-12 + 1e-9 * base;
    violations += analytic_fpr(f + 1, b, a) > base;
    violations += analytic_fpr(f, b + 1, a) < base;
    violations += analytic_fpr(f, b, a + 0.01) < base;
  }
  o.require(violations == 0, fmt("%d monotonicity violations", violations));
  if (o.pass) o.detail = fmt("analytic %.6e; 1000 triples monotone", v);
  return o;
}

// 10^6 random insert/delete/query operations against a multiset model.
Outcome set_model_run(PlacementPolicy policy, EvictionStrategy eviction, std::uint64_t m) {
  Outcome o;
  const FilterConfig cfg = config(16, 16, m, policy, eviction, 3);
  CuckooFilter filter(cfg);
  SetModel model;
  std::vector<std::uint64_t> live;
  std::mt19937_64 rng(1000 + static_cast<unsigned>(policy) * 2 + static_cast<unsigned>(eviction));
  const auto limit = static_cast<std::uint64_t>(0.9 * static_cast<double>(filter.capacity()));
  std::uint64_t false_negatives = 0, failures = 0, drift = 0, bad_deletes = 0;

  for (int op = 1; op <= 1'000'000; ++op) {
    const unsigned kind = static_cast<unsigned>(rng() % 3);
    if (kind == 0 && live.size() < limit) {
      // Reinsert an existing key now and then to exercise duplicates.
      const std::uint64_t key = (!live.empty() && rng() % 16 == 0) ? live[rng() % live.size()] : rng();
      if (filter.insert(key).ok()) {
        model.insert(key);
        live.push_back(key);
      } else {
        ++failures;
      }
    } else if (kind == 1 && !live.empty()) {
      const std::size_t i = rng() % live.size();
      const std::uint64_t key = live[i];
      live[i] = live.back();
      live.pop_back();
      bad_deletes += filter.remove(key) != RemoveStatus::kSuccess;
      model.erase(key);
    } else if (!live.empty()) {
      false_negatives += !filter.contains(live[rng() % live.size()]);
    }
    if (op % 100'000 == 0) {
      drift += filter.occupancy() != model.size();
      drift += filter.count_stored_tags() != model.size();
      for (auto key : live) false_negatives += !filter.contains(key);
    }
  }
  const std::uint64_t unmatched = ckgf::testing::unmatched_keys(filter, model);
  o.require(false_negatives == 0, fmt("%llu false negatives", (unsigned long long)false_negatives));
  o.require(drift == 0, fmt("%llu occupancy drift checks failed", (unsigned long long)drift));
  o.require(failures == 0, fmt("%llu insert failures", (unsigned long long)failures));
  o.require(bad_deletes == 0, fmt("%llu deletes of live keys failed", (unsigned long long)bad_deletes));
  o.require(unmatched == 0, fmt("%llu keys unreachable", (unsigned long long)unmatched));
  return o;
}

struct ModelResults {
  Outcome xor_dfs, xor_bfs, offset_dfs, offset_bfs;
};

ModelResults run_models() {
  return {set_model_run(PlacementPolicy::kXor, EvictionStrategy::kDfs, 1u << 10),
          set_model_run(PlacementPolicy::kXor, EvictionStrategy::kBfs, 1u << 10),
          set_model_run(PlacementPolicy::kOffset, EvictionStrategy::kDfs, 1u << 10),
          set_model_run(PlacementPolicy::kOffset, EvictionStrategy::kBfs, 1u << 10)};
}

Outcome merge(std::initializer_list<std::pair<const char*, const Outcome*>> parts) {
  Outcome o;
  for (const auto& [name, part] : parts) o.require(part->pass, std::string(name) + ": " + part->detail);
  return o;
}

Outcome criterion3(const ModelResults& r) {
  Outcome o = merge({{"xor/dfs", &r.xor_dfs}, {"xor/bfs", &r.xor_bfs},
                     {"offset/dfs", &r.offset_dfs}, {"offset/bfs", &r.offset_bfs}});
  if (o.pass) o.detail = "10^6 ops x 4 combos: no false negatives, no drift";
  return o;
}

Outcome criterion4() {
  Outcome o;
  std::uint64_t total_failures = 0;
  int runs = 0;
  for (std::uint64_t m : {1ull << 12, 1ull << 16}) {
    for (auto eviction : {EvictionStrategy::kDfs, EvictionStrategy::kBfs}) {
      for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const FilterConfig cfg = config(16, 16, m, PlacementPolicy::kXor, eviction, seed);
        CuckooFilter filter(cfg);
        std::uint64_t failures = 0;
        for (auto k : positive_keys(seed, fill_count(cfg, 0.95))) failures += !filter.insert(k).ok();
        total_failures += failures;
        ++runs;
        o.require(failures == 0, fmt("m=%llu %s seed %llu: %llu failures", (unsigned long long)m,
                                     std::string(to_string(eviction)).c_str(),
                                     (unsigned long long)seed, (unsigned long long)failures));
      }
    }
  }
  if (o.pass) o.detail = fmt("%d runs (20 seeds x 2 sizes x dfs/bfs), 0 failures", runs);
  return o;
}

Outcome criterion5() {
  Outcome o;
  EvictionStudySpec spec;
  spec.base.filter = config(16, 16, 1u << 16, PlacementPolicy::kXor, EvictionStrategy::kDfs, 5);
  spec.base.repetitions = 3;
  spec.base.warmup = 0;
  spec.load_factors = {0.95, 0.98, 1.00};
  const auto reports = run_eviction_study(spec);
  std::string summary;
  for (std::size_t i = 0; i + 1 < reports.size(); i += 2) {
    const auto& dfs = reports[i];
    const auto& bfs = reports[i + 1];
    summary += fmt("a=%.2f dfs/bfs p99 %u/%u ", dfs.load_factor, dfs.p99, bfs.p99);
    o.require(bfs.p99 <= dfs.p99, fmt("a=%.2f: BFS p99 %u > DFS p99 %u", dfs.load_factor, bfs.p99, dfs.p99));
    if (dfs.load_factor == 1.0) {
      o.require(dfs.p99 >= 2 * bfs.p99,
                fmt("a=1.00: DFS p99 %u < 2 x BFS p99 %u", dfs.p99, bfs.p99));
    }
  }
  if (o.pass) o.detail = summary;
  return o;
}

Outcome criterion6() {
  Outcome o;
  const unsigned cores = std::max(1u, std::thread::hardware_concurrency());
  EvictionStudySpec spec;
  spec.base.filter = config(16, 16, 1u << 20, PlacementPolicy::kXor, EvictionStrategy::kDfs, 6);
  spec.base.threads = cores;
  spec.base.repetitions = 3;
  spec.base.warmup = 0;
  spec.load_factors = {0.95, 0.98, 1.00};
  const auto reports = run_eviction_study(spec);
  std::string summary = fmt("%u core(s), 2^24 slots; ", cores);
  for (std::size_t i = 0; i + 1 < reports.size(); i += 2) {
    const auto& dfs = reports[i];
    const auto& bfs = reports[i + 1];
    summary += fmt("a=%.2f dfs/bfs %.2f/%.2f Mops/s ", dfs.load_factor, dfs.throughput / 1e6,
                   bfs.throughput / 1e6);
    o.require(bfs.throughput >= dfs.throughput,
              fmt("a=%.2f: BFS %.3g < DFS %.3g ops/s", dfs.load_factor, bfs.throughput, dfs.throughput));
  }
  o.detail = o.pass ? summary : summary + "| " + o.detail;
  return o;
}

Outcome criterion7(const ModelResults& models, const FprPair& fpr) {
  Outcome o = merge({{"offset/dfs", &models.offset_dfs}, {"offset/bfs", &models.offset_bfs}});

  const FilterConfig cfg = config(16, 16, 3u << 10, PlacementPolicy::kOffset, EvictionStrategy::kDfs, 7);
  CuckooFilter filter(cfg);
  const auto keys = positive_keys(cfg.seed, fill_count(cfg, 0.95));
  std::uint64_t failures = 0, missing = 0;
  for (auto k : keys) failures += !filter.insert(k).ok();
  for (auto k : keys) missing += !filter.contains(k);
  o.require(failures == 0 && missing == 0,
            fmt("m=3*2^10: %llu failures, %llu missing", (unsigned long long)failures,
                (unsigned long long)missing));

  const double ratio = fpr.offset_fpr / fpr.xor_fpr;
  o.require(fpr.offset_failures == 0, "offset FPR fill had insert failures");
  o.require(std::fabs(ratio - 2.0) <= 0.6,
            fmt("offset/xor FPR ratio %.3f (%.4e / %.4e) outside 2 +- 30%%", ratio, fpr.offset_fpr,
                fpr.xor_fpr));
  if (o.pass) o.detail = fmt("m=3*2^10 ok; FPR ratio %.3f", ratio);
  return o;
}

Outcome criterion8() {
  Outcome o;
  constexpr unsigned kWorkers = 8;
  constexpr std::size_t kKeys = 1'000'000;
  for (int trial = 0; trial < 50 && o.pass; ++trial) {
    const auto eviction = trial % 2 ? EvictionStrategy::kBfs : EvictionStrategy::kDfs;
    const auto policy = (trial / 2) % 2 ? PlacementPolicy::kOffset : PlacementPolicy::kXor;
    const FilterConfig cfg = config(16, 16, 1u << 16, policy, eviction, 100 + trial);
    const auto keys = positive_keys(cfg.seed, kKeys);

    // Insert-only phase, then query phase.
    {
      CuckooFilter filter(cfg);
      const auto results = filter.insert_batch(keys, kWorkers);
      const auto failures = std::count_if(results.begin(), results.end(), [](auto& r) { return !r.ok(); });
      const auto found = filter.contains_batch(keys, kWorkers);
      const auto missing = std::count(found.begin(), found.end(), std::uint8_t{0});
      o.require(failures == 0, fmt("trial %d: %ld insert failures", trial, (long)failures));
      o.require(missing == 0, fmt("trial %d: %ld keys missing", trial, (long)missing));
      o.require(filter.occupancy() == kKeys && filter.count_stored_tags() == kKeys,
                fmt("trial %d: occupancy %llu, stored %llu", trial,
                    (unsigned long long)filter.occupancy(),
                    (unsigned long long)filter.count_stored_tags()));
    }

    // Mixed phase: half prefilled, then concurrent insert of the other half
    // and delete of the prefilled half.
    {
      CuckooFilter filter(cfg);
      const std::span<const std::uint64_t> doomed(keys.data(), kKeys / 2);
      const std::span<const std::uint64_t> survivors(keys.data() + kKeys / 2, kKeys / 2);
      filter.insert_batch(doomed, kWorkers);
      std::atomic<std::uint64_t> insert_failures{0}, delete_failures{0};
      {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < kWorkers; ++w) {
          pool.emplace_back([&, w] {
            for (std::size_t i = w; i < survivors.size(); i += kWorkers) {
              if (!filter.insert(survivors[i], w).ok()) ++insert_failures;
              // A tag carried by a concurrent eviction chain is briefly absent.
              bool removed = false;
              for (int attempt = 0; attempt < 1000 && !removed; ++attempt) {
                removed = filter.remove(doomed[i], w) == RemoveStatus::kSuccess;
                if (!removed) std::this_thread::yield();
              }
              if (!removed) ++delete_failures;
            }
          });
        }
      }
      const auto found = filter.contains_batch(survivors, kWorkers);
      const auto missing = std::count(found.begin(), found.end(), std::uint8_t{0});
      o.require(insert_failures == 0 && delete_failures == 0,
                fmt("mixed trial %d: %llu insert / %llu delete failures", trial,
                    (unsigned long long)insert_failures.load(),
                    (unsigned long long)delete_failures.load()));
      o.require(missing == 0, fmt("mixed trial %d: %ld survivors missing", trial, (long)missing));
      o.require(filter.occupancy() == kKeys / 2 && filter.count_stored_tags() == kKeys / 2,
                fmt("mixed trial %d: occupancy %llu, stored %llu", trial,
                    (unsigned long long)filter.occupancy(),
                    (unsigned long long)filter.count_stored_tags()));
    }
  }
  if (o.pass) o.detail = "50 trials x (insert+query, mixed insert/delete), 8 workers, 10^6 keys";
  return o;
}

Outcome criterion9() {
  Outcome o;
  for (auto eviction : {EvictionStrategy::kDfs, EvictionStrategy::kBfs}) {
    const FilterConfig cfg = config(16, 16, 1u << 12, PlacementPolicy::kXor, eviction, 9);
    const auto keys = positive_keys(cfg.seed, fill_count(cfg, 0.98));
    std::vector<std::uint8_t> first;
    for (int run = 0; run < 5; ++run) {
      CuckooFilter filter(cfg);
      for (auto k : keys) filter.insert(k);
      const auto image = filter.serialize();
      if (run == 0) first = image;
      o.require(image == first, fmt("%s run %d differs", std::string(to_string(eviction)).c_str(), run));
    }
  }
  if (o.pass) o.detail = "5 runs identical for dfs and bfs at a=0.98";
  return o;
}

Outcome criterion10() {
  Outcome o;
  namespace t = ckgf::testing;
  const LaneLayout layout(8);
  std::mt19937_64 rng(10);
  std::uint64_t mismatches = 0;
  for (int i = 0; i < 100'000; ++i) {
    const std::uint64_t w = (i % 2) ? rng() : t::clustered_word(rng, 8);
    const LaneMask zeros = zero_mask(layout, w);
    mismatches += zeros != t::zero_mask_oracle(w, 8);
    mismatches += first_set_lane(layout, zeros) != t::first_set_lane_oracle(zeros, 8);
    for (unsigned slot = 0; slot < 8; ++slot) {
      const Tag tag = static_cast<Tag>(t::lane_value(w, slot, 8));
      mismatches += extract_tag(layout, w, slot) != tag;
      mismatches += match_mask(layout, w, broadcast_tag(layout, tag)) != t::match_oracle(w, tag, 8);
      const Tag fresh = static_cast<Tag>(rng() & 0xFF);
      const Word written = replace_tag(layout, w, slot, fresh);
      for (unsigned lane = 0; lane < 8; ++lane) {
        const std::uint64_t want = lane == slot ? fresh : t::lane_value(w, lane, 8);
        mismatches += t::lane_value(written, lane, 8) != want;
      }
    }
  }
  o.require(mismatches == 0, fmt("%llu mismatches", (unsigned long long)mismatches));
  if (o.pass) o.detail = "10^5 words x 8 slots match scalar oracle";
  return o;
}

Outcome criterion11() {
  Outcome o;
  const std::string path = std::string(CKGF_TEST_DATA_DIR) + "/sample.fasta";
  const auto packed = pack_kmer("ACGT");
  o.require(packed && packed->value == 27, "ACGT does not pack to 27");

  for (unsigned k : {4u, 21u, 31u}) {
    const auto got = read_kmers_file(path, k);
    const auto expected = ckgf::testing::naive_kmers(path, k);
    bool same = got.size() == expected.size();
    for (std::size_t i = 0; same && i < got.size(); ++i) {
      same = unpack_kmer({got[i], k}) == expected[i];
    }
    o.require(same, fmt("k=%u: %zu streamed vs %zu naive", k, got.size(), expected.size()));
  }

  const auto kmers = read_kmers_file(path, 31);
  FilterConfig cfg;
  cfg.bucket_count = size_for(kmers.size(), 0.95, cfg.bucket_slots, cfg.policy);
  CuckooFilter filter(cfg);
  std::uint64_t failures = 0, missing = 0;
  for (auto k : kmers) failures += !filter.insert(k).ok();
  for (auto k : kmers) missing += !filter.contains(k);
  o.require(failures == 0 && missing == 0,
            fmt("31-mers: %llu failures, %llu missing", (unsigned long long)failures,
                (unsigned long long)missing));
  if (o.pass) o.detail = fmt("%zu 31-mers, counts match naive parse, 100%% positive", kmers.size());
  return o;
}

}  // namespace

int main() {
  int failed = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& check) {
    const auto t0 = std::chrono::steady_clock::now();
    const Outcome o = check();
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %2d %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), s);
    std::fflush(stdout);
    failed += !o.pass;
  };

  const FprPair fpr = fpr_pair();
  const ModelResults models = run_models();

  report(1, "fpr-reproduction", [&] { return criterion1(fpr); });
  report(2, "analytic-model", criterion2);
  report(3, "no-false-negatives", [&] { return criterion3(models); });
  report(4, "fill-reliability", criterion4);
  report(5, "eviction-tail-direction", criterion5);
  report(6, "bfs-throughput-direction", criterion6);
  report(7, "offset-policy", [&] { return criterion7(models, fpr); });
  report(8, "concurrency", criterion8);
  report(9, "determinism", criterion9);
  report(10, "swar-oracle", criterion10);
  report(11, "kmer-pipeline", criterion11);

  std::printf("%d of 11 criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
