#include "ckgf/bench.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>

#include "ckgf/analytics.hpp"
#include "ckgf/cuckoo_filter.hpp"
#include "ckgf/errors.hpp"
#include "ckgf/kmer.hpp"

namespace ckgf {
namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// murmur3 finaliser; a bijection on 32-bit values.
std::uint32_t fmix32(std::uint32_t h) noexcept {
  h ^= h >> 16;
  h *= 0x85EBCA6Bu;
  h ^= h >> 13;
  h *= 0xC2B2AE35u;
  h ^= h >> 16;
  return h;
}

template <typename Fn>
double time_seconds(Fn&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count();
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

// Median throughput and median wall time over the timed repetitions.
struct Timings {
  std::vector<double> seconds;

  void record(double s) { seconds.push_back(s); }
  double wall() const { return median(seconds); }
  double throughput(std::uint64_t items) const {
    std::vector<double> rates;
    for (double s : seconds) {
      if (s > 0.0) rates.push_back(static_cast<double>(items) / s);
    }
    return items == 0 ? 0.0 : median(rates);
  }
};

void validate_run(const RunSpec& spec) {
  spec.filter.validate();
  if (!(spec.load_factor >= 0.0 && spec.load_factor <= 1.0)) {
    throw ConfigError("load factor must be in [0, 1]");
  }
  if (spec.threads < 1) throw ConfigError("threads must be >= 1");
  if (spec.repetitions < 1) throw ConfigError("repetitions must be >= 1");
}

BenchReport base_report(const std::string& experiment, const RunSpec& spec,
                        const FilterConfig& cfg) {
  BenchReport r;
  r.experiment = experiment;
  r.op = spec.op;
  r.config = cfg;
  r.load_factor = spec.load_factor;
  r.threads = spec.threads;
  r.memory_bytes = cfg.bucket_count * cfg.words_per_bucket() * 8;
  r.analytic_fpr = analytic_fpr(effective_fingerprint_bits(cfg), cfg.bucket_slots,
                                spec.load_factor);
  r.repetitions = spec.repetitions;
  r.warmup = spec.warmup;
  return r;
}

void set_percentiles(BenchReport& r, const EvictionStats& stats) {
  r.p90 = stats.percentile(90);
  r.p95 = stats.percentile(95);
  r.p99 = stats.percentile(99);
}

std::uint64_t count_failures(const std::vector<InsertResult>& results) {
  return static_cast<std::uint64_t>(
      std::count_if(results.begin(), results.end(), [](const auto& r) { return !r.ok(); }));
}

std::uint64_t count_true(const std::vector<std::uint8_t>& flags) {
  return static_cast<std::uint64_t>(std::count(flags.begin(), flags.end(), std::uint8_t{1}));
}

double rate(std::uint64_t hits, std::uint64_t total) {
  return total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(total);
}

}  // namespace

std::vector<std::uint64_t> positive_keys(std::uint64_t seed, std::uint64_t count) {
  if (count > (std::uint64_t{1} << 32)) {
    throw ConfigError("at most 2^32 distinct positive keys are available");
  }
  const auto offset = static_cast<std::uint32_t>(splitmix64(seed));
  std::vector<std::uint64_t> keys(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    keys[i] = fmix32(static_cast<std::uint32_t>(i) + offset);
  }
  return keys;
}

std::vector<std::uint64_t> negative_keys(std::uint64_t seed, std::uint64_t count) {
  constexpr std::uint64_t kLow = std::uint64_t{1} << 32;
  const std::uint64_t base = splitmix64(seed ^ 0x6A09E667F3BCC909ull);
  std::vector<std::uint64_t> keys(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    std::uint64_t k = splitmix64(base + i);
    if (k < kLow) k += kLow;
    keys[i] = k;
  }
  return keys;
}

std::uint64_t fill_count(const FilterConfig& cfg, double load_factor) {
  return static_cast<std::uint64_t>(
      std::floor(load_factor * static_cast<double>(cfg.total_slots())));
}

BenchReport run_throughput(const RunSpec& spec) {
  validate_run(spec);
  const FilterConfig& cfg = spec.filter;
  const std::uint64_t n = fill_count(cfg, spec.load_factor);
  const auto keys = positive_keys(cfg.seed, n);

  BenchReport report = base_report("throughput", spec, cfg);
  report.items = n;
  Timings timings;
  EvictionStats evictions;
  const unsigned total = spec.warmup + spec.repetitions;

  switch (spec.op) {
    case OpKind::kInsert:
      for (unsigned rep = 0; rep < total; ++rep) {
        CuckooFilter filter(cfg);
        std::vector<InsertResult> results;
        const double s = time_seconds([&] { results = filter.insert_batch(keys, spec.threads); });
        if (rep < spec.warmup) continue;
        timings.record(s);
        report.insert_failures = std::max(report.insert_failures, count_failures(results));
        for (const auto& r : results) evictions.samples.push_back(r.evictions);
      }
      set_percentiles(report, evictions);
      break;

    case OpKind::kQueryPositive:
    case OpKind::kQueryNegative: {
      CuckooFilter filter(cfg);
      report.insert_failures = count_failures(filter.insert_batch(keys, spec.threads));
      const bool negative = spec.op == OpKind::kQueryNegative;
      const auto probes = negative ? negative_keys(cfg.seed, n) : keys;
      std::uint64_t hits = 0;
      for (unsigned rep = 0; rep < total; ++rep) {
        std::vector<std::uint8_t> found;
        const double s = time_seconds([&] { found = filter.contains_batch(probes, spec.threads); });
        if (rep < spec.warmup) continue;
        timings.record(s);
        hits = count_true(found);
      }
      if (negative) report.empirical_fpr = rate(hits, probes.size());
      break;
    }

    case OpKind::kDelete:
      for (unsigned rep = 0; rep < total; ++rep) {
        CuckooFilter filter(cfg);
        const auto inserted = filter.insert_batch(keys, spec.threads);
        const double s = time_seconds([&] { filter.remove_batch(keys, spec.threads); });
        if (rep < spec.warmup) continue;
        timings.record(s);
        report.insert_failures = std::max(report.insert_failures, count_failures(inserted));
      }
      break;
  }

  report.wall_time = timings.wall();
  report.throughput = timings.throughput(report.items);
  return report;
}

std::uint64_t buckets_for_bytes(const FilterConfig& cfg, std::uint64_t bytes) {
  const std::uint64_t bucket_bytes = std::uint64_t{cfg.words_per_bucket()} * 8;
  std::uint64_t m = bucket_bytes == 0 ? 0 : bytes / bucket_bytes;
  if (cfg.policy == PlacementPolicy::kXor && m > 0) m = std::bit_floor(m);
  const std::uint64_t minimum = cfg.policy == PlacementPolicy::kOffset ? 2 : 1;
  if (m < minimum) {
    throw ConfigError("memory size " + std::to_string(bytes) + " bytes is too small for one " +
                      std::to_string(bucket_bytes) + "-byte bucket pair");
  }
  return m;
}

std::vector<BenchReport> run_fpr_sweep(const FprSweepSpec& spec) {
  std::vector<BenchReport> reports;
  for (const std::uint64_t bytes : spec.memory_bytes) {
    RunSpec run = spec.base;
    run.op = OpKind::kQueryNegative;
    run.filter.bucket_count = buckets_for_bytes(run.filter, bytes);
    validate_run(run);

    const FilterConfig& cfg = run.filter;
    const auto keys = positive_keys(cfg.seed, fill_count(cfg, run.load_factor));
    const auto probes = negative_keys(cfg.seed, spec.negative_queries);

    CuckooFilter filter(cfg);
    BenchReport report = base_report("fpr", run, cfg);
    report.insert_failures = count_failures(filter.insert_batch(keys, run.threads));
    report.items = probes.size();

    Timings timings;
    std::uint64_t hits = 0;
    for (unsigned rep = 0; rep < run.warmup + run.repetitions; ++rep) {
      std::vector<std::uint8_t> found;
      const double s = time_seconds([&] { found = filter.contains_batch(probes, run.threads); });
      if (rep < run.warmup) continue;
      timings.record(s);
      hits = count_true(found);
    }
    report.empirical_fpr = rate(hits, probes.size());
    report.wall_time = timings.wall();
    report.throughput = timings.throughput(report.items);
    reports.push_back(report);
  }
  return reports;
}

std::vector<BenchReport> run_eviction_study(const EvictionStudySpec& spec) {
  std::vector<BenchReport> reports;
  for (const double alpha : spec.load_factors) {
    for (const EvictionStrategy strategy : spec.strategies) {
      RunSpec run = spec.base;
      run.op = OpKind::kInsert;
      run.load_factor = alpha;
      run.filter.eviction = strategy;
      validate_run(run);

      const FilterConfig& cfg = run.filter;
      const auto keys = positive_keys(cfg.seed, fill_count(cfg, alpha));
      BenchReport report = base_report("evictions", run, cfg);

      Timings timings;
      EvictionStats pooled;
      for (unsigned rep = 0; rep < run.warmup + run.repetitions; ++rep) {
        CuckooFilter filter(cfg);
        EvictionRun tail = collect_eviction_stats(filter, keys, spec.prefill_fraction, run.threads);
        if (rep < run.warmup) continue;
        timings.record(tail.tail_seconds);
        report.items = tail.tail_items;
        report.insert_failures = std::max(report.insert_failures, tail.failures);
        pooled.samples.insert(pooled.samples.end(), tail.stats.samples.begin(),
                              tail.stats.samples.end());
      }
      set_percentiles(report, pooled);
      report.wall_time = timings.wall();
      report.throughput = timings.throughput(report.items);
      reports.push_back(report);
    }
  }
  return reports;
}

std::vector<BenchReport> kmer_bench(const KmerBenchSpec& spec) {
  const auto kmers = read_kmers_file(spec.fasta_path, spec.k);
  return kmer_bench(spec, kmers);
}

std::vector<BenchReport> kmer_bench(const KmerBenchSpec& spec,
                                    std::span<const std::uint64_t> kmers) {
  RunSpec run = spec.base;
  if (spec.auto_size) {
    run.filter.bucket_count =
        size_for(std::max<std::uint64_t>(kmers.size(), 1), run.load_factor,
                 run.filter.bucket_slots, run.filter.policy);
  }
  validate_run(run);
  const FilterConfig& cfg = run.filter;
  // Report the load the k-mer set actually produces.
  run.load_factor = static_cast<double>(kmers.size()) / static_cast<double>(cfg.total_slots());

  Timings insert_t, query_t, delete_t;
  EvictionStats evictions;
  std::uint64_t failures = 0;
  std::uint64_t residual_hits = 0;
  for (unsigned rep = 0; rep < run.warmup + run.repetitions; ++rep) {
    CuckooFilter filter(cfg);
    std::vector<InsertResult> inserted;
    std::vector<std::uint8_t> found;
    const double ti = time_seconds([&] { inserted = filter.insert_batch(kmers, run.threads); });
    const double tq = time_seconds([&] { found = filter.contains_batch(kmers, run.threads); });
    const double td = time_seconds([&] { filter.remove_batch(kmers, run.threads); });
    if (rep < run.warmup) continue;
    insert_t.record(ti);
    query_t.record(tq);
    delete_t.record(td);
    failures = std::max(failures, count_failures(inserted));
    for (const auto& r : inserted) evictions.samples.push_back(r.evictions);
    residual_hits = count_true(filter.contains_batch(kmers, run.threads));
  }

  std::vector<BenchReport> reports;
  for (const auto& [op, timings] :
       {std::pair{OpKind::kInsert, &insert_t}, std::pair{OpKind::kQueryPositive, &query_t},
        std::pair{OpKind::kDelete, &delete_t}}) {
    run.op = op;
    BenchReport report = base_report("kmer", run, cfg);
    report.items = kmers.size();
    report.insert_failures = failures;
    report.wall_time = timings->wall();
    report.throughput = timings->throughput(report.items);
    if (op == OpKind::kInsert) set_percentiles(report, evictions);
    if (op == OpKind::kDelete) report.empirical_fpr = rate(residual_hits, kmers.size());
    reports.push_back(report);
  }
  return reports;
}

}  // namespace ckgf
