#pragma once

// Experiment drivers: fixed-load throughput, FPR sweeps over filter size,
// DFS/BFS eviction-tail studies and the k-mer case study. Each driver owns
// its worker threads: mutating phases are joined before any query phase runs.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ckgf/config.hpp"
#include "ckgf/report.hpp"

namespace ckgf {

struct RunSpec {
  FilterConfig filter;
  OpKind op = OpKind::kInsert;
  double load_factor = 0.95;
  unsigned threads = 1;
  unsigned repetitions = 5;
  unsigned warmup = 2;
};

// Keys for filling are distinct values in [0, 2^32); negative-query keys are
// drawn from [2^32, 2^64), so the two sets never intersect.
std::vector<std::uint64_t> positive_keys(std::uint64_t seed, std::uint64_t count);
std::vector<std::uint64_t> negative_keys(std::uint64_t seed, std::uint64_t count);

// Items needed to reach `load_factor` of the filter's slots.
std::uint64_t fill_count(const FilterConfig& cfg, double load_factor);

BenchReport run_throughput(const RunSpec& spec);

struct FprSweepSpec {
  RunSpec base;  // bucket_count is derived per size
  std::vector<std::uint64_t> memory_bytes;
  std::uint64_t negative_queries = 10'000'000;
};

// Bucket count for a table of `bytes` bytes (power of two for XOR).
std::uint64_t buckets_for_bytes(const FilterConfig& cfg, std::uint64_t bytes);

std::vector<BenchReport> run_fpr_sweep(const FprSweepSpec& spec);

struct EvictionStudySpec {
  RunSpec base;
  std::vector<double> load_factors;
  std::vector<EvictionStrategy> strategies{EvictionStrategy::kDfs, EvictionStrategy::kBfs};
  double prefill_fraction = 0.75;
};

std::vector<BenchReport> run_eviction_study(const EvictionStudySpec& spec);

struct KmerBenchSpec {
  RunSpec base;
  std::string fasta_path;
  unsigned k = 31;
  // Size the table from the k-mer count and base.load_factor instead of
  // using base.filter.bucket_count.
  bool auto_size = true;
};

// Returns insert, query_pos and delete reports. The delete report's
// empirical_fpr is the positive rate of querying every k-mer after all were
// deleted.
std::vector<BenchReport> kmer_bench(const KmerBenchSpec& spec);
std::vector<BenchReport> kmer_bench(const KmerBenchSpec& spec,
                                    std::span<const std::uint64_t> kmers);

}  // namespace ckgf
