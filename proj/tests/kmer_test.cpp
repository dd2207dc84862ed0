#include "ckgf/kmer.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "ckgf/analytics.hpp"
#include "ckgf/bench.hpp"
#include "ckgf/cuckoo_filter.hpp"
#include "ckgf/errors.hpp"
#include "oracles.hpp"

namespace ckgf {
namespace {

const std::string kSample = std::string(CKGF_TEST_DATA_DIR) + "/sample.fasta";

std::vector<std::string> stream_strings(const std::string& fasta, unsigned k) {
  std::istringstream in(fasta);
  std::vector<std::string> out;
  stream_kmers(in, k, [&](const PackedKmer& km) { out.push_back(unpack_kmer(km)); });
  return out;
}

TEST(PackKmer, Examples) {
  EXPECT_EQ(pack_kmer("ACGT")->value, 27u);
  EXPECT_EQ(pack_kmer("ACGT")->k, 4u);
  EXPECT_EQ(pack_kmer("AAAA")->value, 0u);
  EXPECT_EQ(pack_kmer("acgt")->value, 27u);
  EXPECT_EQ(pack_kmer("T")->value, 3u);
  EXPECT_FALSE(pack_kmer("ACGN").has_value());
  EXPECT_THROW(pack_kmer(""), std::invalid_argument);
  EXPECT_THROW(pack_kmer(std::string(32, 'A')), std::invalid_argument);
  EXPECT_EQ(pack_kmer(std::string(31, 'T'))->value, (1ull << 62) - 1);
  EXPECT_EQ(unpack_kmer(*pack_kmer("GATTACA")), "GATTACA");
}

TEST(PackKmer, InjectiveAndOrderPreservingForShortK) {
  const char bases[] = {'A', 'C', 'G', 'T'};
  for (unsigned k = 1; k <= 8; ++k) {
    std::set<std::uint64_t> seen;
    std::uint64_t previous = 0;
    const std::uint64_t total = 1ull << (2 * k);
    for (std::uint64_t n = 0; n < total; ++n) {
      std::string s(k, 'A');
      for (unsigned i = 0; i < k; ++i) s[k - 1 - i] = bases[(n >> (2 * i)) & 3];
      const auto packed = pack_kmer(s);
      ASSERT_TRUE(packed.has_value());
      ASSERT_TRUE(seen.insert(packed->value).second);
      if (n > 0) ASSERT_GT(packed->value, previous);
      previous = packed->value;
      ASSERT_EQ(unpack_kmer(*packed), s);
    }
    EXPECT_EQ(seen.size(), total);
  }
}

TEST(StreamKmers, Examples) {
  EXPECT_EQ(stream_strings(">r\nACGTA\n", 4), (std::vector<std::string>{"ACGT", "CGTA"}));
  EXPECT_TRUE(stream_strings(">r\nACG\n", 4).empty());
  EXPECT_EQ(stream_strings(">r\nACNGT\n", 2), (std::vector<std::string>{"AC", "GT"}));
  EXPECT_TRUE(stream_strings("", 4).empty());
}

TEST(StreamKmers, WindowsSpanWrappedLinesButNotRecords) {
  EXPECT_EQ(stream_strings(">r\nAC\nGT\n", 3), (std::vector<std::string>{"ACG", "CGT"}));
  EXPECT_EQ(stream_strings(">a\nAC\n>b\nGT\n", 3), std::vector<std::string>{});
  EXPECT_EQ(stream_strings(">a\nACG\n>b\nGTT\n", 3), (std::vector<std::string>{"ACG", "GTT"}));
  EXPECT_EQ(stream_strings(">r\r\nAC\r\nGT\r\n", 4), std::vector<std::string>{"ACGT"});
  EXPECT_EQ(stream_strings(">r\n; comment\nacgT\n", 4), std::vector<std::string>{"ACGT"});
}

TEST(StreamKmers, RejectsMalformedInputWithLineNumbers) {
  try {
    stream_strings("ACGT\n", 2);
    FAIL() << "expected FastaError";
  } catch (const FastaError& e) {
    EXPECT_EQ(e.line(), 1u);
  }
  try {
    stream_strings(">r\nACGT\nAC1T\n", 2);
    FAIL() << "expected FastaError";
  } catch (const FastaError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(stream_strings(">r\nACGT\n", 0), std::invalid_argument);
  EXPECT_THROW(stream_strings(">r\nACGT\n", 32), std::invalid_argument);
  EXPECT_THROW(read_kmers_file("/nonexistent/file.fasta", 4), IoError);
}

TEST(StreamKmers, MatchesNaiveParserOnSample) {
  for (unsigned k : {1u, 4u, 15u, 21u, 31u}) {
    std::vector<std::string> got;
    std::ifstream in(kSample);
    ASSERT_TRUE(in) << kSample;
    stream_kmers(in, k, [&](const PackedKmer& km) { got.push_back(unpack_kmer(km)); });
    EXPECT_EQ(got, testing::naive_kmers(kSample, k)) << "k=" << k;
    EXPECT_EQ(read_kmers_file(kSample, k).size(), got.size());
  }
}

TEST(KmerBench, FindsEveryKmerAndClearsOnDelete) {
  KmerBenchSpec spec;
  spec.base.filter.seed = 5;
  spec.base.repetitions = 1;
  spec.base.warmup = 0;
  spec.fasta_path = kSample;
  spec.k = 21;
  const auto reports = kmer_bench(spec);
  ASSERT_EQ(reports.size(), 3u);
  EXPECT_EQ(reports[0].op, OpKind::kInsert);
  EXPECT_EQ(reports[1].op, OpKind::kQueryPositive);
  EXPECT_EQ(reports[2].op, OpKind::kDelete);
  const auto kmers = read_kmers_file(kSample, 21);
  for (const auto& r : reports) {
    EXPECT_EQ(r.items, kmers.size());
    EXPECT_EQ(r.insert_failures, 0u);
    EXPECT_EQ(r.experiment, "kmer");
  }
  ASSERT_TRUE(reports[2].empirical_fpr.has_value());
  EXPECT_LE(*reports[2].empirical_fpr, reports[2].analytic_fpr);
}

TEST(KmerBench, AllStreamedKmersArePositive) {
  const auto kmers = read_kmers_file(kSample, 31);
  ASSERT_FALSE(kmers.empty());
  FilterConfig cfg;
  cfg.bucket_count = size_for(kmers.size(), 0.9, cfg.bucket_slots, cfg.policy);
  CuckooFilter filter(cfg);
  for (auto k : kmers) ASSERT_TRUE(filter.insert(k).ok());
  for (auto k : kmers) ASSERT_TRUE(filter.contains(k));
}

}  // namespace
}  // namespace ckgf
