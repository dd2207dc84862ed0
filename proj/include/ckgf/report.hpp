#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ckgf/config.hpp"

namespace ckgf {

enum class OpKind { kInsert, kQueryPositive, kQueryNegative, kDelete };

std::string_view to_string(OpKind op) noexcept;
OpKind parse_op(std::string_view name);

enum class ReportFormat { kCsv, kJson };

ReportFormat parse_format(std::string_view name);

// One measured configuration. Throughput and wall time are medians over the
// timed repetitions.
struct BenchReport {
  std::string experiment;  // throughput | fpr | evictions | kmer
  OpKind op = OpKind::kInsert;
  FilterConfig config;
  double load_factor = 0.0;  // target
  unsigned threads = 1;
  std::uint64_t items = 0;  // operations per repetition
  std::uint64_t memory_bytes = 0;
  double throughput = 0.0;  // elements / second
  std::optional<double> empirical_fpr;
  double analytic_fpr = 0.0;
  std::uint64_t insert_failures = 0;
  std::uint32_t p90 = 0;
  std::uint32_t p95 = 0;
  std::uint32_t p99 = 0;
  double wall_time = 0.0;  // seconds
  unsigned repetitions = 1;
  unsigned warmup = 0;
  std::string aggregation = "median";

  friend bool operator==(const BenchReport&, const BenchReport&) = default;
};

// CSV column order, also the header row.
const std::vector<std::string>& report_columns();

void write_reports(std::ostream& out, const std::vector<BenchReport>& reports, ReportFormat format);
std::vector<BenchReport> read_reports(std::istream& in, ReportFormat format);

// Writes to `destination`, or stdout when destination is "-" or empty.
void emit_report(const std::vector<BenchReport>& reports, ReportFormat format,
                 const std::string& destination);
std::vector<BenchReport> load_report(const std::string& path, ReportFormat format);

}  // namespace ckgf
