#include "ckgf/report.hpp"

#include <charconv>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "ckgf/errors.hpp"
#include "json.hpp"

namespace ckgf {
namespace {

using json = nlohmann::ordered_json;

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

template <typename T>
T parse_number(const std::string& column, const std::string& text) {
  T value{};
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw FormatError("report column '" + column + "': cannot parse '" + text + "'");
  }
  return value;
}

json to_json(const BenchReport& r) {
  json j;
  j["experiment"] = r.experiment;
  j["op"] = std::string(to_string(r.op));
  j["fingerprint_bits"] = r.config.fingerprint_bits;
  j["bucket_slots"] = r.config.bucket_slots;
  j["bucket_count"] = r.config.bucket_count;
  j["policy"] = std::string(to_string(r.config.policy));
  j["eviction"] = std::string(to_string(r.config.eviction));
  j["max_evictions"] = r.config.max_evictions;
  j["seed"] = r.config.seed;
  j["load_factor"] = r.load_factor;
  j["threads"] = r.threads;
  j["items"] = r.items;
  j["memory_bytes"] = r.memory_bytes;
  j["throughput"] = r.throughput;
  j["empirical_fpr"] = r.empirical_fpr ? json(*r.empirical_fpr) : json(nullptr);
  j["analytic_fpr"] = r.analytic_fpr;
  j["insert_failures"] = r.insert_failures;
  j["p90"] = r.p90;
  j["p95"] = r.p95;
  j["p99"] = r.p99;
  j["wall_time"] = r.wall_time;
  j["repetitions"] = r.repetitions;
  j["warmup"] = r.warmup;
  j["aggregation"] = r.aggregation;
  return j;
}

BenchReport from_json(const json& j) {
  BenchReport r;
  try {
    r.experiment = j.at("experiment").get<std::string>();
    r.op = parse_op(j.at("op").get<std::string>());
    r.config.fingerprint_bits = j.at("fingerprint_bits").get<unsigned>();
    r.config.bucket_slots = j.at("bucket_slots").get<unsigned>();
    r.config.bucket_count = j.at("bucket_count").get<std::uint64_t>();
    r.config.policy = parse_policy(j.at("policy").get<std::string>());
    r.config.eviction = parse_eviction(j.at("eviction").get<std::string>());
    r.config.max_evictions = j.at("max_evictions").get<unsigned>();
    r.config.seed = j.at("seed").get<std::uint64_t>();
    r.load_factor = j.at("load_factor").get<double>();
    r.threads = j.at("threads").get<unsigned>();
    r.items = j.at("items").get<std::uint64_t>();
    r.memory_bytes = j.at("memory_bytes").get<std::uint64_t>();
    r.throughput = j.at("throughput").get<double>();
    const auto& fpr = j.at("empirical_fpr");
    if (!fpr.is_null()) r.empirical_fpr = fpr.get<double>();
    r.analytic_fpr = j.at("analytic_fpr").get<double>();
    r.insert_failures = j.at("insert_failures").get<std::uint64_t>();
    r.p90 = j.at("p90").get<std::uint32_t>();
    r.p95 = j.at("p95").get<std::uint32_t>();
    r.p99 = j.at("p99").get<std::uint32_t>();
    r.wall_time = j.at("wall_time").get<double>();
    r.repetitions = j.at("repetitions").get<unsigned>();
    r.warmup = j.at("warmup").get<unsigned>();
    r.aggregation = j.at("aggregation").get<std::string>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed report object: ") + e.what());
  }
  return r;
}

// CSV cell text for a JSON scalar; null becomes an empty cell.
std::string cell_text(const json& v) {
  if (v.is_null()) return {};
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) return format_double(v.get<double>());
  return v.dump();
}

json parse_cell(const std::string& column, const std::string& text, const json& like) {
  if (like.is_string()) return text;
  if (column == "empirical_fpr" && text.empty()) return nullptr;
  if (like.is_number_float() || like.is_null()) return parse_number<double>(column, text);
  return parse_number<std::uint64_t>(column, text);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

std::string_view to_string(OpKind op) noexcept {
  switch (op) {
    case OpKind::kInsert: return "insert";
    case OpKind::kQueryPositive: return "query_pos";
    case OpKind::kQueryNegative: return "query_neg";
    case OpKind::kDelete: return "delete";
  }
  return "insert";
}

OpKind parse_op(std::string_view name) {
  if (name == "insert") return OpKind::kInsert;
  if (name == "query_pos") return OpKind::kQueryPositive;
  if (name == "query_neg") return OpKind::kQueryNegative;
  if (name == "delete") return OpKind::kDelete;
  throw ConfigError("unknown op '" + std::string(name) +
                    "' (expected insert|query_pos|query_neg|delete)");
}

ReportFormat parse_format(std::string_view name) {
  if (name == "csv") return ReportFormat::kCsv;
  if (name == "json") return ReportFormat::kJson;
  throw ConfigError("unknown report format '" + std::string(name) + "' (expected csv|json)");
}

const std::vector<std::string>& report_columns() {
  static const std::vector<std::string> columns = [] {
    std::vector<std::string> names;
    const json prototype = to_json(BenchReport{});
    for (const auto& [key, value] : prototype.items()) names.push_back(key);
    return names;
  }();
  return columns;
}

void write_reports(std::ostream& out, const std::vector<BenchReport>& reports,
                   ReportFormat format) {
  if (format == ReportFormat::kJson) {
    json arr = json::array();
    for (const auto& r : reports) arr.push_back(to_json(r));
    out << arr.dump(2) << '\n';
    return;
  }
  const auto& columns = report_columns();
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << '\n';
  for (const auto& r : reports) {
    const json j = to_json(r);
    std::size_t i = 0;
    for (const auto& [key, value] : j.items()) out << (i++ ? "," : "") << cell_text(value);
    out << '\n';
  }
}

std::vector<BenchReport> read_reports(std::istream& in, ReportFormat format) {
  std::vector<BenchReport> reports;
  if (format == ReportFormat::kJson) {
    json arr;
    try {
      arr = json::parse(in);
    } catch (const json::exception& e) {
      throw FormatError(std::string("report is not valid JSON: ") + e.what());
    }
    if (!arr.is_array()) throw FormatError("report JSON must be an array");
    for (const auto& obj : arr) reports.push_back(from_json(obj));
    return reports;
  }

  std::string line;
  if (!std::getline(in, line)) throw FormatError("report CSV is empty (missing header)");
  const auto header = split_csv_line(line);
  if (header != report_columns()) throw FormatError("report CSV header does not match columns");

  const json prototype = to_json(BenchReport{});
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw FormatError("report CSV line " + std::to_string(line_no) + ": expected " +
                        std::to_string(header.size()) + " cells, got " +
                        std::to_string(cells.size()));
    }
    json obj;
    for (std::size_t i = 0; i < header.size(); ++i) {
      obj[header[i]] = parse_cell(header[i], cells[i], prototype.at(header[i]));
    }
    reports.push_back(from_json(obj));
  }
  return reports;
}

void emit_report(const std::vector<BenchReport>& reports, ReportFormat format,
                 const std::string& destination) {
  if (destination.empty() || destination == "-") {
    write_reports(std::cout, reports, format);
    std::cout.flush();
    return;
  }
  std::ofstream out(destination);
  if (!out) throw IoError("cannot open report destination '" + destination + "' for writing");
  write_reports(out, reports, format);
  out.flush();
  if (!out) throw IoError("failed writing report to '" + destination + "'");
}

std::vector<BenchReport> load_report(const std::string& path, ReportFormat format) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open report '" + path + "'");
  return read_reports(in, format);
}

}  // namespace ckgf
