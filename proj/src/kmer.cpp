#include "ckgf/kmer.hpp"

#include <cctype>
#include <fstream>

#include "ckgf/errors.hpp"

namespace ckgf {
namespace {

void require_k(std::size_t k) {
  if (k < 1 || k > kMaxK) {
    throw std::invalid_argument("k must be in [1, " + std::to_string(kMaxK) + "], got " +
                                std::to_string(k));
  }
}

// IUPAC letters, gaps and stop markers may appear in sequence lines; they
// break windows but are not malformed input.
bool is_sequence_char(char c) noexcept {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '-' || c == '*' || c == '.';
}

}  // namespace

std::optional<PackedKmer> pack_kmer(std::string_view bases) {
  require_k(bases.size());
  PackedKmer out{0, static_cast<unsigned>(bases.size())};
  for (char c : bases) {
    const int code = base_code(c);
    if (code < 0) return std::nullopt;
    out.value = (out.value << 2) | static_cast<std::uint64_t>(code);
  }
  return out;
}

std::string unpack_kmer(const PackedKmer& kmer) {
  static constexpr char kBases[] = {'A', 'C', 'G', 'T'};
  std::string out(kmer.k, 'A');
  for (unsigned i = 0; i < kmer.k; ++i) {
    out[kmer.k - 1 - i] = kBases[(kmer.value >> (2 * i)) & 3];
  }
  return out;
}

void stream_kmers(std::istream& fasta, unsigned k,
                  const std::function<void(const PackedKmer&)>& sink) {
  require_k(k);
  const std::uint64_t mask = (std::uint64_t{1} << (2 * k)) - 1;

  std::string line;
  std::size_t line_no = 0;
  bool in_record = false;
  std::uint64_t rolling = 0;
  unsigned run = 0;  // consecutive valid bases ending at the current position

  while (std::getline(fasta, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '>') {
      in_record = true;
      rolling = 0;
      run = 0;
      continue;
    }
    if (line.front() == ';') continue;  // legacy comment line
    if (!in_record) throw FastaError(line_no, "sequence data before first '>' header");

    for (char c : line) {
      if (c == ' ' || c == '\t') continue;
      const int code = base_code(c);
      if (code < 0) {
        if (!is_sequence_char(c)) {
          throw FastaError(line_no, std::string("invalid character '") + c + "' in sequence");
        }
        run = 0;
        rolling = 0;
        continue;
      }
      rolling = ((rolling << 2) | static_cast<std::uint64_t>(code)) & mask;
      if (run < k) ++run;
      if (run == k) sink(PackedKmer{rolling, k});
    }
  }
  if (fasta.bad()) throw IoError("error while reading FASTA input");
}

std::vector<std::uint64_t> read_kmers(std::istream& fasta, unsigned k) {
  std::vector<std::uint64_t> out;
  stream_kmers(fasta, k, [&out](const PackedKmer& km) { out.push_back(km.value); });
  return out;
}

std::vector<std::uint64_t> read_kmers_file(const std::string& path, unsigned k) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open FASTA file '" + path + "'");
  return read_kmers(in, k);
}

}  // namespace ckgf
