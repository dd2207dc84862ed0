#pragma once

// 2-bit DNA k-mer packing and FASTA streaming.
//
// Encoding: A=00 C=01 G=10 T=11, case-insensitive. The leftmost base lands in
// the highest used bit pair, so numeric order equals lexicographic order.
// k-mers are emitted as read (no reverse-complement canonicalisation).

#include <cstdint>
#include <functional>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ckgf {

inline constexpr unsigned kMaxK = 31;

struct PackedKmer {
  std::uint64_t value = 0;
  unsigned k = 0;

  friend bool operator==(const PackedKmer&, const PackedKmer&) = default;
};

class FastaError : public std::runtime_error {
 public:
  FastaError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// 2-bit code of a base, or -1 for anything outside {A, C, G, T} (any case).
constexpr int base_code(char c) noexcept {
  switch (c) {
    case 'A': case 'a': return 0;
    case 'C': case 'c': return 1;
    case 'G': case 'g': return 2;
    case 'T': case 't': return 3;
    default: return -1;
  }
}

// Returns nullopt if any base is ambiguous. Throws std::invalid_argument when
// bases is empty or longer than kMaxK.
std::optional<PackedKmer> pack_kmer(std::string_view bases);

std::string unpack_kmer(const PackedKmer& kmer);

// Streams every valid length-k window of every record, sliding by one base.
// Windows containing a non-ACGT base are skipped and windows never span two
// records. Sequence lines may wrap; line breaks inside a record are ignored.
// Throws FastaError for sequence data before the first '>' header or for
// characters that are not sequence letters.
void stream_kmers(std::istream& fasta, unsigned k,
                  const std::function<void(const PackedKmer&)>& sink);
std::vector<std::uint64_t> read_kmers(std::istream& fasta, unsigned k);
std::vector<std::uint64_t> read_kmers_file(const std::string& path, unsigned k);

}  // namespace ckgf
