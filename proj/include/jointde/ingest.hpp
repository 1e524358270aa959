#pragma once
// Transcript catalog and per-read alignment probability tables.
//
// Catalog TSV:   transcript_id <TAB> length
// Alignment TSV: read_id <TAB> n_aligns <TAB> tr_id:value;tr_id:value;...
//   value is f_k(x_i) in precomputed mode, the read length in uniform mode.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace jointde {

class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& source, std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

struct Transcript {
  std::string id;
  std::uint64_t length = 0;
};

class TranscriptCatalog {
public:
  TranscriptCatalog() = default;
  explicit TranscriptCatalog(std::vector<Transcript> entries);

  std::size_t size() const { return entries_.size(); }
  const Transcript& operator[](std::size_t k) const { return entries_[k]; }
  const std::vector<Transcript>& entries() const { return entries_; }
  std::optional<std::uint32_t> index_of(const std::string& id) const;

  friend bool operator==(const TranscriptCatalog& a, const TranscriptCatalog& b) {
    return a.entries_.size() == b.entries_.size() &&
           std::equal(a.entries_.begin(), a.entries_.end(), b.entries_.begin(),
                      [](const Transcript& x, const Transcript& y) {
                        return x.id == y.id && x.length == y.length;
                      });
  }

private:
  std::vector<Transcript> entries_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

struct ReadView {
  std::span<const std::uint32_t> targets;
  std::span<const double> probs;
  std::size_t size() const { return targets.size(); }
};

/// Reads stored contiguously (CSR layout).
class ReadTable {
public:
  ReadTable() : offsets_{0} {}

  /// Throws std::invalid_argument if the read has no alignments, repeats a
  /// target, or carries a non-positive probability.
  void add_read(std::span<const std::uint32_t> targets, std::span<const double> probs);
  void append(const ReadTable& other);

  std::size_t size() const { return offsets_.size() - 1; }
  bool empty() const { return size() == 0; }
  ReadView operator[](std::size_t i) const {
    const auto b = offsets_[i];
    const auto n = offsets_[i + 1] - b;
    return {std::span(targets_).subspan(b, n), std::span(probs_).subspan(b, n)};
  }
  std::size_t num_alignments() const { return targets_.size(); }

  friend bool operator==(const ReadTable&, const ReadTable&) = default;

private:
  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> targets_;
  std::vector<double> probs_;
};

struct AlignmentSet {
  TranscriptCatalog catalog;
  ReadTable reads_a;
  ReadTable reads_b;

  void validate() const;
  friend bool operator==(const AlignmentSet&, const AlignmentSet&) = default;
};

enum class ProbMode { Precomputed, Uniform };

using WarningSink = std::function<void(const std::string&)>;

/// 1/(L - l + 1), or nullopt when the read is longer than the transcript.
std::optional<double> uniform_alignment_prob(std::uint64_t transcript_length,
                                             std::uint64_t read_length);

TranscriptCatalog parse_catalog(std::istream& in, const std::string& source = "<catalog>");
TranscriptCatalog read_catalog(const std::string& path);

ReadTable parse_alignments(std::istream& in, const TranscriptCatalog& catalog, ProbMode mode,
                           const std::string& source = "<alignments>",
                           const WarningSink& warn = {});
ReadTable parse_alignment_file(const std::string& path, const TranscriptCatalog& catalog,
                               ProbMode mode, const WarningSink& warn = {});

/// Replicates of one condition are pooled by concatenation.
ReadTable read_condition(const std::vector<std::string>& paths, const TranscriptCatalog& catalog,
                         ProbMode mode, const WarningSink& warn = {});

void write_catalog(std::ostream& out, const TranscriptCatalog& catalog);
/// Precomputed-mode serialization; probabilities written with round-trip precision.
void write_alignments(std::ostream& out, const ReadTable& reads, const TranscriptCatalog& catalog,
                      const std::string& read_prefix = "r");

}  // namespace jointde
