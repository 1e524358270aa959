#include "jointde/ingest.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace jointde {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  return s;
}

bool skip_line(std::string_view s) { return s.empty() || s.front() == '#'; }

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return in;
}

}  // namespace

ParseError::ParseError(const std::string& source, std::size_t line, const std::string& what)
    : std::runtime_error(fmt::format("{}:{}: {}", source, line, what)), line_(line) {}

TranscriptCatalog::TranscriptCatalog(std::vector<Transcript> entries) : entries_(std::move(entries)) {
  index_.reserve(entries_.size());
  for (std::uint32_t k = 0; k < entries_.size(); ++k) {
    if (entries_[k].length < 1)
      throw std::invalid_argument("transcript " + entries_[k].id + " has zero length");
    if (!index_.emplace(entries_[k].id, k).second)
      throw std::invalid_argument("duplicate transcript id " + entries_[k].id);
  }
}

std::optional<std::uint32_t> TranscriptCatalog::index_of(const std::string& id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void ReadTable::add_read(std::span<const std::uint32_t> targets, std::span<const double> probs) {
  if (targets.empty()) throw std::invalid_argument("read without alignments");
  if (targets.size() != probs.size()) throw std::invalid_argument("targets/probs length mismatch");
  for (std::size_t a = 0; a < targets.size(); ++a) {
    if (!(probs[a] > 0.0) || !std::isfinite(probs[a]))
      throw std::invalid_argument("alignment probability must be positive");
    for (std::size_t b = 0; b < a; ++b)
      if (targets[a] == targets[b]) throw std::invalid_argument("duplicate transcript within a read");
  }
  targets_.insert(targets_.end(), targets.begin(), targets.end());
  probs_.insert(probs_.end(), probs.begin(), probs.end());
  offsets_.push_back(targets_.size());
}

void ReadTable::append(const ReadTable& other) {
  for (std::size_t i = 0; i < other.size(); ++i) {
    const auto r = other[i];
    add_read(r.targets, r.probs);
  }
}

void AlignmentSet::validate() const {
  for (const ReadTable* t : {&reads_a, &reads_b})
    for (std::size_t i = 0; i < t->size(); ++i)
      for (auto k : (*t)[i].targets)
        if (k >= catalog.size()) throw std::invalid_argument("transcript index out of range");
}

std::optional<double> uniform_alignment_prob(std::uint64_t transcript_length,
                                             std::uint64_t read_length) {
  if (read_length < 1) throw std::invalid_argument("read length must be positive");
  if (read_length > transcript_length) return std::nullopt;
  return 1.0 / static_cast<double>(transcript_length - read_length + 1);
}

TranscriptCatalog parse_catalog(std::istream& in, const std::string& source) {
  std::vector<Transcript> entries;
  std::unordered_map<std::string, std::size_t> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto s = trim(line);
    if (skip_line(s)) continue;
    const auto fields = split(s, '\t');
    if (fields.size() != 2) throw ParseError(source, lineno, "expected 'transcript_id<TAB>length'");
    Transcript t{std::string(fields[0]), 0};
    if (t.id.empty()) throw ParseError(source, lineno, "empty transcript id");
    if (!parse_number(fields[1], t.length) || t.length < 1)
      throw ParseError(source, lineno, "invalid transcript length '" + std::string(fields[1]) + "'");
    if (!seen.emplace(t.id, lineno).second)
      throw ParseError(source, lineno, "duplicate transcript id " + t.id);
    entries.push_back(std::move(t));
  }
  return TranscriptCatalog(std::move(entries));
}

TranscriptCatalog read_catalog(const std::string& path) {
  auto in = open_input(path);
  return parse_catalog(in, path);
}

ReadTable parse_alignments(std::istream& in, const TranscriptCatalog& catalog, ProbMode mode,
                           const std::string& source, const WarningSink& warn) {
  ReadTable table;
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::uint32_t> targets;
  std::vector<double> probs;
  while (std::getline(in, line)) {
    ++lineno;
    const auto s = trim(line);
    if (skip_line(s)) continue;
    const auto fields = split(s, '\t');
    if (fields.size() != 3)
      throw ParseError(source, lineno, "expected 'read_id<TAB>n_aligns<TAB>alignments'");
    std::size_t declared = 0;
    if (!parse_number(fields[1], declared))
      throw ParseError(source, lineno, "invalid alignment count '" + std::string(fields[1]) + "'");
    const auto items = fields[2].empty() ? std::vector<std::string_view>{} : split(fields[2], ';');
    if (items.size() != declared)
      throw ParseError(source, lineno,
                       fmt::format("declared {} alignments, found {}", declared, items.size()));
    targets.clear();
    probs.clear();
    for (const auto item : items) {
      const auto colon = item.rfind(':');
      if (colon == std::string_view::npos)
        throw ParseError(source, lineno, "alignment '" + std::string(item) + "' lacks ':'");
      const std::string id(item.substr(0, colon));
      const auto value = item.substr(colon + 1);
      const auto k = catalog.index_of(id);
      if (!k) throw ParseError(source, lineno, "unknown transcript id '" + id + "'");
      double p = 0.0;
      if (mode == ProbMode::Precomputed) {
        if (!parse_number(value, p) || !(p > 0.0) || !std::isfinite(p))
          throw ParseError(source, lineno, "non-positive or malformed probability for " + id);
      } else {
        std::uint64_t read_len = 0;
        if (!parse_number(value, read_len) || read_len < 1)
          throw ParseError(source, lineno, "malformed read length for " + id);
        const auto f = uniform_alignment_prob(catalog[*k].length, read_len);
        if (!f) {
          if (warn)
            warn(fmt::format("{}:{}: read longer than transcript {}; alignment dropped", source,
                             lineno, id));
          continue;
        }
        p = *f;
      }
      for (auto t : targets)
        if (t == *k) throw ParseError(source, lineno, "duplicate transcript " + id + " within read");
      targets.push_back(*k);
      probs.push_back(p);
    }
    if (targets.empty()) throw ParseError(source, lineno, "read has no usable alignments");
    table.add_read(targets, probs);
  }
  return table;
}

ReadTable parse_alignment_file(const std::string& path, const TranscriptCatalog& catalog,
                               ProbMode mode, const WarningSink& warn) {
  auto in = open_input(path);
  return parse_alignments(in, catalog, mode, path, warn);
}

ReadTable read_condition(const std::vector<std::string>& paths, const TranscriptCatalog& catalog,
                         ProbMode mode, const WarningSink& warn) {
  ReadTable pooled;
  for (const auto& p : paths) pooled.append(parse_alignment_file(p, catalog, mode, warn));
  return pooled;
}

void write_catalog(std::ostream& out, const TranscriptCatalog& catalog) {
  for (const auto& t : catalog.entries()) fmt::print(out, "{}\t{}\n", t.id, t.length);
}

void write_alignments(std::ostream& out, const ReadTable& reads, const TranscriptCatalog& catalog,
                      const std::string& read_prefix) {
  std::string buf;
  for (std::size_t i = 0; i < reads.size(); ++i) {
    const auto r = reads[i];
    buf.clear();
    fmt::format_to(std::back_inserter(buf), "{}{}\t{}\t", read_prefix, i + 1, r.size());
    for (std::size_t a = 0; a < r.size(); ++a) {
      if (a) buf.push_back(';');
      fmt::format_to(std::back_inserter(buf), "{}:{}", catalog[r.targets[a]].id, r.probs[a]);
    }
    buf.push_back('\n');
    out << buf;
  }
}

}  // namespace jointde
