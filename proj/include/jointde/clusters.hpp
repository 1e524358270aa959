#pragma once
// Read-sharing connected components of the transcript set and their
// augmentation with a pseudo-transcript.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "jointde/ingest.hpp"
#include "jointde/model.hpp"

namespace jointde {

struct Cluster {
  std::uint32_t label = 0;             // minimum member index
  std::vector<std::uint32_t> members;  // ascending global transcript indices
  std::vector<std::uint32_t> reads_a;  // indices into AlignmentSet::reads_a
  std::vector<std::uint32_t> reads_b;

  std::size_t num_reads() const { return reads_a.size() + reads_b.size(); }
};

struct ClusterPartition {
  std::vector<Cluster> clusters;  // ascending by label
  std::vector<std::uint32_t> orphans;
  std::size_t num_transcripts = 0;
  std::size_t total_a = 0;
  std::size_t total_b = 0;
  /// Cluster position for each transcript, nullopt for orphans.
  std::vector<std::optional<std::uint32_t>> cluster_of;
};

/// Union-find over the alignment lists of both conditions.
ClusterPartition build_clusters(const AlignmentSet& aset);

struct BreakReport {
  std::size_t dropped_a = 0;
  std::size_t dropped_b = 0;
};

/// Keeps the strongest co-alignment bonds (by supporting read count) subject
/// to a component size cap and discards every read whose targets would span
/// two resulting components. Returns a new alignment set with the same catalog.
AlignmentSet drop_bridging_reads(const AlignmentSet& aset, std::size_t max_transcripts,
                                 BreakReport* report = nullptr);

/// Local model for one cluster. Components are the members in ascending order
/// followed, when other transcripts exist, by the pseudo-transcript.
struct AugmentedCluster {
  std::uint32_t label = 0;
  std::vector<std::uint32_t> members;
  bool has_pseudo = false;
  ReadTable reads_a;  // targets are local component indices
  ReadTable reads_b;
  std::uint64_t pinned_a = 0;  // reads permanently held by the pseudo-transcript
  std::uint64_t pinned_b = 0;
  PriorConfig prior;

  std::size_t size() const { return members.size() + (has_pseudo ? 1 : 0); }
  std::size_t pseudo_index() const { return members.size(); }
};

/// Local alpha takes the member entries plus the sum over non-members for the
/// pseudo-component; gamma keeps its leading entries (it is indexed by alive rank).
AugmentedCluster augment_cluster(const ClusterPartition& partition, const AlignmentSet& aset,
                                 std::size_t j, const PriorConfig& global_prior);

/// The raw model over the whole transcript set, no pseudo-transcript.
AugmentedCluster whole_set_model(const AlignmentSet& aset, const PriorConfig& global_prior);

/// cluster_label, n_transcripts, n_reads_a, n_reads_b, member_ids (1-based labels).
void write_cluster_dump(std::ostream& out, const ClusterPartition& partition,
                        const TranscriptCatalog& catalog);

}  // namespace jointde
