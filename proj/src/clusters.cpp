#include "jointde/clusters.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace jointde {

namespace {

class UnionFind {
public:
  explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), 0u);
  }

  std::uint32_t find(std::uint32_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  bool unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    return true;
  }

  std::size_t component_size(std::uint32_t x) { return size_[find(x)]; }

private:
  std::vector<std::uint32_t> parent_;
  std::vector<std::size_t> size_;
};

void unite_read_targets(UnionFind& uf, const ReadTable& reads) {
  for (std::size_t i = 0; i < reads.size(); ++i) {
    const auto t = reads[i].targets;
    for (std::size_t a = 1; a < t.size(); ++a) uf.unite(t[0], t[a]);
  }
}

}  // namespace

ClusterPartition build_clusters(const AlignmentSet& aset) {
  const std::size_t K = aset.catalog.size();
  UnionFind uf(K);
  unite_read_targets(uf, aset.reads_a);
  unite_read_targets(uf, aset.reads_b);

  std::vector<std::uint8_t> has_reads(K, 0);
  for (const ReadTable* t : {&aset.reads_a, &aset.reads_b})
    for (std::size_t i = 0; i < t->size(); ++i)
      for (auto k : (*t)[i].targets) has_reads[k] = 1;

  ClusterPartition part;
  part.num_transcripts = K;
  part.total_a = aset.reads_a.size();
  part.total_b = aset.reads_b.size();
  part.cluster_of.assign(K, std::nullopt);

  // Scanning in index order makes the first member seen the label.
  std::vector<std::optional<std::uint32_t>> root_cluster(K);
  for (std::uint32_t k = 0; k < K; ++k) {
    if (!has_reads[k]) {
      part.orphans.push_back(k);
      continue;
    }
    const auto root = uf.find(k);
    if (!root_cluster[root]) {
      root_cluster[root] = static_cast<std::uint32_t>(part.clusters.size());
      part.clusters.push_back(Cluster{k, {}, {}, {}});
    }
    part.clusters[*root_cluster[root]].members.push_back(k);
    part.cluster_of[k] = root_cluster[root];
  }
  for (std::uint32_t i = 0; i < aset.reads_a.size(); ++i)
    part.clusters[*part.cluster_of[aset.reads_a[i].targets[0]]].reads_a.push_back(i);
  for (std::uint32_t i = 0; i < aset.reads_b.size(); ++i)
    part.clusters[*part.cluster_of[aset.reads_b[i].targets[0]]].reads_b.push_back(i);
  return part;
}

AlignmentSet drop_bridging_reads(const AlignmentSet& aset, std::size_t max_transcripts,
                                 BreakReport* report) {
  if (max_transcripts < 1) throw std::invalid_argument("cluster size cap must be positive");
  const std::size_t K = aset.catalog.size();

  std::map<std::pair<std::uint32_t, std::uint32_t>, std::size_t> support;
  for (const ReadTable* t : {&aset.reads_a, &aset.reads_b})
    for (std::size_t i = 0; i < t->size(); ++i) {
      const auto tg = (*t)[i].targets;
      for (std::size_t a = 0; a < tg.size(); ++a)
        for (std::size_t b = a + 1; b < tg.size(); ++b)
          ++support[{std::min(tg[a], tg[b]), std::max(tg[a], tg[b])}];
    }

  struct Edge {
    std::uint32_t i, j;
    std::size_t n;
  };
  std::vector<Edge> edges;
  edges.reserve(support.size());
  for (const auto& [key, n] : support) edges.push_back({key.first, key.second, n});
  std::stable_sort(edges.begin(), edges.end(),
                   [](const Edge& x, const Edge& y) { return x.n > y.n; });

  UnionFind uf(K);
  for (const auto& e : edges) {
    if (uf.find(e.i) == uf.find(e.j)) continue;
    if (uf.component_size(e.i) + uf.component_size(e.j) > max_transcripts) continue;
    uf.unite(e.i, e.j);
  }

  AlignmentSet out{aset.catalog, {}, {}};
  BreakReport rep;
  auto filter = [&](const ReadTable& in, ReadTable& dst, std::size_t& dropped) {
    for (std::size_t i = 0; i < in.size(); ++i) {
      const auto r = in[i];
      const auto root = uf.find(r.targets[0]);
      bool keep = true;
      for (auto k : r.targets) keep = keep && uf.find(k) == root;
      if (keep)
        dst.add_read(r.targets, r.probs);
      else
        ++dropped;
    }
  };
  filter(aset.reads_a, out.reads_a, rep.dropped_a);
  filter(aset.reads_b, out.reads_b, rep.dropped_b);
  if (report) *report = rep;
  return out;
}

namespace {

ReadTable localize(const ReadTable& reads, const std::vector<std::uint32_t>& ids,
                   const std::vector<std::uint32_t>& local_of) {
  ReadTable out;
  std::vector<std::uint32_t> targets;
  for (auto i : ids) {
    const auto r = reads[i];
    targets.assign(r.targets.begin(), r.targets.end());
    for (auto& k : targets) k = local_of[k];
    out.add_read(targets, r.probs);
  }
  return out;
}

PriorConfig local_prior(const PriorConfig& global, const std::vector<std::uint32_t>& members,
                        bool has_pseudo) {
  const std::size_t Kl = members.size() + (has_pseudo ? 1 : 0);
  PriorConfig p;
  p.de_prior = global.de_prior;
  p.alpha.reserve(Kl);
  for (auto k : members) p.alpha.push_back(global.alpha[k]);
  if (has_pseudo) {
    double rest = 0.0;
    for (std::size_t k = 0, m = 0; k < global.alpha.size(); ++k) {
      if (m < members.size() && members[m] == k)
        ++m;
      else
        rest += global.alpha[k];
    }
    p.alpha.push_back(rest);
  }
  p.gamma.assign(global.gamma.begin(), global.gamma.begin() + static_cast<std::ptrdiff_t>(Kl));
  return p;
}

}  // namespace

AugmentedCluster augment_cluster(const ClusterPartition& partition, const AlignmentSet& aset,
                                 std::size_t j, const PriorConfig& global_prior) {
  if (j >= partition.clusters.size()) throw std::out_of_range("cluster index out of range");
  global_prior.validate(partition.num_transcripts);
  const Cluster& cl = partition.clusters[j];

  std::vector<std::uint32_t> local_of(partition.num_transcripts, 0);
  for (std::uint32_t m = 0; m < cl.members.size(); ++m) local_of[cl.members[m]] = m;

  AugmentedCluster ac;
  ac.label = cl.label;
  ac.members = cl.members;
  ac.has_pseudo = cl.members.size() < partition.num_transcripts;
  ac.reads_a = localize(aset.reads_a, cl.reads_a, local_of);
  ac.reads_b = localize(aset.reads_b, cl.reads_b, local_of);
  if (ac.has_pseudo) {
    ac.pinned_a = partition.total_a - cl.reads_a.size();
    ac.pinned_b = partition.total_b - cl.reads_b.size();
  }
  ac.prior = local_prior(global_prior, cl.members, ac.has_pseudo);
  return ac;
}

AugmentedCluster whole_set_model(const AlignmentSet& aset, const PriorConfig& global_prior) {
  const std::size_t K = aset.catalog.size();
  global_prior.validate(K);
  AugmentedCluster ac;
  ac.members.resize(K);
  std::iota(ac.members.begin(), ac.members.end(), 0u);
  ac.has_pseudo = false;
  ac.reads_a = aset.reads_a;
  ac.reads_b = aset.reads_b;
  ac.prior = global_prior;
  return ac;
}

void write_cluster_dump(std::ostream& out, const ClusterPartition& partition,
                        const TranscriptCatalog& catalog) {
  out << "cluster_label\tn_transcripts\tn_reads_a\tn_reads_b\tmember_ids\n";
  for (const auto& cl : partition.clusters) {
    std::string ids;
    for (std::size_t m = 0; m < cl.members.size(); ++m) {
      if (m) ids.push_back(',');
      ids += catalog[cl.members[m]].id;
    }
    fmt::print(out, "{}\t{}\t{}\t{}\t{}\n", cl.label + 1, cl.members.size(), cl.reads_a.size(),
               cl.reads_b.size(), ids);
  }
}

}  // namespace jointde
