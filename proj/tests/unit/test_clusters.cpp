#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "jointde/clusters.hpp"

using namespace jointde;

namespace {

AlignmentSet make_set(std::size_t K, const std::vector<std::vector<std::uint32_t>>& a,
                      const std::vector<std::vector<std::uint32_t>>& b = {}) {
  std::vector<Transcript> e;
  for (std::size_t k = 0; k < K; ++k) e.push_back({"t" + std::to_string(k + 1), 100});
  AlignmentSet s;
  s.catalog = TranscriptCatalog(e);
  for (const auto& r : a) s.reads_a.add_read(r, std::vector<double>(r.size(), 0.01));
  for (const auto& r : b) s.reads_b.add_read(r, std::vector<double>(r.size(), 0.01));
  return s;
}

// Reference components by repeated relaxation of a min-label map.
std::vector<std::int64_t> reference_labels(std::size_t K, const AlignmentSet& s) {
  std::vector<std::int64_t> lab(K, -1);
  auto touch = [&](const ReadTable& t) {
    for (std::size_t i = 0; i < t.size(); ++i)
      for (auto k : t[i].targets) lab[k] = static_cast<std::int64_t>(k);
  };
  touch(s.reads_a);
  touch(s.reads_b);
  for (bool changed = true; changed;) {
    changed = false;
    for (const ReadTable* t : {&s.reads_a, &s.reads_b})
      for (std::size_t i = 0; i < t->size(); ++i) {
        std::int64_t m = lab[(*t)[i].targets[0]];
        for (auto k : (*t)[i].targets) m = std::min(m, lab[k]);
        for (auto k : (*t)[i].targets)
          if (lab[k] != m) {
            lab[k] = m;
            changed = true;
          }
      }
  }
  return lab;
}

void check_partition(const ClusterPartition& p, std::size_t K, const AlignmentSet& s) {
  std::vector<int> seen(K, 0);
  for (const auto& c : p.clusters) {
    CHECK(c.label == c.members.front());
    CHECK(std::is_sorted(c.members.begin(), c.members.end()));
    for (auto k : c.members) ++seen[k];
  }
  for (auto k : p.orphans) ++seen[k];
  for (int v : seen) CHECK(v == 1);
  std::size_t ra = 0, rb = 0;
  for (const auto& c : p.clusters) {
    ra += c.reads_a.size();
    rb += c.reads_b.size();
  }
  CHECK(ra == s.reads_a.size());
  CHECK(rb == s.reads_b.size());
}

}  // namespace

TEST_CASE("two clusters and one orphan") {
  const auto s = make_set(4, {{0, 1}, {2}});
  const auto p = build_clusters(s);
  REQUIRE(p.clusters.size() == 2);
  CHECK(p.clusters[0].label == 0);
  CHECK(p.clusters[0].members == std::vector<std::uint32_t>{0, 1});
  CHECK(p.clusters[1].label == 2);
  CHECK(p.orphans == std::vector<std::uint32_t>{3});
  CHECK_FALSE(p.cluster_of[3].has_value());
  check_partition(p, 4, s);
}

TEST_CASE("transitive chain forms one cluster") {
  const auto s = make_set(3, {{0, 1}}, {{1, 2}});
  const auto p = build_clusters(s);
  REQUIRE(p.clusters.size() == 1);
  CHECK(p.clusters[0].members == std::vector<std::uint32_t>{0, 1, 2});
}

TEST_CASE("unique reads give singleton clusters") {
  std::vector<std::vector<std::uint32_t>> reads;
  for (std::uint32_t k = 0; k < 100; ++k) reads.push_back({k});
  const auto s = make_set(100, reads, reads);
  const auto p = build_clusters(s);
  CHECK(p.clusters.size() == 100);
  CHECK(p.orphans.empty());
  check_partition(p, 100, s);
}

TEST_CASE("random graphs match the reference components and ignore read order") {
  std::mt19937_64 rng(4);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t K = 5 + rng() % 60;
    std::vector<std::vector<std::uint32_t>> reads;
    const std::size_t n = rng() % (2 * K);
    for (std::size_t i = 0; i < n; ++i) {
      std::set<std::uint32_t> t;
      const std::size_t m = 1 + (rng() % 10 == 0 ? rng() % 3 : 0);
      while (t.size() < m) t.insert(static_cast<std::uint32_t>(rng() % K));
      reads.emplace_back(t.begin(), t.end());
    }
    const auto s = make_set(K, reads);
    const auto p = build_clusters(s);
    check_partition(p, K, s);
    const auto ref = reference_labels(K, s);
    for (std::size_t k = 0; k < K; ++k) {
      if (ref[k] < 0) {
        CHECK_FALSE(p.cluster_of[k].has_value());
      } else {
        REQUIRE(p.cluster_of[k].has_value());
        CHECK(p.clusters[*p.cluster_of[k]].label == ref[k]);
      }
    }
    auto shuffled = reads;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto q = build_clusters(make_set(K, shuffled));
    REQUIRE(q.clusters.size() == p.clusters.size());
    for (std::size_t j = 0; j < p.clusters.size(); ++j) {
      CHECK(q.clusters[j].label == p.clusters[j].label);
      CHECK(q.clusters[j].members == p.clusters[j].members);
    }
  }
}

TEST_CASE("empty input yields an empty partition") {
  const auto p = build_clusters(make_set(3, {}));
  CHECK(p.clusters.empty());
  CHECK(p.orphans.size() == 3);
}

TEST_CASE("augmentation pins the reads of other clusters") {
  // K=10; cluster {0,1,2} carries 10 A reads and 7 B reads out of 100 / 50.
  std::vector<std::vector<std::uint32_t>> a, b;
  for (int i = 0; i < 10; ++i) a.push_back({static_cast<std::uint32_t>(i % 3), 1});
  for (int i = 0; i < 90; ++i) a.push_back({static_cast<std::uint32_t>(3 + i % 7)});
  for (int i = 0; i < 7; ++i) b.push_back({static_cast<std::uint32_t>(i % 3)});
  for (int i = 0; i < 43; ++i) b.push_back({static_cast<std::uint32_t>(3 + i % 7)});
  for (auto& r : a) {
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
  }
  const auto s = make_set(10, a, b);
  const auto p = build_clusters(s);
  const auto prior = PriorConfig::uniform(10);
  const auto m = augment_cluster(p, s, 0, prior);
  CHECK(m.members == std::vector<std::uint32_t>{0, 1, 2});
  CHECK(m.has_pseudo);
  CHECK(m.size() == 4);
  CHECK(m.pinned_a == 90);
  CHECK(m.pinned_b == 43);
  CHECK(m.reads_a.size() == 10);
  CHECK(m.reads_b.size() == 7);
  CHECK(m.prior.alpha[3] == doctest::Approx(7.0));
  CHECK(m.prior.gamma.size() == 4);
  for (std::size_t i = 0; i < m.reads_a.size(); ++i)
    for (auto t : m.reads_a[i].targets) CHECK(t < 3);
}

TEST_CASE("a cluster holding every transcript gets no pseudo-transcript") {
  const auto s = make_set(3, {{0, 1}, {1, 2}}, {{2}});
  const auto p = build_clusters(s);
  const auto m = augment_cluster(p, s, 0, PriorConfig::uniform(3));
  CHECK_FALSE(m.has_pseudo);
  CHECK(m.size() == 3);
  CHECK(m.pinned_a == 0);
  CHECK(m.pinned_b == 0);
  const auto w = whole_set_model(s, PriorConfig::uniform(3));
  CHECK(w.reads_a == m.reads_a);
  CHECK(w.reads_b == m.reads_b);
}

TEST_CASE("a cluster with pinned reads but every transcript still gets a pseudo when an orphan exists") {
  const auto s = make_set(3, {{0, 1}});
  const auto m = augment_cluster(build_clusters(s), s, 0, PriorConfig::uniform(3));
  CHECK(m.has_pseudo);
  CHECK(m.pinned_a == 0);
  CHECK(m.prior.alpha[2] == doctest::Approx(1.0));
}

TEST_CASE("bridging reads are dropped above the size cap") {
  // Two dense triangles joined by a single read.
  std::vector<std::vector<std::uint32_t>> a;
  for (int i = 0; i < 5; ++i) {
    a.push_back({0, 1});
    a.push_back({1, 2});
    a.push_back({3, 4});
    a.push_back({4, 5});
  }
  a.push_back({2, 3});
  const auto s = make_set(6, a);
  CHECK(build_clusters(s).clusters.size() == 1);
  BreakReport rep;
  const auto cut = drop_bridging_reads(s, 3, &rep);
  CHECK(rep.dropped_a == 1);
  CHECK(rep.dropped_b == 0);
  const auto p = build_clusters(cut);
  REQUIRE(p.clusters.size() == 2);
  CHECK(p.clusters[0].members == std::vector<std::uint32_t>{0, 1, 2});
  CHECK(p.clusters[1].members == std::vector<std::uint32_t>{3, 4, 5});
  const auto same = drop_bridging_reads(s, 6, &rep);
  CHECK(rep.dropped_a == 0);
  CHECK(same == s);
  CHECK_THROWS(drop_bridging_reads(s, 0));
}

TEST_CASE("cluster dump uses one-based labels and member ids") {
  const auto s = make_set(4, {{0, 1}, {2}}, {{2}});
  std::ostringstream out;
  write_cluster_dump(out, build_clusters(s), s.catalog);
  CHECK(out.str() ==
        "cluster_label\tn_transcripts\tn_reads_a\tn_reads_b\tmember_ids\n"
        "1\t2\t1\t0\tt1,t2\n"
        "3\t1\t1\t1\tt3\n");
}
