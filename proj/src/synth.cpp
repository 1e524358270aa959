#include "jointde/synth.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "jointde/distributions.hpp"

namespace jointde {

void ScenarioSpec::validate() const {
  if (K < 1) throw std::invalid_argument("scenario needs at least one transcript");
  if (n_de > K || n_de % 2 != 0) throw std::invalid_argument("n_de must be even and at most K");
  if (replicates_a < 1 || replicates_b < 1)
    throw std::invalid_argument("each condition needs a replicate");
  if (!(ee_mean_min > 0.0 && ee_mean_max >= ee_mean_min))
    throw std::invalid_argument("invalid EE mean range");
  if (!(de_low_min > 0.0 && de_low_max >= de_low_min))
    throw std::invalid_argument("invalid DE mean range");
  if (!(fold_min >= 1.0 && fold_max >= fold_min))
    throw std::invalid_argument("invalid fold-change range");
  if (dispersion == Dispersion::NegativeBinomial && !(phi > 0.0))
    throw std::invalid_argument("NB dispersion must be positive");
  if (read_length < 1) throw std::invalid_argument("read length must be positive");
  if (block_length_min < 1 || block_length_max < block_length_min)
    throw std::invalid_argument("invalid block length range");
  if (read_length > block_length_min)
    throw std::invalid_argument("infeasible scenario: reads longer than the shortest transcript");
  if (max_isoforms < 1) throw std::invalid_argument("genes need at least one isoform");
  if (!(block_share_prob >= 0.0 && block_share_prob <= 1.0))
    throw std::invalid_argument("block sharing probability must lie in [0,1]");
}

ScenarioSpec scenario1_like(std::size_t K, std::size_t n_de, std::size_t reads_per_condition,
                            std::uint64_t seed) {
  ScenarioSpec s;
  s.K = K;
  s.n_de = n_de;
  s.reads_per_replicate_a = reads_per_condition / s.replicates_a;
  s.reads_per_replicate_b = reads_per_condition / s.replicates_b;
  s.seed = seed;
  return s;
}

namespace {

struct Layout {
  std::vector<std::uint64_t> block_length;
  std::vector<std::vector<std::uint32_t>> blocks;   // per transcript, ascending
  std::vector<std::vector<std::uint64_t>> offsets;  // per transcript, block start positions
  std::vector<std::uint64_t> length;
  std::vector<std::vector<std::uint32_t>> holders;  // per block, transcripts containing it
  std::vector<std::uint32_t> gene;
};

Layout build_layout(const ScenarioSpec& spec, Rng& rng) {
  Layout lay;
  std::uniform_int_distribution<std::size_t> gene_size(1, spec.max_isoforms);
  std::uniform_int_distribution<std::uint64_t> block_len(spec.block_length_min,
                                                         spec.block_length_max);
  std::uint32_t gene_id = 0;
  while (lay.blocks.size() < spec.K) {
    const std::size_t g = std::min(gene_size(rng), spec.K - lay.blocks.size());
    const auto first_block = static_cast<std::uint32_t>(lay.block_length.size());
    for (std::size_t b = 0; b < g; ++b) lay.block_length.push_back(block_len(rng));
    for (std::size_t t = 0; t < g; ++t) {
      std::vector<std::uint32_t> bl{first_block + static_cast<std::uint32_t>(t)};
      for (std::size_t j = t + 1; j < g; ++j)
        if (sample_uniform(rng) < spec.block_share_prob)
          bl.push_back(first_block + static_cast<std::uint32_t>(j));
      lay.blocks.push_back(std::move(bl));
      lay.gene.push_back(gene_id);
    }
    ++gene_id;
  }
  lay.holders.resize(lay.block_length.size());
  for (std::uint32_t k = 0; k < lay.blocks.size(); ++k) {
    std::vector<std::uint64_t> off;
    std::uint64_t pos = 0;
    for (auto b : lay.blocks[k]) {
      off.push_back(pos);
      pos += lay.block_length[b];
      lay.holders[b].push_back(k);
    }
    lay.offsets.push_back(std::move(off));
    lay.length.push_back(pos);
  }
  return lay;
}

double draw_rpk(double mu, const ScenarioSpec& spec, Rng& rng) {
  double lambda = mu;
  if (spec.dispersion == Dispersion::NegativeBinomial)
    lambda = std::gamma_distribution<double>(spec.phi, mu / spec.phi)(rng);
  if (lambda <= 0.0) return 0.0;
  return static_cast<double>(std::poisson_distribution<std::int64_t>(lambda)(rng));
}

std::vector<double> abundance(const std::vector<double>& mu, const Layout& lay,
                              const ScenarioSpec& spec, Rng& rng) {
  std::vector<double> a(mu.size());
  double total = 0.0;
  for (std::size_t k = 0; k < mu.size(); ++k) {
    a[k] = draw_rpk(mu[k], spec, rng) * static_cast<double>(lay.length[k]);
    total += a[k];
  }
  if (!(total > 0.0)) throw std::runtime_error("all simulated RPK values are zero");
  for (double& x : a) x /= total;
  return a;
}

void simulate_reads(const std::vector<double>& theta, std::size_t n, const Layout& lay,
                    const ScenarioSpec& spec, Rng& rng, ReadTable& out) {
  std::discrete_distribution<std::uint32_t> pick(theta.begin(), theta.end());
  const std::uint64_t l = spec.read_length;
  std::vector<std::uint32_t> targets;
  std::vector<double> probs;
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = pick(rng);
    const auto& bl = lay.blocks[k];
    const auto& off = lay.offsets[k];
    const std::uint64_t start =
        std::uniform_int_distribution<std::uint64_t>(0, lay.length[k] - l)(rng);
    const std::uint64_t last = start + l - 1;
    const std::size_t is =
        static_cast<std::size_t>(std::upper_bound(off.begin(), off.end(), start) - off.begin()) - 1;
    const std::size_t ie =
        static_cast<std::size_t>(std::upper_bound(off.begin(), off.end(), last) - off.begin()) - 1;

    targets.clear();
    probs.clear();
    for (auto k2 : lay.holders[bl[is]]) {
      const auto& bl2 = lay.blocks[k2];
      const auto p = static_cast<std::size_t>(
          std::find(bl2.begin(), bl2.end(), bl[is]) - bl2.begin());
      if (p + (ie - is) >= bl2.size()) continue;
      if (!std::equal(bl.begin() + is, bl.begin() + ie + 1, bl2.begin() + p)) continue;
      targets.push_back(k2);
      probs.push_back(1.0 / static_cast<double>(lay.length[k2] - l + 1));
    }
    out.add_read(targets, probs);
  }
}

}  // namespace

Scenario generate_scenario(const ScenarioSpec& spec) {
  spec.validate();
  Rng rng(mix_seed(spec.seed, 0x5eed));
  const Layout lay = build_layout(spec, rng);
  const std::size_t K = spec.K;

  std::vector<Transcript> entries(K);
  for (std::size_t k = 0; k < K; ++k) entries[k] = {fmt::format("t{:05}", k + 1), lay.length[k]};

  Scenario sc;
  sc.aset.catalog = TranscriptCatalog(std::move(entries));
  sc.truth.de.assign(K, 0);
  sc.truth.gene = lay.gene;

  std::vector<std::uint32_t> order(K);
  std::iota(order.begin(), order.end(), 0u);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<double> mu_a(K), mu_b(K);
  std::uniform_real_distribution<double> ee(spec.ee_mean_min, spec.ee_mean_max);
  std::uniform_real_distribution<double> low(spec.de_low_min, spec.de_low_max);
  std::uniform_real_distribution<double> fold(spec.fold_min, spec.fold_max);
  for (std::size_t r = 0; r < K; ++r) {
    const auto k = order[r];
    if (r < spec.n_de) {
      sc.truth.de[k] = 1;
      const double lo = spec.de_low_min == spec.de_low_max ? spec.de_low_min : low(rng);
      const double d = spec.fold_min == spec.fold_max ? spec.fold_min : fold(rng);
      const bool up = r < spec.n_de / 2;
      mu_a[k] = up ? lo : lo * d;
      mu_b[k] = up ? lo * d : lo;
    } else {
      mu_a[k] = mu_b[k] = spec.ee_mean_min == spec.ee_mean_max ? spec.ee_mean_min : ee(rng);
    }
  }

  sc.truth.theta.assign(K, 0.0);
  sc.truth.w.assign(K, 0.0);
  auto run_condition = [&](const std::vector<double>& mu, std::size_t reps, std::size_t n,
                           std::vector<double>& truth, ReadTable& reads) {
    for (std::size_t j = 0; j < reps; ++j) {
      const auto a = abundance(mu, lay, spec, rng);
      for (std::size_t k = 0; k < K; ++k) truth[k] += a[k] / static_cast<double>(reps);
      simulate_reads(a, n, lay, spec, rng, reads);
    }
  };
  run_condition(mu_a, spec.replicates_a, spec.reads_per_replicate_a, sc.truth.theta,
                sc.aset.reads_a);
  run_condition(mu_b, spec.replicates_b, spec.reads_per_replicate_b, sc.truth.w, sc.aset.reads_b);
  return sc;
}

void write_truth(std::ostream& out, const TranscriptCatalog& catalog, const ScenarioTruth& truth) {
  out << "transcript_id\ttrue_label\ttheta_true\tw_true\n";
  for (std::size_t k = 0; k < catalog.size(); ++k)
    fmt::print(out, "{}\t{}\t{}\t{}\n", catalog[k].id, int(truth.de[k]), truth.theta[k],
               truth.w[k]);
}

}  // namespace jointde
