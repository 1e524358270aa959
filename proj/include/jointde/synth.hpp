#pragma once
// Synthetic two-condition datasets with known DE labels.
//
// Transcripts are grouped into genes. A gene with g isoforms owns g sequence
// blocks; isoform t carries block t and each later block with probability
// block_share_prob, so block sets are distinct and overlapping isoforms
// produce multi-mapping reads. Reads follow the uniform read model.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "jointde/ingest.hpp"

namespace jointde {

enum class Dispersion { Poisson, NegativeBinomial };

struct ScenarioSpec {
  std::size_t K = 500;
  std::size_t n_de = 50;  // even; first half up in B, second half down
  std::size_t replicates_a = 2;
  std::size_t replicates_b = 2;
  double ee_mean_min = 65.0;  // RPK mean of EE transcripts, uniform on [min, max]
  double ee_mean_max = 65.0;
  double de_low_min = 20.0;  // RPK mean of the lower condition of a DE transcript
  double de_low_max = 20.0;
  double fold_min = 5.0;  // mean fold change of DE transcripts, uniform on [min, max]
  double fold_max = 5.0;
  Dispersion dispersion = Dispersion::Poisson;
  double phi = 50.0;  // NB variance mu + mu^2 / phi
  std::size_t reads_per_replicate_a = 25000;
  std::size_t reads_per_replicate_b = 25000;
  std::uint64_t read_length = 50;
  std::uint64_t block_length_min = 300;
  std::uint64_t block_length_max = 1500;
  std::size_t max_isoforms = 3;  // gene sizes uniform on 1..max_isoforms
  double block_share_prob = 0.5;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Scenario 1 shape: Poisson replicates, EE mean 65, DE means 20 vs 100.
ScenarioSpec scenario1_like(std::size_t K, std::size_t n_de, std::size_t reads_per_condition,
                            std::uint64_t seed);

struct ScenarioTruth {
  std::vector<std::uint8_t> de;
  std::vector<double> theta;  // expected read proportions, replicates averaged
  std::vector<double> w;
  std::vector<std::uint32_t> gene;
};

struct Scenario {
  AlignmentSet aset;
  ScenarioTruth truth;
};

Scenario generate_scenario(const ScenarioSpec& spec);

/// transcript_id, true_label, theta_true, w_true.
void write_truth(std::ostream& out, const TranscriptCatalog& catalog, const ScenarioTruth& truth);

}  // namespace jointde
