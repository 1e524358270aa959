#pragma once
// Collapsed Gibbs and reversible-jump samplers for one augmented cluster,
// their shared conditional updates, and the chain ensemble.

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "jointde/clusters.hpp"
#include "jointde/distributions.hpp"
#include "jointde/model.hpp"

namespace jointde {

enum class SamplerKind { Collapsed, RjMcmc };
enum class Condition { A, B };

/// Split: the first ceil(n/2) chains start all-EE, the others all-DE.
enum class InitMode { Split, AllEqual, AllDe };

struct ChainConfig {
  std::size_t n_chains = 6;
  std::size_t iterations = 5000;
  std::size_t burnin = 1000;
  std::size_t thin = 5;
  SamplerKind kind = SamplerKind::Collapsed;
  std::vector<double> proposal_betas{1.0, 10.0, 100.0, 250.0, 500.0};
  std::uint64_t seed = 1;
  std::size_t pair_updates = 0;  // collapsed block updates per iteration; 0 means ceil(K/2)
#ifdef NDEBUG
  std::size_t audit_every = 1000;
#else
  std::size_t audit_every = 1;
#endif
  InitMode init = InitMode::Split;
  bool record_expression = true;
  bool keep_traces = true;  // per-draw c, theta, w, pi

  void validate() const;
  std::size_t retained_per_chain() const { return (iterations - burnin) / thin; }
  bool retained(std::size_t iteration) const {  // iteration is 1-based
    return iteration > burnin && (iteration - burnin) % thin == 0;
  }
};

/// Reads with a single alignment never move; only multi-mapping reads are
/// resampled. fixed_* tallies unique reads plus the pinned pseudo counts.
struct ReadSummary {
  std::vector<std::uint32_t> multi_a;
  std::vector<std::uint32_t> multi_b;
  std::vector<std::int64_t> fixed_a;
  std::vector<std::int64_t> fixed_b;

  explicit ReadSummary(const AugmentedCluster& cl);
};

struct AllocationState {
  std::vector<std::uint32_t> xi;  // local component per condition-A read
  std::vector<std::uint32_t> z;
  std::vector<std::int64_t> count_a;  // includes pinned reads
  std::vector<std::int64_t> count_b;

  /// Recomputes the tallies from scratch; throws std::logic_error on mismatch.
  void audit(const AugmentedCluster& cl) const;
};

/// P(allocation = target) for one read given component weights (theta or w).
std::vector<double> allocation_probs(std::span<const double> weights, const ReadView& read);

/// Draws every allocation from its conditional given theta and w.
AllocationState gibbs_allocations(const ExpressionPair& e, const AugmentedCluster& cl, Rng& rng);

/// Parameters of (u, v) | xi, z, c. u follows GD(lambda; beta) over the tau
/// ordering, v a Dirichlet over the alive components in ascending order.
struct UVConditional {
  GDParams u;
  std::vector<double> v;
};

UVConditional uv_conditional_params(std::span<const std::int64_t> count_a,
                                    std::span<const std::int64_t> count_b, const StateVector& c,
                                    const DeadAliveSets& sets, const PriorConfig& prior);
FreeParams sample_uv_conditional(std::span<const std::int64_t> count_a,
                                 std::span<const std::int64_t> count_b, const StateVector& c,
                                 const DeadAliveSets& sets, const PriorConfig& prior, Rng& rng);
FreeParams sample_uv_prior(const StateVector& c, const DeadAliveSets& sets,
                           const PriorConfig& prior, Rng& rng);

/// Collapsed conditional of one read's allocation; the read's own allocation
/// is excluded from the counts before the weights are formed.
std::vector<double> collapsed_allocation_probs(const AllocationState& st, const AugmentedCluster& cl,
                                               Condition cond, std::size_t read,
                                               const StateVector& c);
void collapsed_allocation_update(AllocationState& st, const AugmentedCluster& cl, Condition cond,
                                 std::size_t read, const StateVector& c, Rng& rng);

/// log f(xi, z | c) up to terms constant in (xi, z, c), excluding the
/// alignment probabilities. Includes the v normalizer h_c.
double collapsed_log_joint(std::span<const std::int64_t> count_a,
                           std::span<const std::int64_t> count_b, const StateVector& c,
                           const PriorConfig& prior);

/// Unnormalized log weights of (c_j1, c_j2) in {(0,0), (0,1), (1,0), (1,1)};
/// forbidden cells are -inf.
std::array<double, 4> block_log_weights(const StateVector& c, std::size_t j1, std::size_t j2,
                                        std::span<const std::int64_t> count_a,
                                        std::span<const std::int64_t> count_b,
                                        const PriorConfig& prior, double pi);
StateVector block_update(const StateVector& c, std::size_t j1, std::size_t j2,
                         std::span<const std::int64_t> count_a,
                         std::span<const std::int64_t> count_b, const PriorConfig& prior,
                         double pi, Rng& rng);

/// Draws pi | c for the truncated Bernoulli prior under Jeffreys' Beta(1/2, 1/2):
/// an independence proposal from Beta(c_+ + 1/2, K - c_+ + 1/2) corrected for
/// the truncation normalizer.
double update_pi(double pi, std::size_t c_plus, std::size_t K, Rng& rng);

struct RjMoveProbs {
  double birth = 0.0;
  double death = 0.0;
};
RjMoveProbs rj_move_probabilities(std::size_t c_plus, std::size_t K);

struct RjBirth {
  std::vector<double> v;
  double log_jacobian = 0.0;
};
/// Inserts delta at 0-based slot j and scales the other entries by (1 - delta).
/// From an empty v the result is (delta, 1 - delta).
RjBirth rj_birth_transform(std::span<const double> v, double delta, std::size_t j);

struct RjDeath {
  std::vector<double> v;
  double delta = 0.0;
};
/// Removes slot j; for a two-entry v both components die and delta = v[0].
RjDeath rj_death_transform(std::span<const double> v, std::size_t j);

enum class MoveKind { Birth, Death };

struct RjProposal {
  MoveKind kind = MoveKind::Birth;
  StateVector c;
  FreeParams fp;
  ExpressionPair expr;
  double delta = 0.0;
  double log_jacobian = 0.0;  // of the birth direction
};

/// Birth of k0 (and of k1 when c_+ = 0). theta is carried over unchanged.
RjProposal rj_propose_birth(const StateVector& c, const ExpressionPair& e, const FreeParams& fp,
                            std::size_t k0, std::size_t k1, double delta);
/// Death of k0 (and of the other alive component when c_+ = 2).
RjProposal rj_propose_death(const StateVector& c, const ExpressionPair& e, const FreeParams& fp,
                            std::size_t k0);

/// log-density of the equally weighted Beta(1, beta_j) mixture.
double proposal_logpdf(double delta, std::span<const double> betas);
double sample_proposal(std::span<const double> betas, Rng& rng);

/// Condition-B marginal log-likelihood given w: sum over reads of log sum_k w_k f_k.
double marginal_loglik(const ReadTable& reads, std::span<const std::int64_t> fixed,
                       std::span<const std::uint32_t> multi, std::span<const double> weights);

/// log acceptance ratio of the proposal from (c, fp, e). The reallocation of
/// xi, z that follows the move enters through the marginal likelihood ratio.
double rj_acceptance_log_ratio(const AugmentedCluster& cl, const ReadSummary& rs,
                               const StateVector& c, const FreeParams& fp, const ExpressionPair& e,
                               const RjProposal& prop, double pi, std::span<const double> betas);

struct ChainDraws {
  std::size_t K = 0;
  std::size_t n_draws = 0;
  std::vector<double> sum_c;  // per component
  std::vector<double> sum_theta;
  std::vector<double> sum_w;
  std::vector<std::uint8_t> c_trace;  // n_draws x K, when keep_traces
  std::vector<double> theta_trace;
  std::vector<double> w_trace;
  std::vector<double> pi_trace;
  std::size_t rj_proposed = 0;
  std::size_t rj_accepted = 0;
  std::size_t audits = 0;
  bool started_all_de = false;
};

ChainDraws run_chain(const AugmentedCluster& cl, const ChainConfig& cfg, std::size_t chain_id);

struct EnsembleSummary {
  std::vector<double> p_de;  // local components, pseudo last when present
  std::vector<double> theta_mean;
  std::vector<double> w_mean;
  std::size_t retained_draws = 0;
  double rj_acceptance = std::numeric_limits<double>::quiet_NaN();
  /// MAE between running p_de means of the all-EE and all-DE started chain
  /// groups, per retained draw index; empty unless both groups exist.
  std::vector<double> ergodic_mae;
  std::vector<ChainDraws> chains;
};

bool chain_starts_all_de(const ChainConfig& cfg, std::size_t chain_id);
EnsembleSummary run_ensemble(const AugmentedCluster& cl, const ChainConfig& cfg);

}  // namespace jointde
