#pragma once
// Exact posterior by exhaustive enumeration of allocations and state vectors
// on tiny models. Independent of the sampler code: the allocation marginal is
// evaluated as a product of Dirichlet moments.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "jointde/clusters.hpp"
#include "jointde/model.hpp"

namespace jointde {

struct OracleBudget {
  std::size_t max_components = 4;
  std::size_t max_reads = 10;  // r + s over aligned reads
};

struct OracleResult {
  std::vector<StateVector> states;
  std::vector<double> state_prob;
  std::vector<double> p_de;
  std::vector<double> theta_mean;
  std::vector<double> w_mean;
};

/// Throws std::length_error when the model exceeds the budget.
OracleResult brute_force_posterior(const AugmentedCluster& model, const OracleBudget& budget = {});

/// log P(xi, z | c) + sum log f over all aligned reads, with xi and z given as
/// local component indices (pinned pseudo reads are implicit).
double log_joint_allocation(const AugmentedCluster& model, const StateVector& c,
                            std::span<const std::uint32_t> xi, std::span<const std::uint32_t> z);

/// Prior weight of a state with c_+ DE components: fixed pi, or pi integrated
/// against Beta(1/2, 1/2) by Gauss-Legendre quadrature with `nodes` points.
double state_prior_weight(std::size_t c_plus, std::size_t K, const DePrior& prior,
                          std::size_t nodes = 2001);

/// Gauss-Legendre nodes and weights on [a, b].
void gauss_legendre(std::size_t n, double a, double b, std::vector<double>& x,
                    std::vector<double>& w);

}  // namespace jointde
