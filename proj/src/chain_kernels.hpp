#pragma once

#include <span>

#include "jointde/samplers.hpp"

namespace jointde::detail {

class DrawRecorder {
public:
  DrawRecorder(ChainDraws& out, const ChainConfig& cfg, std::size_t K);
  void record(std::span<const std::uint8_t> c, const ExpressionPair* e, double pi);

private:
  ChainDraws& out_;
  bool traces_;
};

/// Picks an unordered pair uniformly.
std::pair<std::size_t, std::size_t> random_pair(std::size_t K, Rng& rng);

/// exp-normalizes log weights in place and draws an index.
std::size_t draw_from_log_weights(std::span<double> logw, Rng& rng);

void run_collapsed(const AugmentedCluster& cl, const ChainConfig& cfg, const StateVector& init,
                   Rng& rng, ChainDraws& out);
void run_rjmcmc(const AugmentedCluster& cl, const ChainConfig& cfg, const StateVector& init,
                Rng& rng, ChainDraws& out);

}  // namespace jointde::detail
