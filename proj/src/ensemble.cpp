#include <cmath>
#include <stdexcept>

#include "chain_kernels.hpp"
#include "jointde/samplers.hpp"

namespace jointde {

namespace detail {

DrawRecorder::DrawRecorder(ChainDraws& out, const ChainConfig& cfg, std::size_t K)
    : out_(out), traces_(cfg.keep_traces) {
  out_.K = K;
  out_.sum_c.assign(K, 0.0);
  out_.sum_theta.assign(K, 0.0);
  out_.sum_w.assign(K, 0.0);
  if (traces_) {
    const auto n = cfg.retained_per_chain();
    out_.c_trace.reserve(n * K);
    out_.pi_trace.reserve(n);
    if (cfg.record_expression) {
      out_.theta_trace.reserve(n * K);
      out_.w_trace.reserve(n * K);
    }
  }
}

void DrawRecorder::record(std::span<const std::uint8_t> c, const ExpressionPair* e, double pi) {
  ++out_.n_draws;
  for (std::size_t k = 0; k < out_.K; ++k) out_.sum_c[k] += c[k];
  if (e) {
    for (std::size_t k = 0; k < out_.K; ++k) {
      out_.sum_theta[k] += e->theta[k];
      out_.sum_w[k] += e->w[k];
    }
  }
  if (!traces_) return;
  out_.c_trace.insert(out_.c_trace.end(), c.begin(), c.end());
  out_.pi_trace.push_back(pi);
  if (e) {
    out_.theta_trace.insert(out_.theta_trace.end(), e->theta.begin(), e->theta.end());
    out_.w_trace.insert(out_.w_trace.end(), e->w.begin(), e->w.end());
  }
}

}  // namespace detail

bool chain_starts_all_de(const ChainConfig& cfg, std::size_t chain_id) {
  switch (cfg.init) {
    case InitMode::AllEqual:
      return false;
    case InitMode::AllDe:
      return true;
    case InitMode::Split:
      break;
  }
  return chain_id >= (cfg.n_chains + 1) / 2;
}

ChainDraws run_chain(const AugmentedCluster& cl, const ChainConfig& cfg, std::size_t chain_id) {
  cfg.validate();
  const std::size_t K = cl.size();
  if (K == 0) throw std::invalid_argument("empty cluster");
  cl.prior.validate(K);
  // A single component cannot be DE.
  const bool all_de = chain_starts_all_de(cfg, chain_id) && K >= 2;
  const StateVector init = all_de ? StateVector::all_de(K) : StateVector::all_equal(K);

  Rng rng(stream_seed(cfg.seed, cl.label, chain_id));
  ChainDraws out;
  out.started_all_de = all_de;
  if (cfg.kind == SamplerKind::Collapsed)
    detail::run_collapsed(cl, cfg, init, rng, out);
  else
    detail::run_rjmcmc(cl, cfg, init, rng, out);
  return out;
}

namespace {

std::vector<double> ergodic_mae_trace(const std::vector<ChainDraws>& chains, std::size_t members) {
  std::vector<const ChainDraws*> groups[2];
  for (const auto& ch : chains) {
    if (ch.c_trace.empty()) return {};
    groups[ch.started_all_de ? 1 : 0].push_back(&ch);
  }
  if (groups[0].empty() || groups[1].empty() || members == 0) return {};
  const std::size_t K = chains.front().K;
  const std::size_t n = chains.front().n_draws;
  std::vector<double> running[2] = {std::vector<double>(members, 0.0),
                                    std::vector<double>(members, 0.0)};
  std::vector<double> trace(n);
  for (std::size_t t = 0; t < n; ++t) {
    for (int g = 0; g < 2; ++g)
      for (const auto* ch : groups[g])
        for (std::size_t k = 0; k < members; ++k) running[g][k] += ch->c_trace[t * K + k];
    double mae = 0.0;
    const double d0 = static_cast<double>(groups[0].size() * (t + 1));
    const double d1 = static_cast<double>(groups[1].size() * (t + 1));
    for (std::size_t k = 0; k < members; ++k)
      mae += std::abs(running[0][k] / d0 - running[1][k] / d1);
    trace[t] = mae / static_cast<double>(members);
  }
  return trace;
}

}  // namespace

EnsembleSummary run_ensemble(const AugmentedCluster& cl, const ChainConfig& cfg) {
  cfg.validate();
  const std::size_t K = cl.size();
  EnsembleSummary s;
  s.chains.reserve(cfg.n_chains);
  for (std::size_t ch = 0; ch < cfg.n_chains; ++ch) s.chains.push_back(run_chain(cl, cfg, ch));

  s.p_de.assign(K, 0.0);
  s.theta_mean.assign(K, 0.0);
  s.w_mean.assign(K, 0.0);
  std::size_t proposed = 0, accepted = 0;
  for (const auto& ch : s.chains) {
    s.retained_draws += ch.n_draws;
    for (std::size_t k = 0; k < K; ++k) {
      s.p_de[k] += ch.sum_c[k];
      s.theta_mean[k] += ch.sum_theta[k];
      s.w_mean[k] += ch.sum_w[k];
    }
    proposed += ch.rj_proposed;
    accepted += ch.rj_accepted;
  }
  if (s.retained_draws > 0) {
    const double n = static_cast<double>(s.retained_draws);
    for (std::size_t k = 0; k < K; ++k) {
      s.p_de[k] /= n;
      s.theta_mean[k] /= n;
      s.w_mean[k] /= n;
    }
  }
  if (cfg.kind == SamplerKind::RjMcmc && proposed > 0)
    s.rj_acceptance = static_cast<double>(accepted) / static_cast<double>(proposed);
  s.ergodic_mae = ergodic_mae_trace(s.chains, cl.members.size());
  return s;
}

}  // namespace jointde
