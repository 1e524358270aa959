#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "chain_kernels.hpp"
#include "jointde/samplers.hpp"
#include "sampler_util.hpp"

namespace jointde {

RjMoveProbs rj_move_probabilities(std::size_t c_plus, std::size_t K) {
  if (K < 2) throw std::invalid_argument("trans-dimensional moves need at least two components");
  if (c_plus == 1 || c_plus > K) throw std::invalid_argument("invalid c_+");
  const double kd = static_cast<double>(K);
  RjMoveProbs p;
  if (c_plus == 0)
    p.birth = 2.0 / (kd * (kd - 1.0));
  else if (c_plus < K)
    p.birth = 1.0 / kd;
  if (c_plus == 2)
    p.death = 2.0 / kd;
  else if (c_plus >= 3)
    p.death = 1.0 / kd;
  return p;
}

RjBirth rj_birth_transform(std::span<const double> v, double delta, std::size_t j) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::domain_error("delta must lie in (0,1)");
  RjBirth out;
  if (v.empty()) {
    out.v = {delta, 1.0 - delta};
    return out;
  }
  if (v.size() < 2) throw std::invalid_argument("v must be empty or have at least two entries");
  if (j > v.size()) throw std::out_of_range("insertion slot out of range");
  const double scale = 1.0 - delta;
  out.v.reserve(v.size() + 1);
  for (std::size_t l = 0; l < v.size(); ++l) {
    if (l == j) out.v.push_back(delta);
    out.v.push_back(v[l] * scale);
  }
  if (j == v.size()) out.v.push_back(delta);
  out.log_jacobian = static_cast<double>(v.size() - 1) * std::log1p(-delta);
  return out;
}

RjDeath rj_death_transform(std::span<const double> v, std::size_t j) {
  if (v.size() < 2) throw std::invalid_argument("death needs at least two alive components");
  if (j >= v.size()) throw std::out_of_range("removal slot out of range");
  RjDeath out;
  if (v.size() == 2) {
    out.delta = v[0];
    return out;
  }
  out.delta = v[j];
  const double scale = 1.0 - out.delta;
  out.v.reserve(v.size() - 1);
  for (std::size_t l = 0; l < v.size(); ++l)
    if (l != j) out.v.push_back(v[l] / scale);
  return out;
}

namespace {

void finish_proposal(RjProposal& prop, const ExpressionPair& e) {
  const auto sets = dead_alive_sets(prop.c);
  prop.fp.u.resize(prop.c.size());
  for (std::size_t p = 0; p < prop.c.size(); ++p) prop.fp.u[p] = e.theta[sets.tau[p]];
  prop.expr = map_free_to_expression(prop.c, sets, prop.fp);
}

std::size_t rank_below(const StateVector& c, std::size_t k) {
  std::size_t r = 0;
  for (std::size_t q = 0; q < k; ++q) r += c.is_de(q);
  return r;
}

}  // namespace

RjProposal rj_propose_birth(const StateVector& c, const ExpressionPair& e, const FreeParams& fp,
                            std::size_t k0, std::size_t k1, double delta) {
  std::vector<std::uint8_t> flags(c.flags().begin(), c.flags().end());
  if (k0 >= c.size() || flags[k0]) throw std::invalid_argument("birth target must be dead");
  RjProposal prop;
  prop.kind = MoveKind::Birth;
  prop.delta = delta;
  flags[k0] = 1;
  if (c.num_de() == 0) {
    if (k1 >= c.size() || k1 == k0) throw std::invalid_argument("pair birth needs two components");
    flags[k1] = 1;
    const auto b = rj_birth_transform({}, delta, 0);
    prop.fp.v = b.v;
  } else {
    const auto b = rj_birth_transform(fp.v, delta, rank_below(c, k0));
    prop.fp.v = b.v;
    prop.log_jacobian = b.log_jacobian;
  }
  prop.c = StateVector(std::move(flags));
  finish_proposal(prop, e);
  return prop;
}

RjProposal rj_propose_death(const StateVector& c, const ExpressionPair& e, const FreeParams& fp,
                            std::size_t k0) {
  std::vector<std::uint8_t> flags(c.flags().begin(), c.flags().end());
  if (k0 >= c.size() || !flags[k0]) throw std::invalid_argument("death target must be alive");
  RjProposal prop;
  prop.kind = MoveKind::Death;
  const auto d = rj_death_transform(fp.v, rank_below(c, k0));
  prop.delta = d.delta;
  prop.fp.v = d.v;
  if (c.num_de() == 2)
    std::fill(flags.begin(), flags.end(), 0);
  else
    flags[k0] = 0;
  if (!prop.fp.v.empty())
    prop.log_jacobian = static_cast<double>(prop.fp.v.size() - 1) * std::log1p(-prop.delta);
  prop.c = StateVector(std::move(flags));
  finish_proposal(prop, e);
  return prop;
}

double proposal_logpdf(double delta, std::span<const double> betas) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::domain_error("delta must lie in (0,1)");
  // Beta(1, b) density is b (1 - delta)^(b - 1).
  double mx = -INFINITY;
  std::vector<double> terms(betas.size());
  for (std::size_t j = 0; j < betas.size(); ++j) {
    terms[j] = std::log(betas[j]) + (betas[j] - 1.0) * std::log1p(-delta);
    mx = std::max(mx, terms[j]);
  }
  double s = 0.0;
  for (double t : terms) s += std::exp(t - mx);
  return mx + std::log(s / static_cast<double>(betas.size()));
}

double sample_proposal(std::span<const double> betas, Rng& rng) {
  const double b = betas[detail::uniform_index(rng, betas.size())];
  return sample_beta(1.0, b, rng);
}

double marginal_loglik(const ReadTable& reads, std::span<const std::int64_t> fixed,
                       std::span<const std::uint32_t> multi, std::span<const double> weights) {
  double out = 0.0;
  for (std::size_t k = 0; k < fixed.size(); ++k)
    if (fixed[k]) out += static_cast<double>(fixed[k]) * std::log(weights[k]);
  for (auto i : multi) {
    const auto r = reads[i];
    double s = 0.0;
    for (std::size_t a = 0; a < r.size(); ++a) s += weights[r.targets[a]] * r.probs[a];
    out += std::log(s);
  }
  return out;
}

namespace {

double loglik_difference(const ReadTable& reads, std::span<const std::int64_t> fixed,
                         std::span<const std::uint32_t> multi, std::span<const double> w_new,
                         std::span<const double> w_old) {
  double out = 0.0;
  for (std::size_t k = 0; k < fixed.size(); ++k)
    if (fixed[k] && w_new[k] != w_old[k])
      out += static_cast<double>(fixed[k]) * (std::log(w_new[k]) - std::log(w_old[k]));
  for (auto i : multi) {
    const auto r = reads[i];
    double s_new = 0.0, s_old = 0.0;
    for (std::size_t a = 0; a < r.size(); ++a) {
      s_new += w_new[r.targets[a]] * r.probs[a];
      s_old += w_old[r.targets[a]] * r.probs[a];
    }
    if (s_new != s_old) out += std::log(s_new / s_old);
  }
  return out;
}

double v_prior_logpdf(std::span<const double> v, const PriorConfig& prior) {
  if (v.empty()) return 0.0;
  return dirichlet_logpdf(v, std::span(prior.gamma).first(v.size()));
}

}  // namespace

double rj_acceptance_log_ratio(const AugmentedCluster& cl, const ReadSummary& rs,
                               const StateVector& c, const FreeParams& fp, const ExpressionPair& e,
                               const RjProposal& prop, double pi, std::span<const double> betas) {
  const bool birth = prop.kind == MoveKind::Birth;
  const StateVector& c_small = birth ? c : prop.c;
  const StateVector& c_large = birth ? prop.c : c;
  const FreeParams& fp_small = birth ? fp : prop.fp;
  const FreeParams& fp_large = birth ? prop.fp : fp;
  const ExpressionPair& e_small = birth ? e : prop.expr;
  const ExpressionPair& e_large = birth ? prop.expr : e;
  const std::size_t K = c.size();

  double log_a = loglik_difference(cl.reads_b, rs.fixed_b, rs.multi_b, e_large.w, e_small.w);
  if (e_large.theta != e_small.theta)
    log_a += loglik_difference(cl.reads_a, rs.fixed_a, rs.multi_a, e_large.theta, e_small.theta);
  const double dc = static_cast<double>(c_large.num_de() - c_small.num_de());
  log_a += dc * (std::log(pi) - std::log1p(-pi));
  log_a += v_prior_logpdf(fp_large.v, cl.prior) - v_prior_logpdf(fp_small.v, cl.prior);
  log_a += prop.log_jacobian;
  log_a += std::log(rj_move_probabilities(c_large.num_de(), K).death) -
           std::log(rj_move_probabilities(c_small.num_de(), K).birth);
  log_a -= proposal_logpdf(prop.delta, betas);
  return birth ? log_a : -log_a;
}

namespace detail {

namespace {

class RjChain {
public:
  RjChain(const AugmentedCluster& cl, const ChainConfig& cfg, const StateVector& init, Rng& rng)
      : cl_(cl), cfg_(cfg), rs_(cl), prior_(cl.prior), K_(cl.size()), rng_(rng), c_(init) {
    sets_ = dead_alive_sets(c_);
    fp_ = sample_uv_prior(c_, sets_, prior_, rng_);
    e_ = map_free_to_expression(c_, sets_, fp_);
    pi_ = prior_.de_prior.is_fixed() ? prior_.de_prior.pi : 0.5;
    st_.xi.resize(cl_.reads_a.size());
    st_.z.resize(cl_.reads_b.size());
    for (std::size_t i = 0; i < cl_.reads_a.size(); ++i) st_.xi[i] = cl_.reads_a[i].targets[0];
    for (std::size_t i = 0; i < cl_.reads_b.size(); ++i) st_.z[i] = cl_.reads_b[i].targets[0];
  }

  void run(ChainDraws& out) {
    DrawRecorder rec(out, cfg_, K_);
    for (std::size_t it = 1; it <= cfg_.iterations; ++it) {
      allocate(cl_.reads_a, rs_.multi_a, rs_.fixed_a, e_.theta, st_.xi, st_.count_a);
      allocate(cl_.reads_b, rs_.multi_b, rs_.fixed_b, e_.w, st_.z, st_.count_b);
      if (cfg_.audit_every && it % cfg_.audit_every == 0) {
        st_.audit(cl_);
        ++out.audits;
      }
      fp_ = sample_uv_conditional(st_.count_a, st_.count_b, c_, sets_, prior_, rng_);
      e_ = map_free_to_expression(c_, sets_, fp_);
      if (K_ >= 2) {
        ++out.rj_proposed;
        if (move()) ++out.rj_accepted;
      }
      if (!prior_.de_prior.is_fixed()) pi_ = update_pi(pi_, c_.num_de(), K_, rng_);
      if (cfg_.retained(it)) rec.record(c_.flags(), &e_, pi_);
    }
  }

private:
  void allocate(const ReadTable& reads, const std::vector<std::uint32_t>& multi,
                const std::vector<std::int64_t>& fixed, const std::vector<double>& weights,
                std::vector<std::uint32_t>& alloc, std::vector<std::int64_t>& counts) {
    counts = fixed;
    for (auto i : multi) {
      const auto r = reads[i];
      buf_.resize(r.size());
      double total = 0.0;
      for (std::size_t a = 0; a < r.size(); ++a) {
        buf_[a] = weights[r.targets[a]] * r.probs[a];
        total += buf_[a];
      }
      const auto k = r.targets[draw_categorical(buf_, total, rng_)];
      alloc[i] = k;
      ++counts[k];
    }
  }

  bool move() {
    const std::size_t k0 = uniform_index(rng_, K_);
    RjProposal prop;
    if (c_.num_de() == 0) {
      std::size_t k1 = uniform_index(rng_, K_ - 1);
      if (k1 >= k0) ++k1;
      prop = rj_propose_birth(c_, e_, fp_, k0, k1, sample_proposal(cfg_.proposal_betas, rng_));
    } else if (!c_.is_de(k0)) {
      prop = rj_propose_birth(c_, e_, fp_, k0, 0, sample_proposal(cfg_.proposal_betas, rng_));
    } else {
      prop = rj_propose_death(c_, e_, fp_, k0);
    }
    const double log_a =
        rj_acceptance_log_ratio(cl_, rs_, c_, fp_, e_, prop, pi_, cfg_.proposal_betas);
    if (log_a < 0.0 && !(std::log(sample_uniform(rng_)) < log_a)) return false;
    c_ = std::move(prop.c);
    fp_ = std::move(prop.fp);
    e_ = std::move(prop.expr);
    sets_ = dead_alive_sets(c_);
    return true;
  }

  const AugmentedCluster& cl_;
  const ChainConfig& cfg_;
  ReadSummary rs_;
  const PriorConfig& prior_;
  std::size_t K_;
  Rng& rng_;
  StateVector c_;
  DeadAliveSets sets_;
  FreeParams fp_;
  ExpressionPair e_;
  AllocationState st_;
  double pi_ = 0.5;
  std::vector<double> buf_;
};

}  // namespace

void run_rjmcmc(const AugmentedCluster& cl, const ChainConfig& cfg, const StateVector& init,
                Rng& rng, ChainDraws& out) {
  RjChain chain(cl, cfg, init, rng);
  chain.run(out);
}

}  // namespace detail

}  // namespace jointde
