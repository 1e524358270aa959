#include <cmath>
#include <stdexcept>
#include <string>

#include "jointde/samplers.hpp"
#include "sampler_util.hpp"

namespace jointde {

void ChainConfig::validate() const {
  if (n_chains < 1) throw std::invalid_argument("at least one chain is required");
  if (burnin >= iterations) throw std::invalid_argument("burn-in must be smaller than iterations");
  if (thin < 1) throw std::invalid_argument("thinning interval must be at least 1");
  if (proposal_betas.empty()) throw std::invalid_argument("empty proposal mixture");
  for (double b : proposal_betas)
    if (!(b > 0.0)) throw std::invalid_argument("proposal Beta shapes must be positive");
}

ReadSummary::ReadSummary(const AugmentedCluster& cl)
    : fixed_a(cl.size(), 0), fixed_b(cl.size(), 0) {
  auto scan = [](const ReadTable& reads, std::vector<std::uint32_t>& multi,
                 std::vector<std::int64_t>& fixed) {
    for (std::uint32_t i = 0; i < reads.size(); ++i) {
      const auto r = reads[i];
      if (r.size() == 1)
        ++fixed[r.targets[0]];
      else
        multi.push_back(i);
    }
  };
  scan(cl.reads_a, multi_a, fixed_a);
  scan(cl.reads_b, multi_b, fixed_b);
  if (cl.has_pseudo) {
    fixed_a[cl.pseudo_index()] += static_cast<std::int64_t>(cl.pinned_a);
    fixed_b[cl.pseudo_index()] += static_cast<std::int64_t>(cl.pinned_b);
  }
}

void AllocationState::audit(const AugmentedCluster& cl) const {
  std::vector<std::int64_t> a(cl.size(), 0), b(cl.size(), 0);
  for (auto k : xi) ++a[k];
  for (auto k : z) ++b[k];
  if (cl.has_pseudo) {
    a[cl.pseudo_index()] += static_cast<std::int64_t>(cl.pinned_a);
    b[cl.pseudo_index()] += static_cast<std::int64_t>(cl.pinned_b);
  }
  if (a != count_a || b != count_b)
    throw std::logic_error("allocation counts diverged from the allocation vectors in cluster " +
                           std::to_string(cl.label + 1));
}

std::vector<double> allocation_probs(std::span<const double> weights, const ReadView& read) {
  std::vector<double> p(read.size());
  double total = 0.0;
  for (std::size_t a = 0; a < read.size(); ++a) {
    p[a] = weights[read.targets[a]] * read.probs[a];
    total += p[a];
  }
  if (!(total > 0.0)) throw std::runtime_error("read with zero total alignment mass");
  for (double& x : p) x /= total;
  return p;
}

namespace {

void draw_condition(const ReadTable& reads, std::span<const double> weights,
                    std::vector<std::uint32_t>& alloc, std::vector<std::int64_t>& counts,
                    Rng& rng) {
  alloc.resize(reads.size());
  std::vector<double> buf;
  for (std::size_t i = 0; i < reads.size(); ++i) {
    const auto r = reads[i];
    if (r.size() == 1) {
      alloc[i] = r.targets[0];
    } else {
      buf.resize(r.size());
      double total = 0.0;
      for (std::size_t a = 0; a < r.size(); ++a) {
        buf[a] = weights[r.targets[a]] * r.probs[a];
        total += buf[a];
      }
      if (!(total > 0.0)) throw std::runtime_error("read with zero total alignment mass");
      alloc[i] = r.targets[detail::draw_categorical(buf, total, rng)];
    }
    ++counts[alloc[i]];
  }
}

}  // namespace

AllocationState gibbs_allocations(const ExpressionPair& e, const AugmentedCluster& cl, Rng& rng) {
  AllocationState st;
  st.count_a.assign(cl.size(), 0);
  st.count_b.assign(cl.size(), 0);
  if (cl.has_pseudo) {
    st.count_a[cl.pseudo_index()] = static_cast<std::int64_t>(cl.pinned_a);
    st.count_b[cl.pseudo_index()] = static_cast<std::int64_t>(cl.pinned_b);
  }
  draw_condition(cl.reads_a, e.theta, st.xi, st.count_a, rng);
  draw_condition(cl.reads_b, e.w, st.z, st.count_b, rng);
  return st;
}

UVConditional uv_conditional_params(std::span<const std::int64_t> count_a,
                                    std::span<const std::int64_t> count_b, const StateVector& c,
                                    const DeadAliveSets& sets, const PriorConfig& prior) {
  const std::size_t K = c.size();
  if (count_a.size() != K || count_b.size() != K || prior.alpha.size() != K)
    throw std::invalid_argument("count or prior dimension mismatch");
  const std::size_t k_star = sets.num_dead();

  std::vector<double> a(K);
  double alive_b = 0.0;
  for (std::size_t p = 0; p < K; ++p) {
    const auto k = sets.tau[p];
    a[p] = prior.alpha[k] + static_cast<double>(count_a[k]);
    if (p < k_star)
      a[p] += static_cast<double>(count_b[k]);
    else
      alive_b += static_cast<double>(count_b[k]);
  }

  UVConditional out;
  if (K > 1) {
    out.u.a.resize(K - 1);
    out.u.b.resize(K - 1);
    double tail = a[K - 1];
    for (std::size_t p = K - 1; p-- > 0;) {
      out.u.a[p] = a[p];
      out.u.b[p] = tail + (p < k_star ? alive_b : 0.0);
      tail += a[p];
    }
  }
  out.v.resize(c.num_de());
  for (std::size_t l = 0; l < out.v.size(); ++l)
    out.v[l] = prior.gamma[l] + static_cast<double>(count_b[sets.alive[l]]);
  return out;
}

FreeParams sample_uv_conditional(std::span<const std::int64_t> count_a,
                                 std::span<const std::int64_t> count_b, const StateVector& c,
                                 const DeadAliveSets& sets, const PriorConfig& prior, Rng& rng) {
  const auto par = uv_conditional_params(count_a, count_b, c, sets, prior);
  FreeParams fp;
  fp.u.resize(c.size());
  if (c.size() == 1)
    fp.u[0] = 1.0;
  else
    sample_gd_into(par.u, rng, fp.u);
  fp.v.resize(par.v.size());
  if (!par.v.empty()) sample_dirichlet_into(par.v, rng, fp.v);
  return fp;
}

FreeParams sample_uv_prior(const StateVector& c, const DeadAliveSets& sets,
                           const PriorConfig& prior, Rng& rng) {
  std::vector<double> a(c.size());
  for (std::size_t p = 0; p < c.size(); ++p) a[p] = prior.alpha[sets.tau[p]];
  FreeParams fp;
  fp.u = sample_dirichlet(a, rng);
  fp.v = sample_dirichlet(std::span(prior.gamma).first(c.num_de()), rng);
  return fp;
}

double update_pi(double pi, std::size_t c_plus, std::size_t K, Rng& rng) {
  const auto [a, b] = pi_posterior_params(c_plus, K);
  const double prop = sample_beta(a, b, rng);
  const double log_ratio =
      state_prior_log_normalizer(K, pi) - state_prior_log_normalizer(K, prop);
  if (log_ratio >= 0.0 || std::log(sample_uniform(rng)) < log_ratio) return prop;
  return pi;
}

}  // namespace jointde
