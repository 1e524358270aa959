#include "jointde/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

#include "jointde/distributions.hpp"

namespace jointde {

namespace {

/// log E[prod x_k^{m_k}] for x ~ Dirichlet(a).
double log_dirichlet_moment(const std::vector<double>& a, const std::vector<double>& m) {
  double sa = 0.0, sm = 0.0, out = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    sa += a[k];
    sm += m[k];
    out += log_gamma(a[k] + m[k]) - log_gamma(a[k]);
  }
  return out + log_gamma(sa) - log_gamma(sa + sm);
}

double log_marginal_counts(const PriorConfig& prior, const StateVector& c,
                           std::span<const std::int64_t> na, std::span<const std::int64_t> nb) {
  const std::size_t K = c.size();
  std::vector<double> outer_a, outer_m, alive_a, alive_m, gam, gam_m;
  double agg_alpha = 0.0, agg_m = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    const double a = static_cast<double>(na[k]);
    const double b = static_cast<double>(nb[k]);
    if (c.is_de(k)) {
      agg_alpha += prior.alpha[k];
      agg_m += a + b;
      alive_a.push_back(prior.alpha[k]);
      alive_m.push_back(a);
      gam.push_back(prior.gamma[gam.size()]);
      gam_m.push_back(b);
    } else {
      outer_a.push_back(prior.alpha[k]);
      outer_m.push_back(a + b);
    }
  }
  if (c.num_de() == 0) return log_dirichlet_moment(outer_a, outer_m);
  outer_a.push_back(agg_alpha);
  outer_m.push_back(agg_m);
  return log_dirichlet_moment(outer_a, outer_m) + log_dirichlet_moment(alive_a, alive_m) +
         log_dirichlet_moment(gam, gam_m);
}

void pinned_counts(const AugmentedCluster& m, std::vector<std::int64_t>& na,
                   std::vector<std::int64_t>& nb) {
  na.assign(m.size(), 0);
  nb.assign(m.size(), 0);
  if (m.has_pseudo) {
    na[m.pseudo_index()] = static_cast<std::int64_t>(m.pinned_a);
    nb[m.pseudo_index()] = static_cast<std::int64_t>(m.pinned_b);
  }
}

std::vector<StateVector> valid_states(std::size_t K) {
  std::vector<StateVector> out;
  for (std::uint32_t mask = 0; mask < (1u << K); ++mask) {
    std::vector<std::uint8_t> f(K);
    std::size_t n = 0;
    for (std::size_t k = 0; k < K; ++k) n += f[k] = (mask >> k) & 1u;
    if (n != 1) out.emplace_back(std::move(f));
  }
  return out;
}

}  // namespace

void gauss_legendre(std::size_t n, double a, double b, std::vector<double>& x,
                    std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const double nd = static_cast<double>(n);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (nd + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = z;
      for (std::size_t j = 2; j <= n; ++j) {
        const double jd = static_cast<double>(j);
        const double p2 = ((2.0 * jd - 1.0) * z * p1 - (jd - 1.0) * p0) / jd;
        p0 = p1;
        p1 = p2;
      }
      dp = nd * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    const double half = 0.5 * (b - a), mid = 0.5 * (b + a);
    const double wi = 2.0 / ((1.0 - z * z) * dp * dp) * half;
    x[i] = mid - half * z;
    x[n - 1 - i] = mid + half * z;
    w[i] = w[n - 1 - i] = wi;
  }
}

double state_prior_weight(std::size_t c_plus, std::size_t K, const DePrior& prior,
                          std::size_t nodes) {
  if (prior.is_fixed()) return std::exp(state_prior_logprob(c_plus, K, prior.pi));
  if (c_plus == 1 || c_plus > K) throw std::invalid_argument("invalid c_+");
  // pi = sin^2(phi) removes the endpoint singularities of Beta(1/2, 1/2).
  std::vector<double> x, w;
  gauss_legendre(nodes, 0.0, std::numbers::pi / 2.0, x, w);
  const double kd = static_cast<double>(K);
  const double cp = static_cast<double>(c_plus);
  double total = 0.0;
  for (std::size_t i = 0; i < nodes; ++i) {
    const double s = std::sin(x[i]), co = std::cos(x[i]);
    const double p = s * s;
    const double norm = 1.0 - kd * p * std::pow(1.0 - p, kd - 1.0);
    total += w[i] * std::pow(s, 2.0 * cp) * std::pow(co, 2.0 * (kd - cp)) / norm;
  }
  return total * 2.0 / std::numbers::pi;
}

double log_joint_allocation(const AugmentedCluster& model, const StateVector& c,
                            std::span<const std::uint32_t> xi, std::span<const std::uint32_t> z) {
  if (xi.size() != model.reads_a.size() || z.size() != model.reads_b.size())
    throw std::invalid_argument("allocation length mismatch");
  std::vector<std::int64_t> na, nb;
  pinned_counts(model, na, nb);
  double logf = 0.0;
  auto tally = [&](const ReadTable& reads, std::span<const std::uint32_t> alloc,
                   std::vector<std::int64_t>& n) {
    for (std::size_t i = 0; i < reads.size(); ++i) {
      const auto r = reads[i];
      const auto it = std::find(r.targets.begin(), r.targets.end(), alloc[i]);
      if (it == r.targets.end()) throw std::invalid_argument("allocation outside alignment list");
      logf += std::log(r.probs[static_cast<std::size_t>(it - r.targets.begin())]);
      ++n[alloc[i]];
    }
  };
  tally(model.reads_a, xi, na);
  tally(model.reads_b, z, nb);
  return log_marginal_counts(model.prior, c, na, nb) + logf;
}

OracleResult brute_force_posterior(const AugmentedCluster& model, const OracleBudget& budget) {
  const std::size_t K = model.size();
  if (K > budget.max_components || model.reads_a.size() + model.reads_b.size() > budget.max_reads)
    throw std::length_error("model exceeds the enumeration budget");
  model.prior.validate(K);

  // Sum of prod f over allocations, grouped by their count vectors.
  std::map<std::vector<std::int64_t>, double> by_counts;
  std::vector<std::int64_t> na, nb;
  pinned_counts(model, na, nb);
  std::vector<std::int64_t> key(2 * K);
  std::vector<std::pair<const ReadTable*, std::size_t>> reads;
  for (std::size_t i = 0; i < model.reads_a.size(); ++i) reads.push_back({&model.reads_a, i});
  for (std::size_t i = 0; i < model.reads_b.size(); ++i) reads.push_back({&model.reads_b, i});
  const std::size_t n_a = model.reads_a.size();

  auto recurse = [&](auto&& self, std::size_t r, double prod) -> void {
    if (r == reads.size()) {
      for (std::size_t k = 0; k < K; ++k) {
        key[k] = na[k];
        key[K + k] = nb[k];
      }
      by_counts[key] += prod;
      return;
    }
    const auto view = (*reads[r].first)[reads[r].second];
    auto& n = r < n_a ? na : nb;
    for (std::size_t a = 0; a < view.size(); ++a) {
      ++n[view.targets[a]];
      self(self, r + 1, prod * view.probs[a]);
      --n[view.targets[a]];
    }
  };
  recurse(recurse, 0, 1.0);

  OracleResult res;
  res.states = valid_states(K);
  res.state_prob.assign(res.states.size(), 0.0);
  res.p_de.assign(K, 0.0);
  res.theta_mean.assign(K, 0.0);
  res.w_mean.assign(K, 0.0);

  struct Term {
    std::size_t state;
    const std::vector<std::int64_t>* counts;
    double logw;
  };
  std::vector<Term> terms;
  double mx = -INFINITY;
  for (std::size_t s = 0; s < res.states.size(); ++s) {
    const auto& c = res.states[s];
    const double lp = std::log(state_prior_weight(c.num_de(), K, model.prior.de_prior));
    for (const auto& [cnt, sumf] : by_counts) {
      const std::span<const std::int64_t> all(cnt);
      const double lw =
          lp + std::log(sumf) + log_marginal_counts(model.prior, c, all.first(K), all.subspan(K));
      terms.push_back({s, &cnt, lw});
      mx = std::max(mx, lw);
    }
  }
  double z = 0.0;
  for (const auto& t : terms) z += std::exp(t.logw - mx);

  for (const auto& t : terms) {
    const double p = std::exp(t.logw - mx) / z;
    const auto& c = res.states[t.state];
    const std::int64_t* a = t.counts->data();
    const std::int64_t* b = a + K;
    res.state_prob[t.state] += p;

    double total = 0.0, alive_num = 0.0, alive_a = 0.0, alive_g = 0.0;
    std::size_t rank = 0;
    for (std::size_t k = 0; k < K; ++k) {
      total += model.prior.alpha[k] + static_cast<double>(a[k] + b[k]);
      if (c.is_de(k)) {
        alive_num += model.prior.alpha[k] + static_cast<double>(a[k] + b[k]);
        alive_a += model.prior.alpha[k] + static_cast<double>(a[k]);
        alive_g += model.prior.gamma[rank++] + static_cast<double>(b[k]);
      }
    }
    const double mass = alive_num / total;
    rank = 0;
    for (std::size_t k = 0; k < K; ++k) {
      if (c.is_de(k)) {
        res.p_de[k] += p;
        res.theta_mean[k] += p * mass * (model.prior.alpha[k] + static_cast<double>(a[k])) / alive_a;
        res.w_mean[k] +=
            p * mass * (model.prior.gamma[rank++] + static_cast<double>(b[k])) / alive_g;
      } else {
        const double m = (model.prior.alpha[k] + static_cast<double>(a[k] + b[k])) / total;
        res.theta_mean[k] += p * m;
        res.w_mean[k] += p * m;
      }
    }
  }
  return res;
}

}  // namespace jointde
