#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "../test_util.hpp"
#include "../toy.hpp"
#include "jointde/oracle.hpp"
#include "jointde/samplers.hpp"

using namespace jointde;

namespace {

ReadTable one_read(std::vector<std::uint32_t> t, std::vector<double> p) {
  ReadTable r;
  r.add_read(t, p);
  return r;
}

StateVector random_state(std::size_t K, Rng& rng) {
  for (;;) {
    std::vector<std::uint8_t> f(K);
    std::size_t n = 0;
    for (auto& x : f) n += x = rng() % 2;
    if (n != 1) return StateVector(f);
  }
}

AllocationState random_allocation(const AugmentedCluster& m, Rng& rng) {
  AllocationState st;
  st.count_a.assign(m.size(), 0);
  st.count_b.assign(m.size(), 0);
  if (m.has_pseudo) {
    st.count_a[m.pseudo_index()] = static_cast<std::int64_t>(m.pinned_a);
    st.count_b[m.pseudo_index()] = static_cast<std::int64_t>(m.pinned_b);
  }
  for (std::size_t i = 0; i < m.reads_a.size(); ++i) {
    const auto r = m.reads_a[i];
    st.xi.push_back(r.targets[rng() % r.size()]);
    ++st.count_a[st.xi.back()];
  }
  for (std::size_t i = 0; i < m.reads_b.size(); ++i) {
    const auto r = m.reads_b[i];
    st.z.push_back(r.targets[rng() % r.size()]);
    ++st.count_b[st.z.back()];
  }
  return st;
}

std::vector<double> softmax(std::vector<double> x) {
  const double mx = *std::max_element(x.begin(), x.end());
  double s = 0.0;
  for (double& v : x) s += v = std::isinf(v) ? 0.0 : std::exp(v - mx);
  for (double& v : x) v /= s;
  return x;
}

ChainConfig quick_config(SamplerKind kind, std::size_t iters, std::size_t chains = 2) {
  ChainConfig cfg;
  cfg.kind = kind;
  cfg.n_chains = chains;
  cfg.iterations = iters;
  cfg.burnin = iters / 10;
  cfg.thin = 1;
  cfg.keep_traces = false;
  cfg.seed = 17;
  return cfg;
}

}  // namespace

TEST_CASE("allocation probabilities") {
  const std::vector<double> even{0.5, 0.5}, skew{0.9, 0.1};
  const auto r = one_read({0, 1}, {0.2, 0.1});
  auto p = allocation_probs(even, r[0]);
  CHECK(p[0] == doctest::Approx(2.0 / 3.0));
  CHECK(p[1] == doctest::Approx(1.0 / 3.0));
  const auto r2 = one_read({0, 1}, {0.1, 0.9});
  p = allocation_probs(skew, r2[0]);
  CHECK(p[0] == doctest::Approx(0.5));
  const auto r3 = one_read({1}, {0.3});
  CHECK(allocation_probs(skew, r3[0]) == std::vector<double>{1.0});
}

TEST_CASE("gibbs allocations keep counts consistent and singletons fixed") {
  Rng rng(1);
  testutil::ToySpec s;
  s.members = 3;
  s.reads_a = 30;
  s.reads_b = 20;
  s.pseudo = true;
  s.pinned_a = 5;
  s.pinned_b = 7;
  const auto m = testutil::random_toy(s, rng);
  const ExpressionPair e{{0.2, 0.3, 0.1, 0.4}, {0.1, 0.1, 0.5, 0.3}};
  const auto st = gibbs_allocations(e, m, rng);
  CHECK_NOTHROW(st.audit(m));
  CHECK(st.count_a[3] == 5);
  CHECK(st.count_b[3] == 7);
  for (std::size_t i = 0; i < m.reads_a.size(); ++i)
    if (m.reads_a[i].size() == 1) CHECK(st.xi[i] == m.reads_a[i].targets[0]);
  auto broken = st;
  ++broken.count_a[0];
  CHECK_THROWS_AS(broken.audit(m), std::logic_error);
}

TEST_CASE("uv conditional parameters for K=2") {
  const std::vector<std::int64_t> na{3, 1}, nb{2, 2};
  const auto prior = PriorConfig::uniform(2);
  const auto c0 = StateVector::all_equal(2);
  const auto p0 = uv_conditional_params(na, nb, c0, dead_alive_sets(c0), prior);
  REQUIRE(p0.u.dim() == 1);
  CHECK(p0.u.a[0] == 6.0);
  CHECK(p0.u.b[0] == 4.0);
  CHECK(p0.v.empty());
  const auto c1 = StateVector::all_de(2);
  const auto p1 = uv_conditional_params(na, nb, c1, dead_alive_sets(c1), prior);
  CHECK(p1.u.a[0] == 4.0);
  CHECK(p1.u.b[0] == 2.0);
  CHECK(p1.v == std::vector<double>{3.0, 3.0});
}

TEST_CASE("uv conditional equals prior times likelihood up to a constant") {
  Rng rng(2);
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t K = 2 + rng() % 5;
    const auto c = random_state(K, rng);
    const auto sets = dead_alive_sets(c);
    PriorConfig prior = PriorConfig::uniform(K);
    for (auto& a : prior.alpha) a = 0.3 + 2.0 * sample_uniform(rng);
    for (auto& g : prior.gamma) g = 0.3 + 2.0 * sample_uniform(rng);
    std::vector<std::int64_t> na(K), nb(K);
    for (std::size_t k = 0; k < K; ++k) {
      na[k] = static_cast<std::int64_t>(rng() % 6);
      nb[k] = static_cast<std::int64_t>(rng() % 6);
    }
    const auto par = uv_conditional_params(na, nb, c, sets, prior);
    std::vector<double> alpha_tau(K);
    for (std::size_t p = 0; p < K; ++p) alpha_tau[p] = prior.alpha[sets.tau[p]];
    const std::vector<double> gam(prior.gamma.begin(), prior.gamma.begin() + c.num_de());
    double ref = NAN;
    for (int pt = 0; pt < 20; ++pt) {
      FreeParams fp;
      fp.u = sample_dirichlet(std::vector<double>(K, 1.0), rng);
      if (c.num_de()) fp.v = sample_dirichlet(std::vector<double>(c.num_de(), 1.0), rng);
      const auto e = map_free_to_expression(c, sets, fp);
      double target = dirichlet_logpdf(fp.u, alpha_tau);
      if (c.num_de()) target += dirichlet_logpdf(fp.v, gam);
      for (std::size_t k = 0; k < K; ++k)
        target += static_cast<double>(na[k]) * std::log(e.theta[k]) +
                  static_cast<double>(nb[k]) * std::log(e.w[k]);
      double cond = gd_logpdf(fp.u, par.u);
      if (c.num_de()) cond += dirichlet_logpdf(fp.v, par.v);
      if (std::isnan(ref)) ref = cond - target;
      CHECK(cond - target == doctest::Approx(ref).epsilon(1e-9).scale(1.0));
    }
  }
}

TEST_CASE("uv conditional with no reads is the prior") {
  Rng rng(3);
  const auto c = StateVector(std::vector<std::uint8_t>{1, 0, 1, 1});
  const auto sets = dead_alive_sets(c);
  const auto prior = PriorConfig::uniform(4);
  const std::vector<std::int64_t> zero(4, 0);
  double s0 = 0.0, v0 = 0.0;
  const int n = 40000;
  for (int i = 0; i < n; ++i) {
    const auto fp = sample_uv_conditional(zero, zero, c, sets, prior, rng);
    s0 += fp.u[0];
    v0 += fp.v[0];
  }
  CHECK(std::abs(s0 / n - 0.25) < 0.005);
  CHECK(std::abs(v0 / n - 1.0 / 3.0) < 0.005);
}

TEST_CASE("collapsed allocation conditional: dead branch example") {
  AugmentedCluster m;
  m.members = {0, 1};
  m.reads_a = one_read({0, 1}, {0.1, 0.1});
  for (int i = 0; i < 4; ++i) {
    const auto k = static_cast<std::uint32_t>(i < 3 ? 0 : 1);
    m.reads_a.append(one_read({k}, {0.1}));
  }
  for (std::uint32_t k : {0u, 0u, 1u, 1u}) m.reads_b.append(one_read({k}, {0.1}));
  m.prior = PriorConfig::uniform(2);
  AllocationState st;
  st.xi = {0, 0, 0, 0, 1};
  st.z = {0, 0, 1, 1};
  st.count_a = {4, 1};
  st.count_b = {2, 2};
  const auto p = collapsed_allocation_probs(st, m, Condition::A, 0, StateVector::all_equal(2));
  CHECK(p[0] == doctest::Approx(0.6));
  CHECK(p[1] == doctest::Approx(0.4));
}

TEST_CASE("collapsed allocation conditional is uniform under full symmetry") {
  AugmentedCluster m;
  m.members = {0, 1, 2};
  m.reads_a = one_read({0, 1, 2}, {0.2, 0.2, 0.2});
  m.reads_b = one_read({0, 1, 2}, {0.2, 0.2, 0.2});
  m.prior = PriorConfig::uniform(3);
  AllocationState st{{0}, {1}, {1, 0, 0}, {0, 1, 0}};
  for (auto cond : {Condition::A, Condition::B}) {
    const auto p = collapsed_allocation_probs(st, m, cond, 0, StateVector::all_de(3));
    for (double x : p) CHECK(x == doctest::Approx(1.0 / 3.0));
  }
}

TEST_CASE("collapsed conditionals equal ratios of the enumerated joint") {
  Rng rng(4);
  for (int rep = 0; rep < 60; ++rep) {
    testutil::ToySpec s;
    s.pseudo = rep % 2 == 1;
    s.members = s.pseudo ? 2 : 3;
    s.reads_a = 4;
    s.reads_b = 4;
    s.pinned_a = rng() % 5;
    s.pinned_b = rng() % 5;
    const auto m = testutil::random_toy(s, rng);
    for (auto& g : const_cast<AugmentedCluster&>(m).prior.gamma) g = 0.5 + sample_uniform(rng);
    for (auto& a : const_cast<AugmentedCluster&>(m).prior.alpha) a = 0.5 + sample_uniform(rng);
    const auto c = random_state(m.size(), rng);
    const auto st = random_allocation(m, rng);
    for (auto cond : {Condition::A, Condition::B}) {
      const auto& reads = cond == Condition::A ? m.reads_a : m.reads_b;
      for (std::size_t i = 0; i < reads.size(); ++i) {
        const auto p = collapsed_allocation_probs(st, m, cond, i, c);
        std::vector<double> lj;
        for (auto k : reads[i].targets) {
          auto xi = st.xi;
          auto z = st.z;
          (cond == Condition::A ? xi : z)[i] = k;
          lj.push_back(log_joint_allocation(m, c, xi, z));
        }
        const auto ref = softmax(lj);
        for (std::size_t a = 0; a < p.size(); ++a) CHECK(p[a] == doctest::Approx(ref[a]).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("collapsed log joint differences match the enumeration oracle") {
  Rng rng(5);
  for (int rep = 0; rep < 40; ++rep) {
    testutil::ToySpec s;
    s.pseudo = rep % 2 == 0;
    s.members = 3;
    s.reads_a = 5;
    s.reads_b = 3;
    s.pinned_a = 2;
    s.pinned_b = 4;
    const auto m = testutil::random_toy(s, rng);
    const auto st = random_allocation(m, rng);
    const auto c1 = random_state(m.size(), rng), c2 = random_state(m.size(), rng);
    const double mine = collapsed_log_joint(st.count_a, st.count_b, c1, m.prior) -
                        collapsed_log_joint(st.count_a, st.count_b, c2, m.prior);
    const double ref =
        log_joint_allocation(m, c1, st.xi, st.z) - log_joint_allocation(m, c2, st.xi, st.z);
    CHECK(mine == doctest::Approx(ref).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("block weights forbid the c_+ = 1 cells") {
  const auto prior = PriorConfig::uniform(4);
  const std::vector<std::int64_t> na{1, 2, 0, 3}, nb{2, 0, 1, 1};
  // d = 1: the other two contain exactly one DE entry.
  const StateVector d1(std::vector<std::uint8_t>{1, 1, 0, 0});
  auto w = block_log_weights(d1, 0, 2, na, nb, prior, 0.4);
  CHECK(std::isinf(w[0]));
  CHECK(w[0] < 0);
  for (int i = 1; i < 4; ++i) CHECK(std::isfinite(w[i]));
  // d = 0.
  const StateVector d0(std::vector<std::uint8_t>{1, 1, 0, 0});
  w = block_log_weights(d0, 0, 1, na, nb, prior, 0.4);
  CHECK(std::isinf(w[1]));
  CHECK(std::isinf(w[2]));
  CHECK(std::isfinite(w[0]));
  CHECK(std::isfinite(w[3]));
}

TEST_CASE("block conditional equals the enumerated joint over valid cells") {
  Rng rng(6);
  for (int rep = 0; rep < 80; ++rep) {
    testutil::ToySpec s;
    s.pseudo = rep % 3 == 0;
    s.members = 2 + rng() % 3;
    s.reads_a = 3 + rng() % 4;
    s.reads_b = 3 + rng() % 4;
    s.pinned_a = rng() % 4;
    s.pinned_b = rng() % 4;
    const auto m = testutil::random_toy(s, rng);
    const std::size_t K = m.size();
    const double pi = 0.1 + 0.8 * sample_uniform(rng);
    const auto c = random_state(K, rng);
    const auto st = random_allocation(m, rng);
    const std::size_t j1 = rng() % K;
    std::size_t j2 = rng() % (K - 1);
    if (j2 >= j1) ++j2;
    const auto w = block_log_weights(c, j1, j2, st.count_a, st.count_b, m.prior, pi);
    std::vector<double> ref(4);
    for (int cell = 0; cell < 4; ++cell) {
      std::vector<std::uint8_t> f(c.flags().begin(), c.flags().end());
      f[j1] = static_cast<std::uint8_t>(cell >> 1);
      f[j2] = static_cast<std::uint8_t>(cell & 1);
      std::size_t n = 0;
      for (auto x : f) n += x;
      if (n == 1) {
        ref[cell] = -INFINITY;
        continue;
      }
      const StateVector cc(f);
      ref[cell] = log_joint_allocation(m, cc, st.xi, st.z) + state_prior_logprob(cc, pi);
    }
    const auto p = softmax({w.begin(), w.end()});
    const auto q = softmax(ref);
    for (int cell = 0; cell < 4; ++cell) {
      CHECK(p[cell] == doctest::Approx(q[cell]).epsilon(1e-10).scale(1.0));
      if (std::isinf(ref[cell])) CHECK(p[cell] == 0.0);
    }
  }
}

TEST_CASE("pi update leaves the truncated posterior invariant") {
  for (std::size_t cp : {0u, 2u, 5u}) {
    const std::size_t K = 5;
    // Reference mean and CDF by midpoint quadrature in phi, pi = sin^2 phi.
    const int n = 200000;
    std::vector<double> grid(n), dens(n);
    double z = 0.0, m1 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double phi = (i + 0.5) * (M_PI / 2) / n;
      const double p = std::sin(phi) * std::sin(phi);
      const double norm = 1.0 - K * p * std::pow(1.0 - p, K - 1.0);
      dens[i] = std::pow(std::sin(phi), 2.0 * cp) * std::pow(std::cos(phi), 2.0 * (K - cp)) / norm;
      grid[i] = p;
      z += dens[i];
      m1 += dens[i] * p;
    }
    Rng rng(7 + cp);
    double pi = 0.5, s = 0.0;
    const int iters = 200000;
    std::vector<double> draws(iters);
    for (int it = 0; it < iters; ++it) {
      pi = update_pi(pi, cp, K, rng);
      draws[it] = pi;
      s += pi;
    }
    CHECK(std::abs(s / iters - m1 / z) < 0.004);
    std::vector<double> cdf(n);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) cdf[i] = (acc += dens[i]) / z;
    const double d = testutil::ks_one_sample(draws, [&](double x) {
      const auto it = std::lower_bound(grid.begin(), grid.end(), x);
      return it == grid.end() ? 1.0 : cdf[static_cast<std::size_t>(it - grid.begin())];
    });
    CHECK(d < 0.01);
  }
}

TEST_CASE("rj move probabilities") {
  auto p = rj_move_probabilities(0, 6);
  CHECK(p.birth == doctest::Approx(1.0 / 15.0));
  p = rj_move_probabilities(3, 6);
  CHECK(p.birth == doctest::Approx(1.0 / 6.0));
  CHECK(p.death == doctest::Approx(1.0 / 6.0));
  p = rj_move_probabilities(2, 6);
  CHECK(p.death == doctest::Approx(1.0 / 3.0));
  CHECK(rj_move_probabilities(6, 6).birth == 0.0);
  CHECK(rj_move_probabilities(0, 6).death == 0.0);
}

TEST_CASE("rj birth and death transforms") {
  const std::vector<double> v4{0.1, 0.2, 0.3, 0.4};
  CHECK(std::exp(rj_birth_transform(v4, 0.5, 2).log_jacobian) == doctest::Approx(0.125));

  const auto b0 = rj_birth_transform({}, 0.3, 0);
  CHECK(b0.v == std::vector<double>{0.3, 0.7});
  CHECK(b0.log_jacobian == 0.0);

  const std::vector<double> v{0.2, 0.3, 0.5};
  const auto b = rj_birth_transform(v, 0.4, 0);
  REQUIRE(b.v.size() == 4);
  CHECK(b.v[0] == doctest::Approx(0.4));
  CHECK(b.v[1] == doctest::Approx(0.12));
  CHECK(b.v[2] == doctest::Approx(0.18));
  CHECK(b.v[3] == doctest::Approx(0.3));
  CHECK(std::exp(b.log_jacobian) == doctest::Approx(0.36));
  const auto d = rj_death_transform(b.v, 0);
  CHECK(d.delta == doctest::Approx(0.4).epsilon(1e-15));
  for (int i = 0; i < 3; ++i) CHECK(d.v[i] == doctest::Approx(v[i]).epsilon(1e-12));

  const std::vector<double> two{0.4, 0.6};
  const auto d2 = rj_death_transform(two, 0);
  CHECK(d2.delta == 0.4);
  CHECK(d2.v.empty());
  const std::vector<double> three{0.5, 0.25, 0.25};
  const auto d3 = rj_death_transform(three, 0);
  CHECK(d3.delta == 0.5);
  CHECK(d3.v == std::vector<double>{0.5, 0.5});
  CHECK_THROWS(rj_birth_transform(v, 1.0, 0));
  CHECK_THROWS(rj_birth_transform(v, 0.0, 0));
}

TEST_CASE("proposal mixture density integrates to one and matches its sampler") {
  const std::vector<double> betas{1, 10, 100, 250, 500};
  double integral = 0.0;
  const int n = 2000000;
  for (int i = 0; i < n; ++i) integral += std::exp(proposal_logpdf((i + 0.5) / n, betas)) / n;
  CHECK(integral == doctest::Approx(1.0).epsilon(1e-4));
  Rng rng(8);
  std::vector<double> x(100000);
  for (auto& v : x) v = sample_proposal(betas, rng);
  const double d = testutil::ks_one_sample(x, [&](double t) {
    double s = 0.0;
    for (double b : betas) s += 1.0 - std::pow(1.0 - t, b);
    return s / 5.0;
  });
  CHECK(d < 0.01);
}

TEST_CASE("rj acceptance with no reads reduces to prior, jacobian and proposal terms") {
  AugmentedCluster m;
  m.members = {0, 1};
  m.prior = PriorConfig::uniform(2);
  const ReadSummary rs(m);
  const auto c = StateVector::all_equal(2);
  const FreeParams fp{{0.35, 0.65}, {}};
  const auto e = map_free_to_expression(c, dead_alive_sets(c), fp);
  const std::vector<double> betas{1, 10, 100, 250, 500};
  const double pi = 0.3, delta = 0.4;
  const auto prop = rj_propose_birth(c, e, fp, 0, 1, delta);
  double fprop = 0.0;
  for (double b : betas) fprop += b * std::pow(1.0 - delta, b - 1.0) / 5.0;
  // P(c')/P(c) = (pi/(1-pi))^2; Dirichlet(1,1) density of v' is 1; |J| = 1;
  // P_death(2)/P_birth(0) = (2/2)/(2/(2*1)) = 1.
  const double hand = 2.0 * std::log(pi / (1.0 - pi)) - std::log(fprop);
  CHECK(rj_acceptance_log_ratio(m, rs, c, fp, e, prop, pi, betas) ==
        doctest::Approx(hand).epsilon(1e-12));
}

TEST_CASE("matched birth and death log ratios cancel") {
  Rng rng(9);
  const std::vector<double> betas{1, 10, 100, 250, 500};
  for (int rep = 0; rep < 200; ++rep) {
    testutil::ToySpec s;
    s.members = 3 + rng() % 4;
    s.reads_a = 10 + rng() % 10;
    s.reads_b = 10 + rng() % 10;
    s.pseudo = rep % 2 == 0;
    s.pinned_a = rng() % 10;
    s.pinned_b = rng() % 10;
    const auto m = testutil::random_toy(s, rng);
    const ReadSummary rs(m);
    const std::size_t K = m.size();
    auto c = random_state(K, rng);
    if (c.num_de() == K) c = StateVector::all_equal(K);
    const auto sets = dead_alive_sets(c);
    const auto fp = sample_uv_prior(c, sets, m.prior, rng);
    const auto e = map_free_to_expression(c, sets, fp);
    std::size_t k0 = sets.dead[rng() % sets.dead.size()], k1 = 0;
    if (c.num_de() == 0) {
      do k1 = rng() % K;
      while (k1 == k0);
    }
    const double delta = 0.05 + 0.9 * sample_uniform(rng);
    const double pi = 0.1 + 0.8 * sample_uniform(rng);
    const auto birth = rj_propose_birth(c, e, fp, k0, k1, delta);
    const auto death = rj_propose_death(birth.c, birth.expr, birth.fp, k0);
    CHECK(death.c == c);
    CHECK(death.delta == doctest::Approx(delta).epsilon(1e-12));
    for (std::size_t k = 0; k < K; ++k) {
      CHECK(death.expr.theta[k] == doctest::Approx(e.theta[k]).epsilon(1e-12));
      CHECK(death.expr.w[k] == doctest::Approx(e.w[k]).epsilon(1e-12));
    }
    const double fwd = rj_acceptance_log_ratio(m, rs, c, fp, e, birth, pi, betas);
    const double bwd = rj_acceptance_log_ratio(m, rs, birth.c, birth.fp, birth.expr, death, pi, betas);
    CHECK(fwd + bwd == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
  }
}

TEST_CASE("marginal log-likelihood sums log mixtures over reads") {
  ReadTable r = one_read({0, 1}, {0.2, 0.4});
  r.append(one_read({1}, {0.5}));
  const std::vector<double> w{0.25, 0.75};
  const std::vector<std::int64_t> fixed{0, 0};
  const std::vector<std::uint32_t> multi{0};
  // Only the multi-mapping read enters; the unique read is constant in w.
  const double got = marginal_loglik(r, fixed, multi, w);
  CHECK(got == doctest::Approx(std::log(0.25 * 0.2 + 0.75 * 0.4)));
}

TEST_CASE("chain starts split between all-EE and all-DE") {
  ChainConfig cfg;
  cfg.n_chains = 6;
  int de = 0;
  for (std::size_t i = 0; i < 6; ++i) de += chain_starts_all_de(cfg, i);
  CHECK(de == 3);
  cfg.n_chains = 5;
  de = 0;
  for (std::size_t i = 0; i < 5; ++i) de += chain_starts_all_de(cfg, i);
  CHECK(de == 2);
  cfg.init = InitMode::AllEqual;
  CHECK_FALSE(chain_starts_all_de(cfg, 4));
}

TEST_CASE("chain config validation") {
  ChainConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.burnin = cfg.iterations;
  CHECK_THROWS(cfg.validate());
  cfg = ChainConfig{};
  cfg.thin = 0;
  CHECK_THROWS(cfg.validate());
  cfg = ChainConfig{};
  cfg.n_chains = 0;
  CHECK_THROWS(cfg.validate());
  cfg = ChainConfig{};
  CHECK(cfg.retained_per_chain() == 800);
  CHECK(cfg.retained(1005));
  CHECK_FALSE(cfg.retained(1000));
  CHECK_FALSE(cfg.retained(1004));
}

TEST_CASE("zero-read cluster recovers the prior DE marginal") {
  AugmentedCluster m;
  m.members = {0, 1, 2};
  m.prior = PriorConfig::uniform(3);
  const auto exact = brute_force_posterior(m);
  for (auto kind : {SamplerKind::Collapsed, SamplerKind::RjMcmc}) {
    const auto s = run_ensemble(m, quick_config(kind, 40000, 4));
    for (std::size_t k = 0; k < 3; ++k) CHECK(std::abs(s.p_de[k] - exact.p_de[k]) < 0.02);
  }
}

TEST_CASE("fixed seed gives identical draws") {
  Rng rng(10);
  testutil::ToySpec s;
  s.members = 3;
  s.reads_a = 20;
  s.reads_b = 20;
  s.pseudo = true;
  s.pinned_a = 10;
  s.pinned_b = 5;
  const auto m = testutil::random_toy(s, rng);
  for (auto kind : {SamplerKind::Collapsed, SamplerKind::RjMcmc}) {
    auto cfg = quick_config(kind, 500);
    cfg.keep_traces = true;
    const auto a = run_chain(m, cfg, 1);
    const auto b = run_chain(m, cfg, 1);
    CHECK(a.c_trace == b.c_trace);
    CHECK(a.theta_trace == b.theta_trace);
    CHECK(a.w_trace == b.w_trace);
    CHECK(a.pi_trace == b.pi_trace);
    const auto other = run_chain(m, cfg, 2);
    CHECK(other.theta_trace != a.theta_trace);
  }
}

TEST_CASE("both samplers match the oracle on a K=3 toy") {
  Rng rng(11);
  testutil::ToySpec s;
  s.members = 3;
  s.reads_a = 4;
  s.reads_b = 4;
  const auto m = testutil::random_toy(s, rng);
  const auto exact = brute_force_posterior(m);
  for (auto kind : {SamplerKind::Collapsed, SamplerKind::RjMcmc}) {
    const auto sum = run_ensemble(m, quick_config(kind, 60000, 2));
    for (std::size_t k = 0; k < 3; ++k) {
      CHECK(std::abs(sum.p_de[k] - exact.p_de[k]) < 0.02);
      CHECK(std::abs(sum.theta_mean[k] - exact.theta_mean[k]) < 0.02);
      CHECK(std::abs(sum.w_mean[k] - exact.w_mean[k]) < 0.02);
    }
    CHECK(std::accumulate(sum.theta_mean.begin(), sum.theta_mean.end(), 0.0) ==
          doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("single chain started all-EE finds strong DE") {
  AugmentedCluster m;
  m.members = {0, 1};
  m.prior = PriorConfig::uniform(2);
  for (int i = 0; i < 50; ++i) {
    m.reads_a.append(one_read({static_cast<std::uint32_t>(i < 40 ? 0 : 1)}, {0.01}));
    m.reads_b.append(one_read({static_cast<std::uint32_t>(i < 10 ? 0 : 1)}, {0.01}));
  }
  for (auto kind : {SamplerKind::Collapsed, SamplerKind::RjMcmc}) {
    auto cfg = quick_config(kind, 5000, 1);
    cfg.init = InitMode::AllEqual;
    CHECK(run_ensemble(m, cfg).p_de[0] > 0.95);
  }
}

TEST_CASE("audits run in every chain and the rj sampler reports acceptance") {
  Rng rng(12);
  testutil::ToySpec s;
  s.members = 4;
  s.reads_a = 30;
  s.reads_b = 30;
  const auto m = testutil::random_toy(s, rng);
  for (auto kind : {SamplerKind::Collapsed, SamplerKind::RjMcmc}) {
    auto cfg = quick_config(kind, 300);
    cfg.audit_every = 1;
    const auto sum = run_ensemble(m, cfg);
    for (const auto& ch : sum.chains) CHECK(ch.audits >= 300);
    CHECK(sum.retained_draws == 2 * cfg.retained_per_chain());
    if (kind == SamplerKind::RjMcmc)
      CHECK(sum.rj_acceptance >= 0.0);
    else
      CHECK(std::isnan(sum.rj_acceptance));
  }
}
