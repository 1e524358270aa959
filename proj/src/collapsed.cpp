#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "chain_kernels.hpp"
#include "jointde/samplers.hpp"
#include "sampler_util.hpp"

namespace jointde {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct AliveTotals {
  double alpha = 0.0;  // A1
  double na = 0.0;     // S1a
  double nb = 0.0;     // S1b
  double gamma = 0.0;  // G1
};

AliveTotals alive_totals(std::span<const std::int64_t> count_a,
                         std::span<const std::int64_t> count_b, const StateVector& c,
                         const PriorConfig& prior) {
  AliveTotals t;
  std::size_t rank = 0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (!c.is_de(k)) continue;
    t.alpha += prior.alpha[k];
    t.na += static_cast<double>(count_a[k]);
    t.nb += static_cast<double>(count_b[k]);
    t.gamma += prior.gamma[rank++];
  }
  return t;
}

std::size_t alive_rank(const StateVector& c, std::size_t k) {
  std::size_t r = 0;
  for (std::size_t q = 0; q < k; ++q) r += c.is_de(q);
  return r;
}

}  // namespace

std::vector<double> collapsed_allocation_probs(const AllocationState& st, const AugmentedCluster& cl,
                                               Condition cond, std::size_t read,
                                               const StateVector& c) {
  const auto& prior = cl.prior;
  std::vector<std::int64_t> na = st.count_a;
  std::vector<std::int64_t> nb = st.count_b;
  const bool is_a = cond == Condition::A;
  const ReadView r = is_a ? cl.reads_a[read] : cl.reads_b[read];
  if (is_a)
    --na[st.xi[read]];
  else
    --nb[st.z[read]];

  const auto t = alive_totals(na, nb, c, prior);
  const double ratio = c.num_de() == 0 ? 0.0
                       : is_a        ? (t.alpha + t.na + t.nb) / (t.alpha + t.na)
                                     : (t.alpha + t.na + t.nb) / (t.gamma + t.nb);
  std::vector<double> p(r.size());
  double total = 0.0;
  for (std::size_t a = 0; a < r.size(); ++a) {
    const auto k = r.targets[a];
    double wgt;
    if (!c.is_de(k))
      wgt = prior.alpha[k] + static_cast<double>(na[k] + nb[k]);
    else if (is_a)
      wgt = ratio * (prior.alpha[k] + static_cast<double>(na[k]));
    else
      wgt = ratio * (prior.gamma[alive_rank(c, k)] + static_cast<double>(nb[k]));
    p[a] = wgt * r.probs[a];
    total += p[a];
  }
  for (double& x : p) x /= total;
  return p;
}

void collapsed_allocation_update(AllocationState& st, const AugmentedCluster& cl, Condition cond,
                                 std::size_t read, const StateVector& c, Rng& rng) {
  const auto p = collapsed_allocation_probs(st, cl, cond, read, c);
  const bool is_a = cond == Condition::A;
  const ReadView r = is_a ? cl.reads_a[read] : cl.reads_b[read];
  const auto pick = r.targets[detail::draw_categorical(p, 1.0, rng)];
  auto& alloc = is_a ? st.xi[read] : st.z[read];
  auto& counts = is_a ? st.count_a : st.count_b;
  --counts[alloc];
  alloc = pick;
  ++counts[alloc];
}

double collapsed_log_joint(std::span<const std::int64_t> count_a,
                           std::span<const std::int64_t> count_b, const StateVector& c,
                           const PriorConfig& prior) {
  double out = 0.0;
  std::size_t rank = 0;
  double gamma_lgamma = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double na = static_cast<double>(count_a[k]);
    const double nb = static_cast<double>(count_b[k]);
    if (c.is_de(k)) {
      const double g = prior.gamma[rank++];
      out += log_gamma(prior.alpha[k] + na) + log_gamma(g + nb);
      gamma_lgamma += log_gamma(g);
    } else {
      out += log_gamma(prior.alpha[k] + na + nb);
    }
  }
  if (c.num_de() > 0) {
    const auto t = alive_totals(count_a, count_b, c, prior);
    out += log_gamma(t.alpha + t.na + t.nb) - log_gamma(t.alpha + t.na) -
           log_gamma(t.gamma + t.nb);
    out += log_gamma(t.gamma) - gamma_lgamma;
  }
  return out;
}

std::array<double, 4> block_log_weights(const StateVector& c, std::size_t j1, std::size_t j2,
                                        std::span<const std::int64_t> count_a,
                                        std::span<const std::int64_t> count_b,
                                        const PriorConfig& prior, double pi) {
  if (j1 == j2 || j1 >= c.size() || j2 >= c.size())
    throw std::invalid_argument("block update needs two distinct components");
  const std::size_t d = c.num_de() - c.is_de(j1) - c.is_de(j2);
  const std::size_t K = c.size();
  std::array<double, 4> out;
  std::vector<std::uint8_t> flags(c.flags().begin(), c.flags().end());
  for (int cell = 0; cell < 4; ++cell) {
    const std::uint8_t x = cell >> 1, y = cell & 1;
    const std::size_t cp = d + x + y;
    if (cp == 1) {
      out[cell] = kNegInf;
      continue;
    }
    flags[j1] = x;
    flags[j2] = y;
    const StateVector cand(flags);
    out[cell] = collapsed_log_joint(count_a, count_b, cand, prior) +
                static_cast<double>(cp) * std::log(pi) +
                static_cast<double>(K - cp) * std::log1p(-pi);
  }
  return out;
}

StateVector block_update(const StateVector& c, std::size_t j1, std::size_t j2,
                         std::span<const std::int64_t> count_a,
                         std::span<const std::int64_t> count_b, const PriorConfig& prior,
                         double pi, Rng& rng) {
  auto lw = block_log_weights(c, j1, j2, count_a, count_b, prior, pi);
  const auto cell = detail::draw_from_log_weights(lw, rng);
  std::vector<std::uint8_t> flags(c.flags().begin(), c.flags().end());
  flags[j1] = static_cast<std::uint8_t>(cell >> 1);
  flags[j2] = static_cast<std::uint8_t>(cell & 1);
  return StateVector(std::move(flags));
}

namespace detail {

std::pair<std::size_t, std::size_t> random_pair(std::size_t K, Rng& rng) {
  const std::size_t a = uniform_index(rng, K);
  std::size_t b = uniform_index(rng, K - 1);
  if (b >= a) ++b;
  return {a, b};
}

std::size_t draw_from_log_weights(std::span<double> logw, Rng& rng) {
  const double mx = *std::max_element(logw.begin(), logw.end());
  double total = 0.0;
  for (double& x : logw) {
    x = std::exp(x - mx);
    total += x;
  }
  return draw_categorical(logw, total, rng);
}

namespace {

class CollapsedChain {
public:
  CollapsedChain(const AugmentedCluster& cl, const ChainConfig& cfg, const StateVector& init,
                 Rng& rng)
      : cl_(cl),
        cfg_(cfg),
        rs_(cl),
        prior_(cl.prior),
        K_(cl.size()),
        rng_(rng),
        flags_(init.flags().begin(), init.flags().end()),
        gamma_of_(K_, 0.0),
        uniform_gamma_(prior_.gamma_is_uniform()),
        pair_updates_(cfg.pair_updates ? cfg.pair_updates : (K_ + 1) / 2) {
    const auto sets = dead_alive_sets(init);
    const auto fp = sample_uv_prior(init, sets, prior_, rng_);
    const auto e = map_free_to_expression(init, sets, fp);
    st_ = gibbs_allocations(e, cl_, rng_);
    pi_ = prior_.de_prior.is_fixed() ? prior_.de_prior.pi : 0.5;
    refresh_alive();
  }

  void run(ChainDraws& out) {
    DrawRecorder rec(out, cfg_, K_);
    for (std::size_t it = 1; it <= cfg_.iterations; ++it) {
      sweep_a();
      sweep_b();
      if (K_ >= 2) pair_updates();
      if (!prior_.de_prior.is_fixed()) pi_ = update_pi(pi_, cplus_, K_, rng_);
      if (cfg_.audit_every && it % cfg_.audit_every == 0) {
        st_.audit(cl_);
        ++out.audits;
      }
      if (cfg_.retained(it)) record(rec);
    }
  }

private:
  void refresh_alive() {
    cplus_ = 0;
    t_ = AliveTotals{};
    for (std::size_t k = 0; k < K_; ++k) {
      if (!flags_[k]) continue;
      gamma_of_[k] = prior_.gamma[cplus_++];
      t_.alpha += prior_.alpha[k];
      t_.na += static_cast<double>(st_.count_a[k]);
      t_.nb += static_cast<double>(st_.count_b[k]);
      t_.gamma += gamma_of_[k];
    }
  }

  void sweep_a() {
    auto& na = st_.count_a;
    const auto& nb = st_.count_b;
    for (auto i : rs_.multi_a) {
      const auto r = cl_.reads_a[i];
      const auto old = st_.xi[i];
      --na[old];
      if (flags_[old]) t_.na -= 1.0;
      const double ratio = cplus_ ? (t_.alpha + t_.na + t_.nb) / (t_.alpha + t_.na) : 0.0;
      buf_.resize(r.size());
      double total = 0.0;
      for (std::size_t a = 0; a < r.size(); ++a) {
        const auto k = r.targets[a];
        const double base = prior_.alpha[k] + static_cast<double>(na[k]);
        buf_[a] = (flags_[k] ? ratio * base : base + static_cast<double>(nb[k])) * r.probs[a];
        total += buf_[a];
      }
      const auto k = r.targets[draw_categorical(buf_, total, rng_)];
      st_.xi[i] = k;
      ++na[k];
      if (flags_[k]) t_.na += 1.0;
    }
  }

  void sweep_b() {
    const auto& na = st_.count_a;
    auto& nb = st_.count_b;
    for (auto i : rs_.multi_b) {
      const auto r = cl_.reads_b[i];
      const auto old = st_.z[i];
      --nb[old];
      if (flags_[old]) t_.nb -= 1.0;
      const double ratio = cplus_ ? (t_.alpha + t_.na + t_.nb) / (t_.gamma + t_.nb) : 0.0;
      buf_.resize(r.size());
      double total = 0.0;
      for (std::size_t a = 0; a < r.size(); ++a) {
        const auto k = r.targets[a];
        buf_[a] = (flags_[k] ? ratio * (gamma_of_[k] + static_cast<double>(nb[k]))
                             : prior_.alpha[k] + static_cast<double>(na[k] + nb[k])) *
                  r.probs[a];
        total += buf_[a];
      }
      const auto k = r.targets[draw_categorical(buf_, total, rng_)];
      st_.z[i] = k;
      ++nb[k];
      if (flags_[k]) t_.nb += 1.0;
    }
  }

  void pair_updates() {
    if (uniform_gamma_)
      fast_pair_updates();
    else
      general_pair_updates();
    refresh_alive();
  }

  void general_pair_updates() {
    StateVector c(flags_);
    for (std::size_t n = 0; n < pair_updates_; ++n) {
      const auto [j1, j2] = random_pair(K_, rng_);
      c = block_update(c, j1, j2, st_.count_a, st_.count_b, prior_, pi_, rng_);
    }
    flags_.assign(c.flags().begin(), c.flags().end());
  }

  // With a common gamma, the log joint splits into per-component terms plus a
  // function of the alive totals and c_+, so each pair update is O(1).
  void fast_pair_updates() {
    const double g = prior_.gamma.front();
    const double lg_g = log_gamma(g);
    dead_term_.resize(K_);
    alive_term_.resize(K_);
    double total = 0.0;
    for (std::size_t k = 0; k < K_; ++k) {
      const double na = static_cast<double>(st_.count_a[k]);
      const double nb = static_cast<double>(st_.count_b[k]);
      dead_term_[k] = log_gamma(prior_.alpha[k] + na + nb);
      alive_term_[k] = log_gamma(prior_.alpha[k] + na) + log_gamma(g + nb);
      total += flags_[k] ? alive_term_[k] : dead_term_[k];
    }
    const double log_pi = std::log(pi_);
    const double log_1mpi = std::log1p(-pi_);
    AliveTotals t = t_;
    std::size_t cplus = cplus_;
    std::array<double, 4> lw;

    auto global = [&](std::size_t cp, double A, double Sa, double Sb) {
      double v = static_cast<double>(cp) * log_pi + static_cast<double>(K_ - cp) * log_1mpi;
      if (cp > 0) {
        const double G = static_cast<double>(cp) * g;
        v += log_gamma(A + Sa + Sb) - log_gamma(A + Sa) - log_gamma(G + Sb) + log_gamma(G) -
             static_cast<double>(cp) * lg_g;
      }
      return v;
    };

    for (std::size_t n = 0; n < pair_updates_; ++n) {
      const auto [j1, j2] = random_pair(K_, rng_);
      const std::size_t js[2] = {j1, j2};
      double base = total;
      AliveTotals o = t;
      std::size_t d = cplus;
      for (auto j : js) {
        if (flags_[j]) {
          base -= alive_term_[j];
          o.alpha -= prior_.alpha[j];
          o.na -= static_cast<double>(st_.count_a[j]);
          o.nb -= static_cast<double>(st_.count_b[j]);
          --d;
        } else {
          base -= dead_term_[j];
        }
      }
      for (int cell = 0; cell < 4; ++cell) {
        const int x = cell >> 1, y = cell & 1;
        const std::size_t cp = d + x + y;
        if (cp == 1) {
          lw[cell] = kNegInf;
          continue;
        }
        double A = o.alpha, Sa = o.na, Sb = o.nb;
        double s = base + (x ? alive_term_[j1] : dead_term_[j1]) +
                   (y ? alive_term_[j2] : dead_term_[j2]);
        if (x) {
          A += prior_.alpha[j1];
          Sa += static_cast<double>(st_.count_a[j1]);
          Sb += static_cast<double>(st_.count_b[j1]);
        }
        if (y) {
          A += prior_.alpha[j2];
          Sa += static_cast<double>(st_.count_a[j2]);
          Sb += static_cast<double>(st_.count_b[j2]);
        }
        lw[cell] = s + global(cp, A, Sa, Sb);
      }
      const auto cell = draw_from_log_weights(lw, rng_);
      const std::uint8_t x = static_cast<std::uint8_t>(cell >> 1);
      const std::uint8_t y = static_cast<std::uint8_t>(cell & 1);
      total = base + (x ? alive_term_[j1] : dead_term_[j1]) + (y ? alive_term_[j2] : dead_term_[j2]);
      t = o;
      cplus = d + x + y;
      if (x) {
        t.alpha += prior_.alpha[j1];
        t.na += static_cast<double>(st_.count_a[j1]);
        t.nb += static_cast<double>(st_.count_b[j1]);
      }
      if (y) {
        t.alpha += prior_.alpha[j2];
        t.na += static_cast<double>(st_.count_a[j2]);
        t.nb += static_cast<double>(st_.count_b[j2]);
      }
      flags_[j1] = x;
      flags_[j2] = y;
    }
  }

  void record(DrawRecorder& rec) {
    if (!cfg_.record_expression) {
      rec.record(flags_, nullptr, pi_);
      return;
    }
    const StateVector c(flags_);
    const auto sets = dead_alive_sets(c);
    const auto fp = sample_uv_conditional(st_.count_a, st_.count_b, c, sets, prior_, rng_);
    const auto e = map_free_to_expression(c, sets, fp);
    rec.record(flags_, &e, pi_);
  }

  const AugmentedCluster& cl_;
  const ChainConfig& cfg_;
  ReadSummary rs_;
  const PriorConfig& prior_;
  std::size_t K_;
  Rng& rng_;
  std::vector<std::uint8_t> flags_;
  std::vector<double> gamma_of_;
  bool uniform_gamma_;
  std::size_t pair_updates_;
  AllocationState st_;
  AliveTotals t_;
  std::size_t cplus_ = 0;
  double pi_ = 0.5;
  std::vector<double> buf_;
  std::vector<double> dead_term_;
  std::vector<double> alive_term_;
};

}  // namespace

void run_collapsed(const AugmentedCluster& cl, const ChainConfig& cfg, const StateVector& init,
                   Rng& rng, ChainDraws& out) {
  CollapsedChain chain(cl, cfg, init, rng);
  chain.run(out);
}

}  // namespace detail

}  // namespace jointde
