#include "jointde/model.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace jointde {

StateVector::StateVector(std::vector<std::uint8_t> flags) : flags_(std::move(flags)) {
  for (auto f : flags_) {
    if (f > 1) throw std::invalid_argument("state vector entries must be 0 or 1");
    num_de_ += f;
  }
  if (num_de_ == 1) throw std::invalid_argument("state vector with exactly one DE entry");
}

StateVector StateVector::all_equal(std::size_t K) {
  return StateVector(std::vector<std::uint8_t>(K, 0));
}

StateVector StateVector::all_de(std::size_t K) {
  return StateVector(std::vector<std::uint8_t>(K, 1));
}

DeadAliveSets dead_alive_sets(const StateVector& c) {
  const std::size_t K = c.size();
  DeadAliveSets s;
  s.dead.reserve(K - c.num_de());
  s.alive.reserve(c.num_de());
  for (std::uint32_t k = 0; k < K; ++k) (c.is_de(k) ? s.alive : s.dead).push_back(k);
  s.tau = s.dead;
  s.tau.insert(s.tau.end(), s.alive.begin(), s.alive.end());
  s.tau_inv.resize(K);
  for (std::uint32_t p = 0; p < K; ++p) s.tau_inv[s.tau[p]] = p;
  return s;
}

ExpressionPair map_free_to_expression(const StateVector& c, const DeadAliveSets& sets,
                                      const FreeParams& fp) {
  const std::size_t K = c.size();
  if (fp.u.size() != K) throw std::invalid_argument("u has wrong dimension");
  if (fp.v.size() != c.num_de())
    throw std::invalid_argument("v dimension " + std::to_string(fp.v.size()) +
                                " does not match c_+ = " + std::to_string(c.num_de()));
  ExpressionPair e;
  e.theta.resize(K);
  e.w.resize(K);
  for (std::size_t p = 0; p < K; ++p) e.theta[sets.tau[p]] = fp.u[p];

  const std::size_t k_star = sets.num_dead();
  for (std::size_t p = 0; p < k_star; ++p) e.w[sets.tau[p]] = fp.u[p];
  double alive_mass = 0.0;
  for (std::size_t p = k_star; p < K; ++p) alive_mass += fp.u[p];
  for (std::size_t l = 0; l < fp.v.size(); ++l) e.w[sets.tau[k_star + l]] = fp.v[l] * alive_mass;
  return e;
}

FreeParams extract_free_params(const StateVector& c, const DeadAliveSets& sets,
                               const ExpressionPair& expr) {
  const std::size_t K = c.size();
  FreeParams fp;
  fp.u.resize(K);
  for (std::size_t p = 0; p < K; ++p) fp.u[p] = expr.theta[sets.tau[p]];
  const std::size_t k_star = sets.num_dead();
  double alive_mass = 0.0;
  for (std::size_t p = k_star; p < K; ++p) alive_mass += fp.u[p];
  fp.v.resize(K - k_star);
  for (std::size_t l = 0; l < fp.v.size(); ++l) fp.v[l] = expr.w[sets.tau[k_star + l]] / alive_mass;
  return fp;
}

DePrior DePrior::fixed(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("fixed DE probability must lie in (0,1)");
  return {Kind::Fixed, p};
}

PriorConfig PriorConfig::uniform(std::size_t K, DePrior de) {
  return {std::vector<double>(K, 1.0), std::vector<double>(K, 1.0), de};
}

void PriorConfig::validate(std::size_t K) const {
  if (alpha.size() != K || gamma.size() != K)
    throw std::invalid_argument("prior hyperparameters must have one entry per component");
  for (double a : alpha)
    if (!(a > 0.0)) throw std::invalid_argument("alpha must be strictly positive");
  for (double g : gamma)
    if (!(g > 0.0)) throw std::invalid_argument("gamma must be strictly positive");
  if (de_prior.is_fixed() && !(de_prior.pi > 0.0 && de_prior.pi < 1.0))
    throw std::invalid_argument("fixed DE probability must lie in (0,1)");
}

bool PriorConfig::gamma_is_uniform() const {
  for (double g : gamma)
    if (g != gamma.front()) return false;
  return true;
}

double state_prior_log_normalizer(std::size_t K, double pi) {
  const double kd = static_cast<double>(K);
  return std::log1p(-kd * pi * std::pow(1.0 - pi, kd - 1.0));
}

double state_prior_logprob(std::size_t c_plus, std::size_t K, double pi) {
  if (c_plus == 1) throw std::invalid_argument("c_+ = 1 has zero prior mass");
  if (c_plus > K) throw std::invalid_argument("c_+ exceeds K");
  if (!(pi > 0.0 && pi < 1.0)) throw std::invalid_argument("pi must lie in (0,1)");
  const double cp = static_cast<double>(c_plus);
  const double kd = static_cast<double>(K);
  return cp * std::log(pi) + (kd - cp) * std::log1p(-pi) - state_prior_log_normalizer(K, pi);
}

double state_prior_logprob(const StateVector& c, double pi) {
  return state_prior_logprob(c.num_de(), c.size(), pi);
}

std::pair<double, double> pi_posterior_params(std::size_t c_plus, std::size_t K) {
  if (c_plus == 1 || c_plus > K) throw std::invalid_argument("invalid c_+");
  return {static_cast<double>(c_plus) + 0.5, static_cast<double>(K - c_plus) + 0.5};
}

bool is_on_simplex(std::span<const double> x, double tol) {
  double s = 0.0;
  for (double xi : x) {
    if (!(xi >= 0.0)) return false;
    s += xi;
  }
  return std::abs(s - 1.0) <= tol;
}

}  // namespace jointde
