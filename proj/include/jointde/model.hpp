#pragma once
// Hierarchical two-condition mixture model: state vectors, the dead/alive
// permutation and the map from free parameters (u, v) to expressions (theta, w).
//
// Indices are 0-based everywhere in this library. File formats and reports
// convert to 1-based at the boundary.

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace jointde {

inline constexpr double kSimplexTolerance = 1e-12;

/// Binary DE indicator vector. Exactly one DE component is not a valid state.
class StateVector {
public:
  StateVector() = default;
  explicit StateVector(std::vector<std::uint8_t> flags);

  static StateVector all_equal(std::size_t K);
  static StateVector all_de(std::size_t K);

  std::size_t size() const { return flags_.size(); }
  std::size_t num_de() const { return num_de_; }
  bool is_de(std::size_t k) const { return flags_[k] != 0; }
  std::span<const std::uint8_t> flags() const { return flags_; }

  friend bool operator==(const StateVector&, const StateVector&) = default;

private:
  std::vector<std::uint8_t> flags_;
  std::size_t num_de_ = 0;
};

/// Dead (equally expressed) and alive (DE) index sets. tau lists the dead
/// indices followed by the alive ones, each ascending; tau_inv[k] is the
/// position of transcript k inside tau.
struct DeadAliveSets {
  std::vector<std::uint32_t> dead;
  std::vector<std::uint32_t> alive;
  std::vector<std::uint32_t> tau;
  std::vector<std::uint32_t> tau_inv;

  std::size_t num_dead() const { return dead.size(); }
};

DeadAliveSets dead_alive_sets(const StateVector& c);

/// u lives on the (K-1)-simplex, v on the (c_+ - 1)-simplex (empty if c_+ = 0).
struct FreeParams {
  std::vector<double> u;
  std::vector<double> v;
};

struct ExpressionPair {
  std::vector<double> theta;
  std::vector<double> w;
};

/// theta = tau^{-1} u; w takes the dead u components unchanged and the alive
/// mass S redistributed according to v.
ExpressionPair map_free_to_expression(const StateVector& c, const DeadAliveSets& sets,
                                      const FreeParams& fp);

/// Inverse of map_free_to_expression.
FreeParams extract_free_params(const StateVector& c, const DeadAliveSets& sets,
                               const ExpressionPair& expr);

struct DePrior {
  enum class Kind { Jeffreys, Fixed };
  Kind kind = Kind::Jeffreys;
  double pi = 0.5;  // used when kind == Fixed

  static DePrior jeffreys() { return {}; }
  static DePrior fixed(double p);
  bool is_fixed() const { return kind == Kind::Fixed; }
};

/// Hyperparameters. alpha is per component (transcript); gamma[l] applies to
/// the l-th alive component in ascending index order.
struct PriorConfig {
  std::vector<double> alpha;
  std::vector<double> gamma;
  DePrior de_prior;

  static PriorConfig uniform(std::size_t K, DePrior de = DePrior::jeffreys());
  void validate(std::size_t K) const;
  bool gamma_is_uniform() const;
};

/// log P(c | pi) for the truncated Bernoulli prior with c_+ != 1.
double state_prior_logprob(const StateVector& c, double pi);
double state_prior_logprob(std::size_t c_plus, std::size_t K, double pi);

/// log of the truncation normalizer 1 - K pi (1-pi)^{K-1}.
double state_prior_log_normalizer(std::size_t K, double pi);

/// Beta parameters (c_+ + 1/2, K - c_+ + 1/2) of the untruncated pi update.
std::pair<double, double> pi_posterior_params(std::size_t c_plus, std::size_t K);

/// Checks nonnegativity and |sum - 1| <= tol.
bool is_on_simplex(std::span<const double> x, double tol = kSimplexTolerance);

}  // namespace jointde
