#pragma once
// Gamma, Beta, Dirichlet and Generalized Dirichlet sampling and densities.
// The Generalized Dirichlet uses the stick-breaking parameterization
// GD(a_1..a_k; b_1..b_k): zeta_j ~ Beta(a_j, b_j) independently,
// X_j = zeta_j * prod_{i<j} (1 - zeta_i), X_{k+1} the residual.

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace jointde {

using Rng = std::mt19937_64;

/// Thread-safe log-Gamma (std::lgamma writes the global signgam).
double log_gamma(double x);

double sample_gamma(double shape, Rng& rng);
double sample_beta(double a, double b, Rng& rng);
double sample_uniform(Rng& rng);  // open interval (0,1)

/// Normalized independent Gamma draws. Throws on non-positive parameters.
std::vector<double> sample_dirichlet(std::span<const double> alpha, Rng& rng);
void sample_dirichlet_into(std::span<const double> alpha, Rng& rng, std::span<double> out);

/// Log-density w.r.t. Lebesgue measure on the first k-1 coordinates.
/// x must be a full point of the simplex with strictly positive entries.
double dirichlet_logpdf(std::span<const double> x, std::span<const double> alpha);
double beta_logpdf(double x, double a, double b);

struct GDParams {
  std::vector<double> a;
  std::vector<double> b;

  std::size_t dim() const { return a.size(); }
  void validate() const;
};

/// Log of the GD density. x holds either the k free coordinates or the full
/// (k+1)-point; interior points only (throws std::domain_error otherwise).
double gd_logpdf(std::span<const double> x, const GDParams& p);

/// Returns a point with k+1 coordinates summing to one.
std::vector<double> sample_gd(const GDParams& p, Rng& rng);
void sample_gd_into(const GDParams& p, Rng& rng, std::span<double> out);

/// SplitMix64 finalizer; used to derive independent per-stream seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);
std::uint64_t stream_seed(std::uint64_t master, std::uint64_t cluster, std::uint64_t chain);

}  // namespace jointde
