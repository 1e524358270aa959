#include "jointde/distributions.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "jointde/model.hpp"

namespace jointde {

double log_gamma(double x) {
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

double sample_gamma(double shape, Rng& rng) {
  if (!(shape > 0.0)) throw std::invalid_argument("gamma shape must be positive");
  // Strictly positive draws keep every simplex sample in the open interior.
  for (;;) {
    const double g = std::gamma_distribution<double>(shape, 1.0)(rng);
    if (g > 0.0) return g;
  }
}

double sample_uniform(Rng& rng) {
  for (;;) {
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    if (u > 0.0) return u;
  }
}

double sample_beta(double a, double b, Rng& rng) {
  for (;;) {
    const double x = sample_gamma(a, rng);
    const double y = sample_gamma(b, rng);
    const double z = x / (x + y);
    if (z > 0.0 && z < 1.0) return z;
  }
}

void sample_dirichlet_into(std::span<const double> alpha, Rng& rng, std::span<double> out) {
  double total = 0.0;
  for (std::size_t k = 0; k < alpha.size(); ++k) {
    out[k] = sample_gamma(alpha[k], rng);
    total += out[k];
  }
  for (std::size_t k = 0; k < alpha.size(); ++k) out[k] /= total;
}

std::vector<double> sample_dirichlet(std::span<const double> alpha, Rng& rng) {
  if (alpha.empty()) return {};
  for (double a : alpha)
    if (!(a > 0.0)) throw std::invalid_argument("Dirichlet parameters must be positive");
  std::vector<double> out(alpha.size());
  sample_dirichlet_into(alpha, rng, out);
  return out;
}

double dirichlet_logpdf(std::span<const double> x, std::span<const double> alpha) {
  if (x.size() != alpha.size()) throw std::invalid_argument("dimension mismatch");
  if (x.empty()) return 0.0;
  double total = 0.0;
  double out = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!(alpha[k] > 0.0)) throw std::invalid_argument("Dirichlet parameters must be positive");
    if (!(x[k] > 0.0 && x[k] < 1.0) && x.size() > 1)
      throw std::domain_error("Dirichlet density evaluated on the boundary");
    total += alpha[k];
    out += (alpha[k] - 1.0) * std::log(x[k]) - log_gamma(alpha[k]);
  }
  return out + log_gamma(total);
}

double beta_logpdf(double x, double a, double b) {
  if (!(x > 0.0 && x < 1.0)) throw std::domain_error("Beta density evaluated outside (0,1)");
  return (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) + log_gamma(a + b) -
         log_gamma(a) - log_gamma(b);
}

void GDParams::validate() const {
  if (a.size() != b.size()) throw std::invalid_argument("GD parameter lengths differ");
  for (std::size_t j = 0; j < a.size(); ++j)
    if (!(a[j] > 0.0) || !(b[j] > 0.0))
      throw std::invalid_argument("GD parameters must be strictly positive");
}

double gd_logpdf(std::span<const double> x, const GDParams& p) {
  p.validate();
  const std::size_t k = p.dim();
  if (x.size() == k + 1) {
    if (!is_on_simplex(x, 1e-9)) throw std::domain_error("point is not on the simplex");
  } else if (x.size() != k) {
    throw std::invalid_argument("point dimension does not match GD parameters");
  }
  double out = 0.0;
  double remaining = 1.0;
  for (std::size_t j = 0; j < k; ++j) {
    if (!(x[j] > 0.0 && x[j] < 1.0)) throw std::domain_error("GD density evaluated on the boundary");
    remaining -= x[j];
    if (!(remaining > 0.0)) throw std::domain_error("GD density evaluated on the boundary");
    const double exponent = (j + 1 < k) ? p.b[j] - p.a[j + 1] - p.b[j + 1] : p.b[j] - 1.0;
    out += (p.a[j] - 1.0) * std::log(x[j]) + exponent * std::log(remaining) -
           (log_gamma(p.a[j]) + log_gamma(p.b[j]) - log_gamma(p.a[j] + p.b[j]));
  }
  return out;
}

void sample_gd_into(const GDParams& p, Rng& rng, std::span<double> out) {
  const std::size_t k = p.dim();
  double stick = 1.0;
  for (std::size_t j = 0; j < k; ++j) {
    const double zeta = sample_beta(p.a[j], p.b[j], rng);
    out[j] = zeta * stick;
    stick *= 1.0 - zeta;
  }
  out[k] = stick;
}

std::vector<double> sample_gd(const GDParams& p, Rng& rng) {
  p.validate();
  std::vector<double> out(p.dim() + 1);
  sample_gd_into(p, rng, out);
  return out;
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9E3779B97F4A7C15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t stream_seed(std::uint64_t master, std::uint64_t cluster, std::uint64_t chain) {
  return mix_seed(mix_seed(master, cluster), chain);
}

}  // namespace jointde
