#pragma once

#include <cstdint>
#include <span>

#include "jointde/distributions.hpp"

namespace jointde::detail {

/// 53-bit uniform on [0,1).
inline double unit_uniform(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  return static_cast<std::size_t>(unit_uniform(rng) * static_cast<double>(n));
}

/// Index drawn proportionally to nonnegative weights with the given total.
inline std::size_t draw_categorical(std::span<const double> weights, double total, Rng& rng) {
  const double target = unit_uniform(rng) * total;
  double acc = 0.0;
  for (std::size_t a = 0; a + 1 < weights.size(); ++a) {
    acc += weights[a];
    if (target < acc) return a;
  }
  return weights.size() - 1;
}

}  // namespace jointde::detail
