#pragma once

#include <cmath>
#include <span>

#include "fuselect/types.hpp"

namespace fuselect {

/// Shannon entropy in nats, with 0 * ln 0 taken as 0.
inline double entropy(std::span<const double> p) noexcept {
  double h = 0.0;
  for (double x : p)
    if (x > 0.0) h -= x * std::log(x);
  return h;
}

/// Variance of the surprisal -ln p under p, in nats^2. Zero components
/// contribute nothing.
inline double varentropy(std::span<const double> p) noexcept {
  const double h = entropy(p);
  double v = 0.0;
  for (double x : p) {
    if (x > 0.0) {
      const double d = std::log(x) + h;
      v += x * d * d;
    }
  }
  return v;
}

template <typename Class, std::size_t N>
double entropy(const Probabilities<Class, N>& p) noexcept {
  return entropy(std::span<const double>(p.values));
}

template <typename Class, std::size_t N>
double varentropy(const Probabilities<Class, N>& p) noexcept {
  return varentropy(std::span<const double>(p.values));
}

}  // namespace fuselect
