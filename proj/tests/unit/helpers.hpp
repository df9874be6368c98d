#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "spinwave/ensemble.hpp"

namespace testing {

inline spinwave::AtomicEnsemble make_ensemble(std::vector<spinwave::Vec3> r) {
  return spinwave::AtomicEnsemble(std::move(r), spinwave::Cube{1e-6}, 0, spinwave::PhysicalUnits{});
}

/// Uniform cube of dimensionless side `side`, centred at the origin.
inline spinwave::AtomicEnsemble random_cloud(std::size_t n, double side, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.5 * side, 0.5 * side);
  std::vector<spinwave::Vec3> r(n);
  for (auto& p : r) p = {u(rng), u(rng), u(rng)};
  return make_ensemble(std::move(r));
}

/// Uniform direction on the unit sphere.
inline spinwave::Vec3 random_direction(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double c = 2.0 * u(rng) - 1.0;
  const double phi = 2.0 * std::numbers::pi * u(rng);
  const double s = std::sqrt(1.0 - c * c);
  return {s * std::cos(phi), s * std::sin(phi), c};
}

}  // namespace testing
