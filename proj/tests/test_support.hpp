#pragma once

#include <random>

#include "schottky/schottky_group.hpp"

namespace schottky::testing {

inline Complex cis(double r, double theta) { return std::polar(r, theta); }

/// Rank-1 group z -> q z with the default annulus circles.
inline SchottkyGroup rank_one(Complex q) {
  return SchottkyGroup({from_fixed_data(RiemannSpherePoint(0.0), RiemannSpherePoint::infinity(), q)});
}

/// Well separated normalized two-generator group used throughout the tests.
inline SchottkyGroup g2() {
  const MoebiusMap l1 = from_fixed_data(RiemannSpherePoint(0.0), RiemannSpherePoint::infinity(), cis(0.01, 0.5));
  const MoebiusMap l2 = from_fixed_data(RiemannSpherePoint(1.0), RiemannSpherePoint(Complex(-1.0, 0.2)), cis(0.012, -0.7));
  return SchottkyGroup({l1, l2});
}

/// Three generators, not normalized.
inline SchottkyGroup g3() {
  const MoebiusMap l1 = from_fixed_data(RiemannSpherePoint(Complex(0.1, 0.0)), RiemannSpherePoint::infinity(), cis(0.004, 0.3));
  const MoebiusMap l2 = from_fixed_data(RiemannSpherePoint(1.0), RiemannSpherePoint(Complex(-1.0, 0.3)), cis(0.005, -0.4));
  const MoebiusMap l3 = from_fixed_data(RiemannSpherePoint(Complex(0.2, 1.2)), RiemannSpherePoint(Complex(0.1, -1.3)), cis(0.006, 1.1));
  return SchottkyGroup({l1, l2, l3});
}

inline MoebiusMap random_map(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  auto c = [&] { return Complex(n(rng), n(rng)); };
  return MoebiusMap(c(), c(), c(), c());
}

inline Complex random_point(std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return {u(rng), u(rng)};
}

/// Uniform point of the box [-scale, scale]^2 lying in D with the given clearance.
inline Complex random_point_in(const SchottkyGroup& group, std::mt19937_64& rng, double scale, double margin) {
  for (;;) {
    const Complex z = random_point(rng, scale);
    if (group.clearance(z) > margin) return z;
  }
}

}  // namespace schottky::testing
