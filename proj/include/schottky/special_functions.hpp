#pragma once

namespace schottky {

/// Riemann zeta on the real line, x != 1. Borwein's accelerated alternating series for
/// x >= 1/2, the functional equation below.
double riemann_zeta(double x);

/// Completed zeta pi^{-w/2} Gamma(w/2) zeta(w), using Lambda(w) = Lambda(1 - w) for w < 1/2.
/// Poles at w = 0 and w = 1.
double completed_zeta(double w);

/// Modified Bessel function K_nu(x) for real nu and x > 0.
double bessel_k(double nu, double x);

/// 1 / Gamma(x), zero at the non-positive integers.
double reciprocal_gamma(double x);

}  // namespace schottky
