#pragma once

#include "schottky/schottky_group.hpp"
#include "schottky/series.hpp"

namespace schottky {

struct ProductSpec {
  int n = 2;
  int maxlen = 8;
  double tol = 1e-10;
  int threads = 1;
};

/// log F_0(n) = -sum_{primitive classes} sum_{m>=1} q^{mn} / (m (1 - q^m)), classes grouped
/// into shells by cyclic length. n = 1 requires an exponent estimate below 0.9 (DeltaTooLarge).
SeriesResult log_f0(const SchottkyGroup& group, const ProductSpec& spec);

/// F(n) = prod_{j<n} (1 - q_1^j)^2 (1 - q_2^{n-1}) F_0(n) for n > 1, F(1) = F_0(1).
/// The tail estimate is propagated to F: |F| * tail(log F).
SeriesResult f_n(const SchottkyGroup& group, const ProductSpec& spec);

/// Shared n = 1 gate: throws DeltaTooLarge unless the exponent estimate at an interior point is below 0.9.
void require_small_exponent(const SchottkyGroup& group);

/// eta(tau) = e^{2 pi i tau / 24} prod (1 - q^m).
Complex dedekind_eta(Complex tau);

/// prod_{m>=1} (1 - q^m)^2; `max_terms` caps the product (0 means run to 1e-18).
Complex torus_f(Complex q, int max_terms = 0);

/// |sum_{m>=1} (n q^{mn} + (1-n) q^{(n+1)m}) / (1-q^m)^2 - sum_{m>=n} m q^m / (1-q^m)|.
double lambert_identity_residual(Complex q, int n);

}  // namespace schottky
