#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "schottky/eichler.hpp"
#include "schottky/schottky_group.hpp"
#include "schottky/series.hpp"

namespace schottky {

/// Uniform record for pointwise series evaluations.
struct KernelEval {
  Complex value{};
  double tail_estimate = 0.0;
  Complex z{};
  std::optional<Complex> zprime;
  int shells_used = 0;
  bool converged = false;
};

/// f and, optionally, its first three derivatives. Missing derivatives are taken from
/// Cauchy integrals on circles of radius `step` around the probe point.
struct AnalyticFunction {
  std::function<Complex(Complex)> f;
  std::function<Complex(Complex)> d1;
  std::function<Complex(Complex)> d2;
  std::function<Complex(Complex)> d3;
  double step = 0.25;
};

/// Truncation and evaluation options shared by the group series.
struct KernelOptions {
  int maxlen = 8;
  double tol = 1e-10;
  int threads = 1;
  /// Normalization point for n = 1 (must lie in D). Defaults to 1 when 1 is in D.
  std::optional<Complex> a1;
};

/// (1/pi) (1/(z - zp)) ((conj z - zp)/(conj z - z))^{2n-1} on the upper half plane.
Complex r_kernel(int n, Complex z, Complex zp);

/// (f''/f')' - (f''/f')^2 / 2.
Complex schwarzian(const AnalyticFunction& f, Complex z);

/// lim_{z'->z} (n d' - (1-n) d)[f'(z)^n f'(z')^{1-n}/(f(z)-f(z')) - 1/(z-z')] from the Taylor
/// coefficients of f at z. Two stencil radii must agree to 1e-5 or UnstableLimit is thrown.
Complex central_charge_limit(const AnalyticFunction& f, Complex z, int n);

/// Finite normalization points A_j of the Bers kernel (infinite ones contribute the factor 1).
/// n >= 2: 0 (n-1 times) and 1. n = 1: {a1}.
std::vector<Complex> normalization_points(const SchottkyGroup& group, int n, const std::optional<Complex>& a1);

/// K_n(z, zp) = (1/pi) sum_gamma 1/(gamma z - zp) prod_j (zp - A_j)/(gamma z - A_j) gamma'(z)^n.
KernelEval bers_kernel(const SchottkyGroup& group, int n, Complex z, Complex zp, const KernelOptions& opts = {});

/// Fitted translation defect of the Bers kernel in its second argument.
struct CocycleFit {
  Polynomial polynomial;  // degree <= 2n-2, ascending
  double residual = 0.0;  // max held-out misfit
  double tail_estimate = 0.0;
  double excess = 0.0;    // |coefficient of z^{2n-1}| when fitted with one extra degree
  double excess_floor = 0.0;
};

/// Fits p(zp) = K_n(z, gamma zp) gamma'(zp)^{1-n} - K_n(z, zp) on a circle inside D.
/// Throws FitResidualTooLarge when the held-out residual exceeds 10 * max(tail, 1e-13 * sample scale).
CocycleFit cocycle_from_kernel(const SchottkyGroup& group, int n, Complex z, std::span<const Letter> w,
                               const KernelOptions& opts = {});

/// sum_{gamma != id} (1/pi)(n q^{n-1} + (1-n) q^n) gamma'(z)/(gamma z - z)^2, shells by word length.
KernelEval a_gamma_sum(const SchottkyGroup& group, int n, Complex z, const KernelOptions& opts = {});

/// Same sum arranged over primitive classes, cosets <c>\Gamma and powers m, binned by the
/// length of sigma^-1 c^m sigma so that the term set matches a_gamma_sum.
KernelEval class_resummed_a_sum(const SchottkyGroup& group, int n, Complex z, const KernelOptions& opts = {});

/// Regular part of the T_n limit of the Bers kernel: closed-form B_gamma summed over gamma != id,
/// plus the identity contribution, which is nonzero for n >= 2. For n = 1, A_1 cancels and the
/// reduced form gamma'(z)/(pi (gamma z - z)^2) is summed.
KernelEval t_hat(const SchottkyGroup& group, int n, Complex z, const KernelOptions& opts = {});

/// Closed-form limit of (n d' - (1-n) d) applied to the gamma-term of the Bers kernel
/// (gamma != id), with finite normalization points `points`.
Complex b_gamma(const MoebiusMap& m, int n, Complex z, const std::vector<Complex>& points);

/// Identity contribution to t_hat: (1/pi)[(1-n)(P'/P)' - P''/(2P)] with P = prod (w - A_j).
Complex t_hat_identity_term(const std::vector<Complex>& points, int n, Complex z);

/// -(q/pi) sum_{sigma in <gamma>\Gamma} (a-b)^2/((sigma z-a)^2 (sigma z-b)^2) sigma'(z)^2.
/// Cosets are indexed by u tau with w = u c u^-1 and tau the canonical <c>-coset
/// representative, truncated at |tau| <= maxlen.
KernelEval dq_series(const SchottkyGroup& group, std::span<const Letter> w, Complex z, const KernelOptions& opts = {});

}  // namespace schottky
