#include "schottky/torus.hpp"

#include <array>
#include <cmath>

#include "schottky/errors.hpp"
#include "schottky/qseries.hpp"
#include "schottky/special_functions.hpp"

namespace schottky {

namespace {

constexpr double kFuseRadius = 1e-3;

void check_tau(Complex tau) {
  if (!(tau.imag() > 0.0)) throw Error(ErrorKind::NotUpperHalfPlane, "Im tau must be positive");
}

// Moves tau into |Re tau| <= 1/2, |tau| >= 1; E is invariant and the Bessel series is shortest there.
Complex reduce_tau(Complex tau) {
  for (int it = 0; it < 1000; ++it) {
    tau -= std::round(tau.real());
    if (std::norm(tau) >= 1.0) break;
    tau = -1.0 / tau;
  }
  return tau;
}

double divisor_sigma(int k, double power) {
  double acc = 0.0;
  for (int d = 1; d * d <= k; ++d) {
    if (k % d != 0) continue;
    acc += std::pow(static_cast<double>(d), power);
    const int e = k / d;
    if (e != d) acc += std::pow(static_cast<double>(e), power);
  }
  return acc;
}

// Direct evaluation of the completed series; singular at s = 0, 1/2, 1.
double completed_direct(Complex tau, double s) {
  const double x = tau.real();
  const double y = tau.imag();
  double value = 2.0 * completed_zeta(2.0 * s) * std::pow(y, s) + 2.0 * completed_zeta(2.0 * s - 1.0) * std::pow(y, 1.0 - s);
  const double nu = s - 0.5;
  double series = 0.0;
  for (int k = 1; k < 100000; ++k) {
    const double arg = 2.0 * kPi * k * y;
    const double bk = bessel_k(nu, arg);
    const double term = std::pow(static_cast<double>(k), nu) * divisor_sigma(k, 1.0 - 2.0 * s) * bk * std::cos(2.0 * kPi * k * x);
    series += term;
    // The remaining terms decay at least like e^{-2 pi y} per step.
    if (std::abs(bk) * std::pow(static_cast<double>(k), std::abs(nu) + 1.0) < 1e-18 * std::abs(value + 8.0 * std::sqrt(y) * series)) break;
  }
  return value + 8.0 * std::sqrt(y) * series;
}

}  // namespace

double eisenstein_completed(Complex tau, double s) {
  check_tau(tau);
  if (std::abs(s - 1.0) < 1e-8 || std::abs(s) < 1e-8) throw Error(ErrorKind::PoleAtOne, "completed series has poles at 0 and 1");
  tau = reduce_tau(tau);
  const double eps = s - 0.5;
  if (std::abs(eps) >= kFuseRadius) return completed_direct(tau, s);
  // Even in eps: cubic interpolation in eps^2 through eps = 0.0025 .. 0.01.
  std::array<double, 4> u{};
  std::array<double, 4> f{};
  for (int i = 0; i < 4; ++i) {
    const double e = 0.0025 * (i + 1);
    u[i] = e * e;
    f[i] = completed_direct(tau, 0.5 + e);
  }
  const double target = eps * eps;
  double value = 0.0;
  for (int i = 0; i < 4; ++i) {
    double weight = 1.0;
    for (int j = 0; j < 4; ++j) {
      if (j != i) weight *= (target - u[j]) / (u[i] - u[j]);
    }
    value += weight * f[i];
  }
  return value;
}

double eisenstein(Complex tau, double s) {
  check_tau(tau);
  if (std::abs(s - 1.0) < 1e-8) throw Error(ErrorKind::PoleAtOne, "E(tau, s) has a pole at s = 1");
  if (s == 0.0) return -1.0;
  const double rg = reciprocal_gamma(s);
  if (rg == 0.0) return 0.0;  // negative integers
  if (std::abs(s) < 1e-8) {
    // E(tau, s) = -1 + O(s); keep the first-order term from a symmetric difference.
    const double h = 1e-4;
    const double slope = (eisenstein(tau, h) - eisenstein(tau, -h)) / (2.0 * h);
    return -1.0 + slope * s;
  }
  return std::pow(kPi, s) * rg * eisenstein_completed(tau, s);
}

LaurentAtOne laurent_at_one(Complex tau) {
  check_tau(tau);
  LaurentAtOne out;
  out.residue = kPi;
  const Complex eta = dedekind_eta(tau);
  out.constant = -kPi * std::log(4.0 * tau.imag() * std::pow(std::abs(eta), 4)) + 2.0 * kPi * kEulerGamma;

  // E(1 +- h) = +-pi/h + C +- c1 h + c2 h^2 ...: the average removes the pole and odd terms,
  // the half-difference times h gives the residue. Richardson in h^2.
  std::array<double, 3> avg{};
  std::array<double, 3> res{};
  for (int i = 0; i < 3; ++i) {
    const double h = 0.02 / (1 << i);
    const double plus = eisenstein(tau, 1.0 + h);
    const double minus = eisenstein(tau, 1.0 - h);
    avg[i] = 0.5 * (plus + minus);
    res[i] = 0.5 * h * (plus - minus);
  }
  auto richardson = [](std::array<double, 3> v) {
    // Step ratio 2, error series in h^2: factors 4 then 16.
    const double r1 = (4.0 * v[1] - v[0]) / 3.0;
    const double r2 = (4.0 * v[2] - v[1]) / 3.0;
    return (16.0 * r2 - r1) / 15.0;
  };
  out.numeric_constant = richardson(avg);
  out.numeric_residue = richardson(res);
  return out;
}

double torus_det(Complex tau) {
  check_tau(tau);
  return 4.0 * tau.imag() * std::pow(std::abs(dedekind_eta(tau)), 4);
}

double torus_det_spectral(Complex tau, double h) {
  check_tau(tau);
  if (!(h >= 1e-6 && h <= 1e-2)) throw Error(ErrorKind::InvalidInput, "h must lie in [1e-6, 1e-2]");
  auto zeta = [&](double s) { return std::pow(kPi, -2.0 * s) * eisenstein(tau, s); };
  const double derivative = (zeta(h) - zeta(-h)) / (2.0 * h);
  return std::exp(-derivative);
}

double torus_liouville_action(Complex tau) {
  check_tau(tau);
  return 4.0 * kPi * kPi * tau.imag();
}

double torus_factorization_residual(Complex tau, int max_terms) {
  check_tau(tau);
  const Complex q = std::exp(2.0 * kPi * kI * tau);
  const double lhs = torus_det(tau) / tau.imag();
  const double rhs = 4.0 * std::exp(-torus_liouville_action(tau) / (12.0 * kPi)) * std::norm(torus_f(q, max_terms));
  return std::abs(lhs - rhs);
}

}  // namespace schottky
