#pragma once

#include "schottky/constants.hpp"

namespace schottky {

/// Real-analytic Eisenstein series sum' y^s / |m + n tau|^{2s}, continued to real s != 1
/// through its Fourier-Bessel expansion.
double eisenstein(Complex tau, double s);

/// pi^{-s} Gamma(s) E(tau, s), the completed series (even about s = 1/2).
double eisenstein_completed(Complex tau, double s);

struct LaurentAtOne {
  double residue = 0.0;            // pi
  double constant = 0.0;           // -pi log(4 y |eta|^4) + 2 pi gamma_E
  double numeric_residue = 0.0;    // from the expansion near s = 1
  double numeric_constant = 0.0;   // Richardson-extrapolated lim (E - pi/(s-1))
};

/// Laurent data of E at s = 1: closed form and an independent numeric extrapolation.
LaurentAtOne laurent_at_one(Complex tau);

/// 4 Im(tau) |eta(tau)|^4.
double torus_det(Complex tau);

/// exp(-zeta'(0)) with zeta(s) = pi^{-2s} E(tau, s), derivative by central difference with step h.
double torus_det_spectral(Complex tau, double h = 1e-4);

/// 4 pi^2 Im(tau).
double torus_liouville_action(Complex tau);

/// |det / Im tau - 4 exp(-S / 12 pi) |F(q)|^2|, q = e^{2 pi i tau}; `max_terms` truncates F.
double torus_factorization_residual(Complex tau, int max_terms = 0);

}  // namespace schottky
