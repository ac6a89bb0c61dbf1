#pragma once

#include <vector>

#include <Eigen/Dense>

#include "schottky/schottky_group.hpp"

namespace schottky {

/// Element of Pi_{2n-2}: coefficients c_0..c_{2n-2} in ascending powers of z.
using Polynomial = Eigen::VectorXcd;

/// Values of a cocycle on the generators L_1..L_g (Gamma is free, so this determines it).
struct Cocycle {
  std::vector<Polynomial> generator_values;
};

Complex evaluate_polynomial(const Polynomial& p, Complex z);

/// gamma_* p = p(gamma z) gamma'(z)^{1-n}, expanded exactly over the det-1 matrix.
Polynomial act(const MoebiusMap& m, const Polynomial& p, int n);

/// chi[evaluate(w)] by folding chi[g1 g2] = g2_* chi[g1] + chi[g2] over the letters.
Polynomial extend(const Cocycle& c, std::span<const Letter> w, const SchottkyGroup& group, int n);

/// b[L_r] = L_r* p - p.
Cocycle coboundary(const Polynomial& p, const SchottkyGroup& group, int n);

/// The unique c + coboundary(p) with chi[L_1] proportional to z^{n-1} and chi[L_2](1) = 0.
/// Throws SingularNormalization when the linear system is rank deficient.
Cocycle normalize(const Cocycle& c, const SchottkyGroup& group, int n);

/// The fixed basis of normalized cocycles: z^{n-1} in slot 1, (z-1)^k (k = 1..2n-2) in slot 2,
/// z^k (k = 0..2n-2) in slots 3..g.
std::vector<Cocycle> normalized_basis(int g, int n);

/// 1 + (2n-2) + (g-2)(2n-1), which equals (2n-1)(g-1).
int tilde_dimension(int g, int n);

/// max |coefficient| of a - b over all slots.
double cocycle_distance(const Cocycle& a, const Cocycle& b);

}  // namespace schottky
