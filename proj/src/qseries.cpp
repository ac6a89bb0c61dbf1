#include "schottky/qseries.hpp"

#include <cmath>
#include <vector>

namespace schottky {

namespace {

constexpr double kProductCut = 1e-18;
constexpr double kExponentGate = 0.9;
constexpr int kExponentShells = 7;

void check_q(Complex q) {
  if (!(std::abs(q) < 1.0)) throw Error(ErrorKind::InvalidQ, "|q| must be below 1");
}

// log prod_{m>=1} (1 - q^m), principal branch per factor.
Complex log_euler_product(Complex q, int max_terms) {
  check_q(q);
  Complex acc{};
  Complex power = q;
  for (int m = 1; max_terms <= 0 || m <= max_terms; ++m) {
    if (std::abs(power) < kProductCut) break;
    acc += std::log(1.0 - power);
    power *= q;
  }
  return acc;
}

}  // namespace

void require_small_exponent(const SchottkyGroup& group) {
  const double delta = convergence_exponent_estimate(group, group.interior_point(), kExponentShells);
  if (!(delta < kExponentGate)) {
    throw Error(ErrorKind::DeltaTooLarge, "exponent of convergence estimate " + std::to_string(delta) + " is not below 0.9");
  }
}

SeriesResult log_f0(const SchottkyGroup& group, const ProductSpec& spec) {
  if (spec.n < 1) throw Error(ErrorKind::InvalidInput, "n must be at least 1");
  if (spec.maxlen < 1) throw Error(ErrorKind::InvalidInput, "maxlen must be at least 1");
  if (!(spec.tol > 0.0)) throw Error(ErrorKind::InvalidInput, "tol must be positive");
  if (spec.n == 1) require_small_exponent(group);

  const auto classes = primitive_conjugacy_classes(group.genus(), spec.maxlen);
  std::vector<Complex> contribution(classes.size());
  const double cut = spec.tol * 1e-3;
  parallel_for(classes.size(), spec.threads, [&](std::size_t i) {
    const Complex q = group.evaluate(classes[i].representative).loxodromic_data().multiplier;
    const Complex qn = std::pow(q, spec.n);
    Complex acc{};
    Complex qm = q;    // q^m
    Complex qmn = qn;  // q^{mn}
    for (int m = 1;; ++m) {
      const Complex term = qmn / (static_cast<double>(m) * (1.0 - qm));
      acc -= term;
      if (std::abs(term) < cut) break;
      qm *= q;
      qmn *= qn;
    }
    contribution[i] = acc;
  });

  ShellSums sums(spec.maxlen);
  for (std::size_t i = 0; i < classes.size(); ++i) sums.add(classes[i].representative.size(), contribution[i]);
  return finish_series(sums, spec.tol, group.is_marginal());
}

SeriesResult f_n(const SchottkyGroup& group, const ProductSpec& spec) {
  if (spec.n > 1 && group.genus() < 2) throw Error(ErrorKind::InvalidInput, "F(n) for n > 1 needs g >= 2");
  const SeriesResult lf = log_f0(group, spec);
  Complex log_f = lf.value;
  if (spec.n > 1) {
    const Complex q1 = group.fixed_data(1).multiplier;
    const Complex q2 = group.fixed_data(2).multiplier;
    Complex power = q1;
    for (int j = 1; j < spec.n; ++j) {
      log_f += 2.0 * std::log(1.0 - power);
      power *= q1;
    }
    log_f += std::log(1.0 - std::pow(q2, spec.n - 1));
  }
  SeriesResult out = lf;
  out.value = std::exp(log_f);
  out.tail_estimate = std::abs(out.value) * std::expm1(lf.tail_estimate);
  out.converged = lf.converged && out.tail_estimate <= spec.tol;
  return out;
}

Complex dedekind_eta(Complex tau) {
  if (!(tau.imag() > 0.0)) throw Error(ErrorKind::NotUpperHalfPlane, "Im tau must be positive");
  const Complex q = std::exp(2.0 * kPi * kI * tau);
  return std::exp(2.0 * kPi * kI * tau / 24.0 + log_euler_product(q, 0));
}

Complex torus_f(Complex q, int max_terms) {
  if (q == Complex(0.0)) return 1.0;
  return std::exp(2.0 * log_euler_product(q, max_terms));
}

double lambert_identity_residual(Complex q, int n) {
  check_q(q);
  if (n < 1) throw Error(ErrorKind::InvalidInput, "n must be at least 1");
  if (q == Complex(0.0)) return 0.0;
  Complex lhs{};
  Complex rhs{};
  Complex qm = q;
  for (int m = 1;; ++m) {
    const Complex one_minus = 1.0 - qm;
    const Complex lterm = (static_cast<double>(n) * std::pow(qm, n) + static_cast<double>(1 - n) * std::pow(qm, n + 1)) /
                          (one_minus * one_minus);
    lhs += lterm;
    Complex rterm{};
    if (m >= n) {
      rterm = static_cast<double>(m) * qm / one_minus;
      rhs += rterm;
    }
    if (m >= n && std::abs(lterm) + std::abs(rterm) < 1e-20 * (1.0 + std::abs(lhs))) break;
    qm *= q;
  }
  return std::abs(lhs - rhs);
}

}  // namespace schottky
