#include <doctest.h>

#include <random>

#include "schottky/kernels.hpp"
#include "schottky/qseries.hpp"
#include "test_support.hpp"

using namespace schottky;
using namespace schottky::testing;

namespace {

AnalyticFunction exp_function() { return {[](Complex z) { return std::exp(z); }}; }
AnalyticFunction cubic_function() { return {[](Complex z) { return z + z * z * z; }}; }

Complex apply(const MoebiusMap& m, Complex z) { return m(z); }

// Cauchy-integral derivative in one slot of a two-variable function, at radius rho.
template <class F>
Complex cauchy_derivative(F f, Complex z, double rho) {
  constexpr int nodes = 48;
  Complex acc{};
  for (int j = 0; j < nodes; ++j) {
    const Complex unit = std::polar(1.0, 2.0 * kPi * j / nodes);
    acc += f(z + rho * unit) / unit;
  }
  return acc / (nodes * rho);
}

}  // namespace

TEST_CASE("r_kernel closed form, equivariance and singularity") {
  CHECK(std::abs(r_kernel(1, kI, 2.0 * kI) - Complex(0.0, 1.5 / kPi)) < 1e-15);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 20; ++trial) {
    double a = normal(rng), b = normal(rng), c = normal(rng);
    if (std::abs(a) < 0.2) a = 0.7;
    const double d = (1.0 + b * c) / a;
    const MoebiusMap m(a, b, c, d);
    const Complex z(normal(rng), 0.5 + std::abs(normal(rng)));
    const Complex zp(normal(rng), 0.5 + std::abs(normal(rng)));
    for (int n = 1; n <= 3; ++n) {
      const Complex lhs = r_kernel(n, m(z), m(zp)) * std::pow(m.derivative(z), n) * std::pow(m.derivative(zp), 1 - n);
      CHECK(std::abs(lhs - r_kernel(n, z, zp)) < 1e-11 * std::max(1.0, std::abs(lhs)));
    }
  }
  const Complex z(0.3, 1.1);
  for (int n = 1; n <= 3; ++n) {
    const Complex zp = z + Complex(1e-7, 1e-7);
    CHECK(std::abs((z - zp) * r_kernel(n, z, zp) - 1.0 / kPi) < 1e-6);
  }
  CHECK_THROWS_AS(r_kernel(1, z, z), Error);
  CHECK_THROWS_AS(r_kernel(1, z, -z), Error);
}

TEST_CASE("schwarzian") {
  const MoebiusMap m(Complex(1.0, 0.5), 2.0, Complex(0.3, -0.1), Complex(1.2, 0.0));
  const AnalyticFunction moebius{[m](Complex z) { return m(z); }};
  CHECK(std::abs(schwarzian(moebius, 0.2)) < 1e-9);
  CHECK(std::abs(schwarzian(exp_function(), Complex(0.3, -0.2)) + 0.5) < 1e-10);

  AnalyticFunction exact{[](Complex z) { return std::exp(z); }, [](Complex z) { return std::exp(z); },
                         [](Complex z) { return std::exp(z); }, [](Complex z) { return std::exp(z); }};
  CHECK(std::abs(schwarzian(exact, 1.0) + 0.5) < 1e-14);

  // S(f o g) = S(f)(g) g'^2 + S(g)
  const AnalyticFunction composed{[m](Complex z) { return std::exp(m(z)); }};
  for (Complex z : {Complex(0.1, 0.1), Complex(-0.4, 0.3)}) {
    const Complex rhs = schwarzian(exp_function(), m(z)) * std::pow(m.derivative(z), 2) + schwarzian(moebius, z);
    CHECK(std::abs(schwarzian(composed, z) - rhs) < 1e-9);
  }
  const AnalyticFunction flat{[](Complex z) { return z * z; }};
  CHECK_THROWS_AS(schwarzian(flat, 0.0), Error);
}

TEST_CASE("central charge limit") {
  for (int n = 1; n <= 4; ++n) {
    const double c = (6.0 * n * n - 6.0 * n + 1.0) / 6.0;
    for (Complex z : {Complex(0.0), Complex(0.4, -0.3)}) {
      CHECK(std::abs(central_charge_limit(exp_function(), z, n) - c * schwarzian(exp_function(), z)) < 1e-6);
      CHECK(std::abs(central_charge_limit(exp_function(), z, n) + c / 2.0) < 1e-6);
    }
    const Complex z0(0.05, 0.02);
    CHECK(std::abs(central_charge_limit(cubic_function(), z0, n) - c * schwarzian(cubic_function(), z0)) < 1e-6);
    const MoebiusMap m(Complex(1.0, 0.5), 2.0, Complex(0.3, -0.1), Complex(1.2, 0.0));
    CHECK(std::abs(central_charge_limit({[m](Complex z) { return m(z); }}, 0.1, n)) < 1e-8);
  }
  CHECK(std::abs(central_charge_limit(exp_function(), 0.7, 2) + 13.0 / 12.0) < 1e-9);
  CHECK(std::abs(central_charge_limit(exp_function(), 0.7, 1) - schwarzian(exp_function(), 0.7) / 6.0) < 1e-12);

  // Independent oracle: apply the operator by finite differences to the bracket itself.
  const auto f = [](Complex z) { return z + z * z * z; };
  const auto df = [](Complex z) { return 1.0 + 3.0 * z * z; };
  const int n = 3;
  const Complex z0(0.1, 0.05);
  auto bracket = [&](Complex z, Complex zp) {
    return std::pow(df(z), n) * std::pow(df(zp), 1 - n) / (f(z) - f(zp)) - 1.0 / (z - zp);
  };
  // The bracket is analytic across the diagonal; Cauchy circles avoid evaluating on it.
  auto op_at = [&](Complex zp) {
    const Complex d_prime = cauchy_derivative([&](Complex w) { return bracket(z0, w); }, zp, 0.01);
    const Complex d_first = cauchy_derivative([&](Complex w) { return bracket(w, zp); }, z0, 0.01);
    return static_cast<double>(n) * d_prime - (1.0 - n) * d_first;
  };
  const Complex e = 1e-3;
  const Complex extrapolated = (8.0 * op_at(z0 + e / 4.0) - 6.0 * op_at(z0 + e / 2.0) + op_at(z0 + e)) / 3.0;
  CHECK(std::abs(extrapolated - central_charge_limit(cubic_function(), z0, n)) < 1e-5);
}

TEST_CASE("bers kernel: single term, automorphy, pole") {
  const SchottkyGroup annulus = rank_one(cis(0.01, 0.4));
  KernelOptions only_identity;
  only_identity.maxlen = 0;
  const Complex z(0.4, 0.6), zp(-0.5, 0.3);
  const KernelEval single = bers_kernel(annulus, 1, z, zp, only_identity);
  CHECK(std::abs(single.value - (1.0 / kPi) / (z - zp) * (zp - 1.0) / (z - 1.0)) < 1e-15);
  CHECK(single.zprime.has_value());

  const SchottkyGroup g = g2();
  KernelOptions opts;
  opts.maxlen = 8;
  for (int n = 2; n <= 3; ++n) {
    const Complex w0(0.3, 2.0), wp(-1.5, -2.5);
    REQUIRE(g.clearance(w0) > 0.1);
    REQUIRE(g.clearance(wp) > 0.1);
    const KernelEval base = bers_kernel(g, n, w0, wp, opts);
    CHECK(base.tail_estimate < 1e-9 * std::abs(base.value));
    for (Letter r : {1, -1, 2, -2}) {
      const MoebiusMap& m = g.generator(r);
      const KernelEval moved = bers_kernel(g, n, m(w0), wp, opts);
      const Complex weight = std::pow(m.derivative(w0), n);
      const double bound = 5.0 * (base.tail_estimate + moved.tail_estimate * std::abs(weight)) + 1e-13 * std::abs(base.value);
      CHECK(std::abs(moved.value * weight - base.value) < bound);
    }
    // (zp - z) K(z, zp) -> -1/pi
    for (double h : {1e-5, 1e-6}) {
      const KernelEval near = bers_kernel(g, n, w0, w0 + h, opts);
      CHECK(std::abs(h * near.value + 1.0 / kPi) < 10.0 * h);
    }
    CHECK_THROWS_AS(bers_kernel(g, n, w0, g.generator(1)(w0), opts), Error);
  }

  // n = 1 needs A_1 in D; 1 is a limit point of the normalized group.
  CHECK_THROWS_AS(bers_kernel(g, 1, Complex(0.3, 2.0), Complex(-1.5, -2.5), opts), Error);
  opts.a1 = Complex(0.0, 3.0);
  const KernelEval k1 = bers_kernel(g, 1, Complex(0.3, 2.0), Complex(-1.5, -2.5), opts);
  CHECK(std::isfinite(std::abs(k1.value)));
}

TEST_CASE("bers kernel is deterministic across thread counts") {
  const SchottkyGroup g = g2();
  KernelOptions one;
  one.maxlen = 7;
  KernelOptions many = one;
  many.threads = 8;
  const KernelEval a = bers_kernel(g, 2, Complex(0.3, 2.0), Complex(-1.5, -2.5), one);
  const KernelEval b = bers_kernel(g, 2, Complex(0.3, 2.0), Complex(-1.5, -2.5), many);
  CHECK(a.value == b.value);
  CHECK(a.tail_estimate == b.tail_estimate);
}

TEST_CASE("resummation over classes and cosets matches the plain sum") {
  const SchottkyGroup g = g2();
  std::mt19937_64 rng(5);
  KernelOptions opts;
  opts.maxlen = 8;
  opts.threads = 4;
  for (int n = 1; n <= 3; ++n) {
    for (int trial = 0; trial < 5; ++trial) {
      const Complex z = random_point_in(g, rng, 5.0, 0.2);
      const KernelEval plain = a_gamma_sum(g, n, z, opts);
      const KernelEval resummed = class_resummed_a_sum(g, n, z, opts);
      const double bound = std::max(1e-10, 3.0 * (plain.tail_estimate + resummed.tail_estimate));
      CHECK(std::abs(plain.value - resummed.value) < bound);
      // Matched truncations: equal up to roundoff, not just tails.
      CHECK(std::abs(plain.value - resummed.value) < 1e-12 * std::max(1.0, std::abs(plain.value)));
    }
  }

  // Rank one: only sigma = id, and the two agree term by term.
  const SchottkyGroup annulus = rank_one(cis(0.05, 1.0));
  const Complex z(0.5, 0.3);
  for (int n = 1; n <= 3; ++n) {
    const KernelEval plain = a_gamma_sum(annulus, n, z, opts);
    const KernelEval resummed = class_resummed_a_sum(annulus, n, z, opts);
    CHECK(std::abs(plain.value - resummed.value) < 1e-14 * std::abs(plain.value));
    // closed form: sum_{m != 0} (n q_m^{n-1} + (1-n) q_m^n) q^m z / (q^m z - z)^2 / pi, q_m = |m|-th power
    const Complex q = annulus.fixed_data(1).multiplier;
    Complex oracle{};
    for (int m = 1; m <= opts.maxlen; ++m) {
      const Complex qm = std::pow(q, m);
      const Complex weight = static_cast<double>(n) * std::pow(qm, n - 1) + (1.0 - n) * std::pow(qm, n);
      oracle += weight * qm / ((qm * z - z) * (qm * z - z));
      const Complex inv = 1.0 / qm;
      oracle += weight * inv / ((inv * z - z) * (inv * z - z));
    }
    CHECK(std::abs(plain.value - oracle / kPi) < 1e-14 * std::abs(plain.value));
  }
}

TEST_CASE("a_gamma_sum is a weight-2 automorphic form") {
  const SchottkyGroup g = g2();
  KernelOptions opts;
  opts.maxlen = 9;
  const Complex z(0.3, 2.0);
  for (int n = 1; n <= 3; ++n) {
    const KernelEval base = a_gamma_sum(g, n, z, opts);
    for (Letter r : {1, -1, 2, -2}) {
      const MoebiusMap& m = g.generator(r);
      const Complex d2 = std::pow(m.derivative(z), 2);
      const KernelEval moved = a_gamma_sum(g, n, m(z), opts);
      const double bound = 5.0 * (base.tail_estimate + moved.tail_estimate * std::abs(d2)) + 1e-14;
      CHECK(std::abs(moved.value * d2 - base.value) < bound);
    }
  }
}

TEST_CASE("t_hat: closed-form terms against the defining limit") {
  const SchottkyGroup g = g2();
  KernelOptions opts;
  opts.maxlen = 3;
  const Complex z(0.3, 2.0);
  for (int n = 2; n <= 3; ++n) {
    // F(z, z') = K(z, z') - 1/(pi (z - z')) is regular on the diagonal.
    auto regular = [&](Complex a, Complex b) { return bers_kernel(g, n, a, b, opts).value - 1.0 / (kPi * (a - b)); };
    auto op_at = [&](Complex zp) {
      const Complex d_prime = cauchy_derivative([&](Complex w) { return regular(z, w); }, zp, 0.02);
      const Complex d_first = cauchy_derivative([&](Complex w) { return regular(w, zp); }, z, 0.02);
      return static_cast<double>(n) * d_prime - (1.0 - n) * d_first;
    };
    const Complex e(1e-3, 5e-4);
    const Complex limit = 2.0 * op_at(z + e / 2.0) - op_at(z + e);
    const Complex closed = t_hat(g, n, z, opts).value;
    CHECK(std::abs(limit - closed) < 1e-6 * std::max(1.0, std::abs(closed)));
  }

  // The identity contribution does not vanish for n >= 2.
  const std::vector<Complex> points{0.0, 1.0};
  const Complex expected = (z * z - z + 1.0) / (kPi * z * z * (z - 1.0) * (z - 1.0));
  CHECK(std::abs(t_hat_identity_term(points, 2, z) - expected) < 1e-15);
  CHECK(std::abs(t_hat_identity_term({Complex(0.7)}, 1, z)) < 1e-15);
}

TEST_CASE("t_hat at n = 1 equals the A_gamma sum and is automorphic") {
  const SchottkyGroup g = g2();
  REQUIRE_NOTHROW(require_small_exponent(g));
  KernelOptions opts;
  opts.maxlen = 8;
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 5; ++trial) {
    const Complex z = random_point_in(g, rng, 5.0, 0.2);
    const KernelEval t = t_hat(g, 1, z, opts);
    const KernelEval a = a_gamma_sum(g, 1, z, opts);
    CHECK(std::abs(t.value - a.value) < 1e-12 * std::max(1.0, std::abs(a.value)));
  }
  // The general closed form reduces to A_gamma term by term whatever A_1 is.
  for (Complex a1 : {Complex(0.0, 3.0), Complex(-2.0, 1.0)}) {
    for_each_word(2, 5, [&](std::span<const Letter> w) {
      if (w.empty()) return;
      const MoebiusMap m = g.evaluate(w);
      const Complex z(0.3, 2.0);
      const Complex delta = m(z) - z;
      const Complex a_term = m.derivative(z) / (delta * delta) / kPi;
      CHECK(std::abs(b_gamma(m, 1, z, {a1}) - a_term) < 1e-12 * std::abs(a_term));
    });
  }
  const Complex z(0.3, 2.0);
  const KernelEval base = t_hat(g, 1, z, opts);
  for (Letter r : {1, -1, 2, -2}) {
    const MoebiusMap& m = g.generator(r);
    const Complex d2 = std::pow(m.derivative(z), 2);
    const KernelEval moved = t_hat(g, 1, m(z), opts);
    CHECK(std::abs(moved.value * d2 - base.value) < 5.0 * (base.tail_estimate + moved.tail_estimate * std::abs(d2)));
  }
}

TEST_CASE("dq series") {
  const Complex q = cis(0.05, 0.8);
  const SchottkyGroup annulus = rank_one(q);
  KernelOptions opts;
  opts.maxlen = 6;
  const Complex z(0.5, -0.4);
  const Word l{1};
  // a = 0, b = infinity: -(q/pi) / z^2
  CHECK(std::abs(dq_series(annulus, l, z, opts).value + q / (kPi * z * z)) < 1e-15);

  const SchottkyGroup g = g2();
  opts.maxlen = 8;
  for (const Word& w : {Word{1}, Word{2, -1}, Word{1, 1, 2}}) {
    const Complex z0(0.3, 2.0);
    const KernelEval base = dq_series(g, w, z0, opts);
    for (Letter r : {1, -1, 2, -2}) {
      const MoebiusMap& m = g.generator(r);
      const Complex d2 = std::pow(m.derivative(z0), 2);
      const KernelEval moved = dq_series(g, w, m(z0), opts);
      const double bound = 5.0 * (base.tail_estimate + moved.tail_estimate * std::abs(d2)) + 1e-12 * std::abs(base.value);
      CHECK(std::abs(moved.value * d2 - base.value) < bound);
    }
    // Conjugating the word re-indexes the cosets.
    for (const Word& u : {Word{2}, Word{-1, 2}}) {
      const Word conj = multiply(u, multiply(w, invert(u)));
      const KernelEval other = dq_series(g, conj, z0, opts);
      CHECK(std::abs(other.value - base.value) < 1e-10 * std::abs(base.value));
    }
  }
  CHECK_THROWS_AS(dq_series(g, Word{1, -1}, Complex(0.3, 2.0), opts), Error);
}

TEST_CASE("Bers kernel translation defects are Eichler cocycles") {
  const SchottkyGroup g = g2();
  KernelOptions opts;
  opts.maxlen = 6;
  const Complex z(0.3, 2.0);
  for (int n = 2; n <= 3; ++n) {
    CHECK(cocycle_from_kernel(g, n, z, Word{}, opts).polynomial.isZero());
    std::vector<Word> words;
    for (Letter r : {1, -1, 2, -2}) words.push_back({r});
    auto chi = [&](const Word& w) { return cocycle_from_kernel(g, n, z, w, opts); };
    std::vector<CocycleFit> single;
    for (const auto& w : words) {
      single.push_back(chi(w));
      CHECK(single.back().polynomial.size() == 2 * n - 1);
      CHECK(single.back().excess <= single.back().excess_floor);
    }
    const Complex probe = g.interior_point() + Complex(0.3, 0.1);
    for (std::size_t i = 0; i < words.size(); ++i) {
      for (std::size_t j = 0; j < words.size(); ++j) {
        const Word product = multiply(words[i], words[j]);
        if (product.empty()) continue;
        const CocycleFit joint = chi(product);
        const Polynomial rhs = act(g.generator(words[j][0]), single[i].polynomial, n) + single[j].polynomial;
        const double scale = std::max(1.0, evaluate_polynomial(rhs, probe).real());
        const double tol = 10.0 * (joint.excess_floor + single[i].excess_floor + single[j].excess_floor) * scale;
        CHECK(std::abs(evaluate_polynomial(joint.polynomial, probe) - evaluate_polynomial(rhs, probe)) < tol);
      }
    }
    // Normalizing the kernel cocycle lands in the normalized subspace.
    Cocycle c;
    c.generator_values = {single[0].polynomial, single[2].polynomial};
    const Cocycle normal = normalize(c, g, n);
    for (int k = 0; k < 2 * n - 1; ++k) {
      if (k != n - 1) CHECK(std::abs(normal.generator_values[0](k)) < 1e-8);
    }
    CHECK(std::abs(evaluate_polynomial(normal.generator_values[1], 1.0)) < 1e-8);
  }
}
