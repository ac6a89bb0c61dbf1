#include "schottky/kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

#include "schottky/qseries.hpp"

namespace schottky {

namespace {

constexpr double kCollision = 1e-9;
constexpr int kCauchyNodes = 32;
constexpr double kLimitAgreement = 1e-5;

void check_n(int n) {
  if (n < 1) throw Error(ErrorKind::InvalidInput, "n must be at least 1");
}

void check_options(const KernelOptions& opts) {
  if (opts.maxlen < 0) throw Error(ErrorKind::InvalidInput, "maxlen must be non-negative");
  if (!(opts.tol > 0.0)) throw Error(ErrorKind::InvalidInput, "tol must be positive");
}

KernelEval to_eval(const SeriesResult& r, Complex z, std::optional<Complex> zp = std::nullopt) {
  KernelEval out;
  out.value = r.value;
  out.tail_estimate = r.tail_estimate;
  out.z = z;
  out.zprime = zp;
  out.shells_used = r.shells_used;
  out.converged = r.converged;
  return out;
}

// gamma z and gamma'(z) for finite z off the pole.
struct Image {
  Complex w;
  Complex deriv;
};

Image image(const MoebiusMap& m, Complex z) {
  const Complex den = m.c() * z + m.d();
  if (std::abs(den) < 1e-300) throw Error(ErrorKind::PoleError, "orbit point at infinity");
  return {(m.a() * z + m.b()) / den, 1.0 / (den * den)};
}

// sum_j 1/(w - A_j) and prod_j (w - A_j).
struct LogDerivative {
  Complex value{1.0};
  Complex log_derivative{};
};

LogDerivative polynomial_at(const std::vector<Complex>& points, Complex w) {
  LogDerivative out;
  for (Complex a : points) {
    out.value *= w - a;
    out.log_derivative += 1.0 / (w - a);
  }
  return out;
}

// (a-b)^2 s'^2 / ((s-a)^2 (s-b)^2) with either fixed point allowed at infinity.
Complex quadratic_weight(const RiemannSpherePoint& a, const RiemannSpherePoint& b, Complex s, Complex deriv) {
  const Complex d2 = deriv * deriv;
  if (a.is_infinite()) return d2 / ((s - b.value()) * (s - b.value()));
  if (b.is_infinite()) return d2 / ((s - a.value()) * (s - a.value()));
  const Complex ab = a.value() - b.value();
  const Complex sa = s - a.value();
  const Complex sb = s - b.value();
  return ab * ab * d2 / (sa * sa * sb * sb);
}

// Taylor coefficients f^{(k)}(z)/k!, k = 0..3, from the handle or a Cauchy integral of radius rho.
std::array<Complex, 4> taylor(const AnalyticFunction& f, Complex z, double rho) {
  std::array<Complex, 4> out{};
  out[0] = f.f(z);
  std::array<Complex, 4> cauchy{};
  if (!f.d1 || !f.d2 || !f.d3) {
    for (int j = 0; j < kCauchyNodes; ++j) {
      const Complex unit = std::polar(1.0, 2.0 * kPi * j / kCauchyNodes);
      const Complex value = f.f(z + rho * unit);
      Complex power = 1.0;
      for (int k = 1; k <= 3; ++k) {
        power /= unit;
        cauchy[k] += value * power;
      }
    }
    double scale = 1.0;
    for (int k = 1; k <= 3; ++k) {
      scale *= rho;
      cauchy[k] /= kCauchyNodes * scale;
    }
  }
  out[1] = f.d1 ? f.d1(z) : cauchy[1];
  out[2] = f.d2 ? f.d2(z) / 2.0 : cauchy[2];
  out[3] = f.d3 ? f.d3(z) / 6.0 : cauchy[3];
  if (std::abs(out[1]) < 1e-300) throw Error(ErrorKind::VanishingDerivative, "f'(z) vanishes");
  return out;
}

Complex schwarzian_from(const std::array<Complex, 4>& a) {
  const Complex b1 = a[2] / a[1];
  const Complex b2 = a[3] / a[1];
  return 6.0 * (b2 - b1 * b1);
}

Complex central_charge_from(const std::array<Complex, 4>& a, int n) {
  // f(z+e) - f(z) = a1 e (1 + b1 e + b2 e^2 + ...), f'(z+e) = a1 (1 + 2 b1 e + 3 b2 e^2 + ...).
  // The bracket is Phi(z, e) = (1 - S(e))/e with S = (f'(z+e)/a1)^{1-n} / ((f(z+e)-f(z))/(a1 e)),
  // and the operator becomes d_e Phi - (1-n) d_z Phi at e = 0.
  const Complex b1 = a[2] / a[1];
  const Complex b2 = a[3] / a[1];
  const double alpha = 1.0 - n;
  const Complex u1 = 2.0 * alpha * b1;
  const Complex u2 = 3.0 * alpha * b2 + 2.0 * alpha * (alpha - 1.0) * b1 * b1;
  const Complex s2 = u2 - u1 * b1 + (b1 * b1 - b2);
  const Complex phi1 = -s2;
  // phi0 = (2n-1) f''/(2f'), whose z-derivative is (2n-1)(3 b2 - 2 b1^2).
  const Complex dphi0 = (2.0 * n - 1.0) * (3.0 * b2 - 2.0 * b1 * b1);
  return phi1 - alpha * dphi0;
}

template <class Compute>
Complex stable_limit(const AnalyticFunction& f, Complex z, Compute compute) {
  if (!f.f) throw Error(ErrorKind::InvalidInput, "analytic function handle is empty");
  if (!(f.step > 0.0)) throw Error(ErrorKind::InvalidInput, "stencil step must be positive");
  const Complex coarse = compute(taylor(f, z, f.step));
  if (f.d1 && f.d2 && f.d3) return coarse;
  const Complex fine = compute(taylor(f, z, f.step / 2.0));
  if (std::abs(fine - coarse) > kLimitAgreement * std::max(1.0, std::abs(fine))) {
    throw Error(ErrorKind::UnstableLimit, "derivative stencils disagree");
  }
  return fine;
}

Complex checked_a1(const SchottkyGroup& group, const std::optional<Complex>& a1) {
  if (a1) {
    if (!(group.clearance(*a1) > 0.0)) throw Error(ErrorKind::InvalidInput, "A_1 must lie in the fundamental domain");
    return *a1;
  }
  if (!(group.clearance(1.0) > 0.0)) {
    throw Error(ErrorKind::InvalidInput, "1 is not in the fundamental domain; supply A_1 for n = 1");
  }
  return 1.0;
}

}  // namespace

Complex r_kernel(int n, Complex z, Complex zp) {
  check_n(n);
  if (!(z.imag() > 0.0) || !(zp.imag() > 0.0)) throw Error(ErrorKind::NotUpperHalfPlane, "points must lie in the upper half plane");
  if (z == zp) throw Error(ErrorKind::CoincidentPoints, "z and zp coincide");
  const Complex ratio = (std::conj(z) - zp) / (std::conj(z) - z);
  return std::pow(ratio, 2 * n - 1) / (kPi * (z - zp));
}

Complex schwarzian(const AnalyticFunction& f, Complex z) {
  return stable_limit(f, z, [](const std::array<Complex, 4>& a) { return schwarzian_from(a); });
}

Complex central_charge_limit(const AnalyticFunction& f, Complex z, int n) {
  check_n(n);
  return stable_limit(f, z, [n](const std::array<Complex, 4>& a) { return central_charge_from(a, n); });
}

std::vector<Complex> normalization_points(const SchottkyGroup& group, int n, const std::optional<Complex>& a1) {
  check_n(n);
  if (n == 1) return {checked_a1(group, a1)};
  std::vector<Complex> points(n - 1, 0.0);
  points.push_back(1.0);
  return points;
}

KernelEval bers_kernel(const SchottkyGroup& group, int n, Complex z, Complex zp, const KernelOptions& opts) {
  check_n(n);
  check_options(opts);
  if (n == 1) require_small_exponent(group);
  const std::vector<Complex> points = normalization_points(group, n, opts.a1);
  const Complex numerator = polynomial_at(points, zp).value;
  auto term = [&](const MoebiusMap& m, std::span<const Letter>) {
    const Image im = image(m, z);
    if (std::abs(im.w - zp) < kCollision) throw Error(ErrorKind::OrbitCollision, "zp lies on the orbit of z");
    const Complex pw = polynomial_at(points, im.w).value;
    // gamma z rounded onto a limit-point normalization point; the exact term is O(|q|^{k(n-1)}).
    if (pw == Complex(0)) return Complex(0);
    return numerator / (pw * (im.w - zp)) * std::pow(im.deriv, n) / kPi;
  };
  const ShellSums sums = sum_over_group(group, opts.maxlen, opts.threads, KeepAll{}, term);
  return to_eval(finish_series(sums, opts.tol, group.is_marginal()), z, zp);
}

CocycleFit cocycle_from_kernel(const SchottkyGroup& group, int n, Complex z, std::span<const Letter> w,
                               const KernelOptions& opts) {
  check_n(n);
  const int dim = 2 * n - 1;
  CocycleFit out;
  out.polynomial = Polynomial::Zero(dim);
  const Word reduced = reduce(w);
  if (reduced.empty()) return out;
  const MoebiusMap gamma = group.evaluate(reduced);

  const Complex center = group.interior_point();
  const double clearance = group.clearance(center);
  double radius = 0.9 * clearance;
  for (double factor : {0.9, 0.6, 0.4}) {
    radius = factor * clearance;
    if (std::abs(std::abs(z - center) - radius) >= 0.1 * radius) break;
  }

  const int fit_count = 2 * n + 2;
  const int held_count = 3;
  struct Sample {
    Complex t;
    Complex value;
    double tail;
    double scale;
  };
  auto sample = [&](double theta) {
    const Complex t = std::polar(1.0, theta);
    const Complex zp = center + radius * t;
    const Image im = image(gamma, zp);
    const Complex weight = std::pow(im.deriv, 1 - n);
    const KernelEval moved = bers_kernel(group, n, z, im.w, opts);
    const KernelEval here = bers_kernel(group, n, z, zp, opts);
    const Complex lhs = moved.value * weight;
    return Sample{t, lhs - here.value, moved.tail_estimate * std::abs(weight) + here.tail_estimate,
                  std::max(std::abs(lhs), std::abs(here.value))};
  };
  std::vector<Sample> fit;
  std::vector<Sample> held;
  for (int j = 0; j < fit_count; ++j) fit.push_back(sample(2.0 * kPi * j / fit_count));
  for (int j = 0; j < held_count; ++j) held.push_back(sample(2.0 * kPi * (j + 0.5) / fit_count));

  double scale = 0.0;
  for (const auto& s : fit) {
    out.tail_estimate = std::max(out.tail_estimate, s.tail);
    scale = std::max(scale, s.scale);
  }
  for (const auto& s : held) {
    out.tail_estimate = std::max(out.tail_estimate, s.tail);
    scale = std::max(scale, s.scale);
  }

  auto solve = [&](int unknowns) {
    Eigen::MatrixXcd vandermonde(fit_count, unknowns);
    Eigen::VectorXcd rhs(fit_count);
    for (int i = 0; i < fit_count; ++i) {
      Complex power = 1.0;
      for (int k = 0; k < unknowns; ++k) {
        vandermonde(i, k) = power;
        power *= fit[i].t;
      }
      rhs(i) = fit[i].value;
    }
    return Eigen::VectorXcd(vandermonde.colPivHouseholderQr().solve(rhs));
  };
  const Eigen::VectorXcd coeffs = solve(dim);
  const Eigen::VectorXcd extended = solve(dim + 1);
  out.excess = std::abs(extended(dim));

  auto eval_t = [&](Complex t) {
    Complex acc{};
    for (Eigen::Index k = coeffs.size() - 1; k >= 0; --k) acc = acc * t + coeffs(k);
    return acc;
  };
  for (const auto& s : held) out.residual = std::max(out.residual, std::abs(eval_t(s.t) - s.value));
  const double roundoff = 1e-13 * std::max(1.0, scale);
  out.excess_floor = 10.0 * std::max(out.tail_estimate, roundoff);
  if (out.residual > out.excess_floor) {
    char message[160];
    std::snprintf(message, sizeof message, "held-out residual %.3e exceeds %.3e (10x series tail %.3e)", out.residual,
                  out.excess_floor, out.tail_estimate);
    throw Error(ErrorKind::FitResidualTooLarge, message);
  }

  // Back to powers of z: t = (z - center)/radius.
  std::vector<double> binom(dim, 0.0);
  for (int k = 0; k < dim; ++k) {
    binom.assign(k + 1, 1.0);
    for (int i = 1; i < k; ++i) binom[i] = binom[i - 1] * (k - i + 1) / i;
    const Complex lead = coeffs(k) / std::pow(radius, k);
    for (int i = 0; i <= k; ++i) out.polynomial(i) += lead * binom[i] * std::pow(-center, k - i);
  }
  return out;
}

KernelEval a_gamma_sum(const SchottkyGroup& group, int n, Complex z, const KernelOptions& opts) {
  check_n(n);
  check_options(opts);
  auto term = [&](const MoebiusMap& m, std::span<const Letter> word) -> Complex {
    if (word.empty()) return 0.0;
    const Complex q = m.multiplier();
    const Image im = image(m, z);
    const Complex delta = im.w - z;
    const Complex weight = n == 1 ? Complex(1.0) : static_cast<double>(n) * std::pow(q, n - 1) + (1.0 - n) * std::pow(q, n);
    return weight * im.deriv / (delta * delta) / kPi;
  };
  const ShellSums sums = sum_over_group(group, opts.maxlen, opts.threads, KeepAll{}, term);
  return to_eval(finish_series(sums, opts.tol, group.is_marginal()), z);
}

KernelEval class_resummed_a_sum(const SchottkyGroup& group, int n, Complex z, const KernelOptions& opts) {
  check_n(n);
  check_options(opts);
  const int maxlen = opts.maxlen;
  ShellSums sums(maxlen);
  if (maxlen == 0) return to_eval(finish_series(sums, opts.tol, group.is_marginal()), z);

  const auto classes = primitive_conjugacy_classes(group.genus(), maxlen);
  const auto words = enumerate_words(group.genus(), maxlen / 2);
  std::vector<ShellSums> partial(classes.size(), ShellSums(maxlen));
  parallel_for(classes.size(), opts.threads, [&](std::size_t i) {
    const Word& core = classes[i].representative;
    const int k = static_cast<int>(core.size());
    const LoxodromicDataD data = group.evaluate(core).loxodromic_data();
    const Complex q = data.multiplier;
    for (const Word& sigma : words) {
      if (!is_coset_representative(core, sigma)) continue;
      const int first = static_cast<int>(reduce(multiply(invert(sigma), multiply(core, sigma))).size());
      if (first > maxlen) continue;
      const Image im = image(group.evaluate(sigma), z);
      const Complex weight = quadratic_weight(data.attracting, data.repelling, im.w, im.deriv) / kPi;
      Complex qm = q;
      for (int m = 1, length = first; length <= maxlen; ++m, length += k) {
        const Complex coeff = n == 1 ? Complex(1.0) : static_cast<double>(n) * std::pow(qm, n - 1) + (1.0 - n) * std::pow(qm, n);
        partial[i].add(length, coeff * qm / ((1.0 - qm) * (1.0 - qm)) * weight);
        qm *= q;
      }
    }
  });
  for (const auto& p : partial) sums.merge(p);
  return to_eval(finish_series(sums, opts.tol, group.is_marginal()), z);
}

Complex t_hat_identity_term(const std::vector<Complex>& points, int n, Complex z) {
  Complex l1{};
  Complex dl1{};
  for (Complex a : points) {
    l1 += 1.0 / (z - a);
    dl1 -= 1.0 / ((z - a) * (z - a));
  }
  const Complex l2 = (l1 * l1 + dl1) / 2.0;  // P''/(2P)
  return ((1.0 - n) * dl1 - l2) / kPi;
}

Complex b_gamma(const MoebiusMap& m, int n, Complex z, const std::vector<Complex>& points) {
  const Image im = image(m, z);
  const Complex delta = im.w - z;
  const LogDerivative at_z = polynomial_at(points, z);
  const LogDerivative at_w = polynomial_at(points, im.w);
  if (at_w.value == Complex(0)) return Complex(0);  // as in bers_kernel
  const Complex h = at_z.value / at_w.value * std::pow(im.deriv, n) / delta / kPi;
  const Complex log_dgamma = -2.0 * m.c() / (m.c() * z + m.d());
  const Complex primed = static_cast<double>(n) * (at_z.log_derivative + 1.0 / delta);
  const Complex unprimed = -at_w.log_derivative * im.deriv + static_cast<double>(n) * log_dgamma - im.deriv / delta;
  return h * (primed - (1.0 - n) * unprimed);
}

KernelEval t_hat(const SchottkyGroup& group, int n, Complex z, const KernelOptions& opts) {
  check_n(n);
  check_options(opts);
  ShellSums sums(opts.maxlen);
  if (n == 1) {
    // A_1 cancels from B_gamma, leaving gamma'(z)/(pi (gamma z - z)^2).
    sums = sum_over_group(group, opts.maxlen, opts.threads, KeepAll{},
                          [&](const MoebiusMap& m, std::span<const Letter> word) -> Complex {
                            if (word.empty()) return 0.0;
                            const Image im = image(m, z);
                            const Complex delta = im.w - z;
                            return im.deriv / (delta * delta) / kPi;
                          });
  } else {
    const std::vector<Complex> points = normalization_points(group, n, opts.a1);
    sums = sum_over_group(group, opts.maxlen, opts.threads, KeepAll{},
                          [&](const MoebiusMap& m, std::span<const Letter> word) -> Complex {
                            if (word.empty()) return t_hat_identity_term(points, n, z);
                            return b_gamma(m, n, z, points);
                          });
  }
  return to_eval(finish_series(sums, opts.tol, group.is_marginal()), z);
}

KernelEval dq_series(const SchottkyGroup& group, std::span<const Letter> w, Complex z, const KernelOptions& opts) {
  check_options(opts);
  const Word reduced = reduce(w);
  if (reduced.empty()) throw Error(ErrorKind::NotLoxodromic, "the identity has no multiplier");
  const LoxodromicDataD data = group.evaluate(reduced).loxodromic_data();
  const CyclicSplit split = cyclic_split(reduced);
  const MoebiusMap u = group.evaluate(split.conjugator);

  const auto words = enumerate_words(group.genus(), opts.maxlen);
  constexpr std::size_t kChunks = 64;
  const std::size_t chunk = (words.size() + kChunks - 1) / kChunks;
  std::vector<ShellSums> partial(kChunks, ShellSums(opts.maxlen));
  parallel_for(kChunks, opts.threads, [&](std::size_t c) {
    const std::size_t end = std::min(words.size(), (c + 1) * chunk);
    for (std::size_t i = c * chunk; i < end; ++i) {
      const Word& tau = words[i];
      if (!is_coset_representative(split.core, tau)) continue;
      const Image im = image(u * group.evaluate(tau), z);
      partial[c].add(tau.size(), -data.multiplier / kPi * quadratic_weight(data.attracting, data.repelling, im.w, im.deriv));
    }
  });
  ShellSums sums(opts.maxlen);
  for (const auto& p : partial) sums.merge(p);
  return to_eval(finish_series(sums, opts.tol, group.is_marginal()), z);
}

}  // namespace schottky
