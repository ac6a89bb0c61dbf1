#include "schottky/special_functions.hpp"

#include <array>
#include <cmath>

#include "schottky/constants.hpp"
#include "schottky/errors.hpp"

namespace schottky {

namespace {

constexpr double kEps = 1e-17;

// Borwein's algorithm 2 weights d_k for n terms.
struct BorweinWeights {
  static constexpr int kTerms = 40;
  std::array<double, kTerms + 1> d{};
  BorweinWeights() {
    const int n = kTerms;
    double term = 1.0 / n;  // (n+i-1)! 4^i / ((n-i)! (2i)!) at i = 0
    double acc = term;
    d[0] = n * acc;
    for (int i = 1; i <= n; ++i) {
      term *= 4.0 * (n + i - 1) * (n - i + 1) / ((2.0 * i - 1) * (2.0 * i));
      acc += term;
      d[i] = n * acc;
    }
  }
};

double zeta_direct(double x) {
  static const BorweinWeights w;
  constexpr int n = BorweinWeights::kTerms;
  double sum = 0.0;
  for (int k = 0; k < n; ++k) {
    const double term = (w.d[k] - w.d[n]) * std::pow(k + 1.0, -x);
    sum += (k % 2 == 0) ? term : -term;
  }
  // 1 - 2^{1-x}, accurate near x = 1.
  const double factor = -std::expm1((1.0 - x) * std::log(2.0));
  return -sum / (w.d[n] * factor);
}

// Taylor coefficients of 1/Gamma(z) about 0.
constexpr std::array<double, 26> kRecipGamma = {
    1.0,
    0.5772156649015328606,
    -0.6558780715202538811,
    -0.0420026350340952355,
    0.1665386113822914895,
    -0.0421977345555443367,
    -0.0096219715278769736,
    0.0072189432466630995,
    -0.0011651675918590651,
    -0.0002152416741149510,
    0.0001280502823881162,
    -0.0000201348547807882,
    -0.0000012504934821427,
    0.0000011330272319817,
    -0.0000002056338416978,
    0.0000000061160951045,
    0.0000000050020076445,
    -0.0000000011812745705,
    0.0000000001043426712,
    0.0000000000077822634,
    -0.0000000000036968056,
    0.0000000000005100370,
    -0.0000000000000205833,
    -0.0000000000000053481,
    0.0000000000000012268,
    -0.0000000000000001181,
};

// gam1 = (1/G(1-mu) - 1/G(1+mu)) / (2 mu), gam2 = (1/G(1-mu) + 1/G(1+mu)) / 2.
void temme_gammas(double mu, double& gam1, double& gam2, double& gampl, double& gammi) {
  gam1 = 0.0;
  gam2 = 0.0;
  double power = 1.0;  // mu^{k-1} for odd k, mu^{k-2} for even k
  for (std::size_t i = 0; i < kRecipGamma.size(); i += 2) {
    gam2 += kRecipGamma[i] * power;
    if (i + 1 < kRecipGamma.size()) gam1 -= kRecipGamma[i + 1] * power;
    power *= mu * mu;
  }
  gampl = gam2 - mu * gam1;
  gammi = gam2 + mu * gam1;
}

}  // namespace

double riemann_zeta(double x) {
  if (x == 1.0) throw Error(ErrorKind::InvalidInput, "zeta has a pole at 1");
  if (x >= 0.5) return zeta_direct(x);
  if (x == 0.0) return -0.5;
  if (x < 0.0 && x == std::floor(x) && std::fmod(-x, 2.0) == 0.0) return 0.0;  // trivial zeros
  // zeta(x) = 2^x pi^{x-1} sin(pi x / 2) Gamma(1 - x) zeta(1 - x)
  return std::pow(2.0, x) * std::pow(kPi, x - 1.0) * std::sin(0.5 * kPi * x) * std::tgamma(1.0 - x) *
         zeta_direct(1.0 - x);
}

double completed_zeta(double w) {
  if (w == 0.0 || w == 1.0) throw Error(ErrorKind::InvalidInput, "completed zeta has poles at 0 and 1");
  if (w < 0.5) w = 1.0 - w;
  return std::pow(kPi, -0.5 * w) * std::tgamma(0.5 * w) * zeta_direct(w);
}

double reciprocal_gamma(double x) {
  if (x <= 0.0 && x == std::floor(x)) return 0.0;
  if (x > 170.0) return std::exp(-std::lgamma(x));
  return 1.0 / std::tgamma(x);
}

double bessel_k(double nu, double x) {
  if (!(x > 0.0)) throw Error(ErrorKind::InvalidInput, "bessel_k needs x > 0");
  nu = std::abs(nu);
  const int nl = static_cast<int>(nu + 0.5);
  const double mu = nu - nl;
  const double mu2 = mu * mu;
  const double xi = 1.0 / x;
  const double xi2 = 2.0 * xi;
  double kmu = 0.0;
  double k1 = 0.0;
  if (x < 2.0) {
    // Temme's series.
    const double x2 = 0.5 * x;
    const double pimu = kPi * mu;
    const double fact = std::abs(pimu) < kEps ? 1.0 : pimu / std::sin(pimu);
    double d = -std::log(x2);
    double e = mu * d;
    const double fact2 = std::abs(e) < kEps ? 1.0 : std::sinh(e) / e;
    double gam1, gam2, gampl, gammi;
    temme_gammas(mu, gam1, gam2, gampl, gammi);
    double ff = fact * (gam1 * std::cosh(e) + gam2 * fact2 * d);
    double sum = ff;
    e = std::exp(e);
    double p = 0.5 * e / gampl;
    double q = 0.5 / (e * gammi);
    double c = 1.0;
    d = x2 * x2;
    double sum1 = p;
    for (int i = 1; i < 10000; ++i) {
      ff = (i * ff + p + q) / (i * i - mu2);
      c *= d / i;
      p /= i - mu;
      q /= i + mu;
      const double del = c * ff;
      sum += del;
      sum1 += c * (p - i * ff);
      if (std::abs(del) < std::abs(sum) * kEps) break;
    }
    kmu = sum;
    k1 = sum1 * xi2;
  } else {
    // Steed's continued fraction CF2 with Temme's normalization.
    double b = 2.0 * (1.0 + x);
    double d = 1.0 / b;
    double h = d;
    double delh = d;
    double q1 = 0.0;
    double q2 = 1.0;
    const double a1 = 0.25 - mu2;
    double q = a1;
    double c = a1;
    double a = -a1;
    double s = 1.0 + q * delh;
    for (int i = 2; i < 100000; ++i) {
      a -= 2.0 * (i - 1);
      c = -a * c / i;
      const double qnew = (q1 - b * q2) / a;
      q1 = q2;
      q2 = qnew;
      q += c * qnew;
      b += 2.0;
      d = 1.0 / (b + a * d);
      delh = (b * d - 1.0) * delh;
      h += delh;
      const double dels = q * delh;
      s += dels;
      if (std::abs(dels / s) < kEps) break;
    }
    h = a1 * h;
    kmu = std::sqrt(kPi / (2.0 * x)) * std::exp(-x) / s;
    k1 = kmu * (mu + x + 0.5 - h) * xi;
  }
  for (int i = 1; i <= nl; ++i) {
    const double next = (mu + i) * xi2 * k1 + kmu;
    kmu = k1;
    k1 = next;
  }
  return kmu;
}

}  // namespace schottky
