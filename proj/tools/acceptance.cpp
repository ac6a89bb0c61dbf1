// Acceptance run: one PASS/FAIL line per criterion, with the measured figure, its tolerance and
// the wall time against the budget.
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "../tests/oracles.hpp"
#include "schottky/cli.hpp"
#include "schottky/eichler.hpp"
#include "schottky/group_io.hpp"
#include "schottky/kernels.hpp"
#include "schottky/periods.hpp"
#include "schottky/qseries.hpp"
#include "schottky/torus.hpp"

using namespace schottky;

namespace {

const std::string kData = SCHOTTKY_DATA_DIR;

Complex cis(double r, double theta) { return std::polar(r, theta); }

SchottkyGroup g2() { return read_group(kData + "/g2.json"); }

SchottkyGroup rank_one(Complex q) {
  return SchottkyGroup({from_fixed_data(RiemannSpherePoint(0.0), RiemannSpherePoint::infinity(), q)});
}

// Multipliers near 0.3, where L_* on polynomials of degree 8 stays well conditioned.
SchottkyGroup mild_group(int g) {
  std::vector<MoebiusMap> gens{
      from_fixed_data(RiemannSpherePoint(Complex(0.1, 0.0)), RiemannSpherePoint::infinity(), cis(0.3, 0.3)),
      from_fixed_data(RiemannSpherePoint(1.0), RiemannSpherePoint(Complex(-1.0, 0.3)), cis(0.35, -0.4)),
      from_fixed_data(RiemannSpherePoint(Complex(0.2, 1.2)), RiemannSpherePoint(Complex(0.1, -1.3)), cis(0.3, 1.1))};
  gens.resize(g);
  return SchottkyGroup(gens).normalized();
}

Complex point_in(const SchottkyGroup& g, std::mt19937_64& rng, double scale, double margin) {
  std::uniform_real_distribution<double> u(-scale, scale);
  for (;;) {
    const Complex z(u(rng), u(rng));
    if (g.clearance(z) > margin) return z;
  }
}

struct Verdict {
  bool pass;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

int failures = 0;

void criterion(int id, const char* title, double budget_s, const std::function<Verdict()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v{false, ""};
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("threw ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = secs <= budget_s;
  const bool pass = v.pass && in_time;
  if (!pass) ++failures;
  std::printf("[%s] %2d %s: %s; %.2f s (budget %.0f s%s)\n", pass ? "PASS" : "FAIL", id, title, v.detail.c_str(), secs,
              budget_s, in_time ? "" : ", exceeded");
  std::fflush(stdout);
}

// Cyclically reduced primitive words up to rotation, by brute force.
std::set<Word> brute_force_classes(int g, int maxlen) {
  std::set<Word> out;
  for (const Word& w : enumerate_words(g, maxlen)) {
    if (w.empty() || w.front() == -w.back()) continue;
    bool power = false;
    for (std::size_t d = 1; d < w.size() && !power; ++d) {
      if (w.size() % d == 0) power = std::equal(w.begin() + d, w.end(), w.begin());
    }
    if (power) continue;
    Word best = w;
    Word rot = w;
    for (std::size_t i = 0; i < w.size(); ++i) {
      std::rotate(rot.begin(), rot.begin() + 1, rot.end());
      if (lex_less(rot, best)) best = rot;
    }
    out.insert(best);
  }
  return out;
}

std::string cli_output(std::vector<std::string> args) {
  args.insert(args.begin(), "schottky_cli");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
  return std::to_string(code) + "\n" + out.str();
}

}  // namespace

int main() {
  criterion(1, "torus determinant identity", 5.0, [] {
    double worst = 0.0;
    for (Complex tau : {Complex(0, 1), Complex(0, 2), Complex(1.0 / 3.0, 2.0)}) {
      const double closed = torus_det(tau);
      worst = std::max(worst, std::abs(torus_det_spectral(tau, 1e-4) - closed) / closed);
    }
    return Verdict{worst < 1e-6, fmt("max relative deviation %.3e (tol 1e-6)", worst)};
  });

  criterion(2, "genus-1 factorization", 1.0, [] {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> x(-0.5, 0.5), y(0.5, 5.0);
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) worst = std::max(worst, torus_factorization_residual(Complex(x(rng), y(rng))));
    return Verdict{worst < 1e-12, fmt("max residual %.3e over 10 tau (tol 1e-12)", worst)};
  });

  criterion(3, "Kronecker limit formula", 10.0, [] {
    double constant = 0.0, residue = 0.0, literal = 0.0;
    for (Complex tau : {Complex(0, 1), Complex(0.2, 1.5), Complex(1.0 / 3.0, 2.0)}) {
      const LaurentAtOne l = laurent_at_one(tau);
      constant = std::max(constant, std::abs(l.numeric_constant - l.constant));
      residue = std::max(residue, std::abs(l.numeric_residue - kPi));
      const double eta4 = std::pow(std::abs(dedekind_eta(tau)), 4);
      const double displayed = -kPi * std::log(4.0 * tau.imag() * eta4 * std::exp(2.0 * kEulerGamma));
      literal = std::max(literal, std::abs(l.numeric_constant - displayed));
    }
    return Verdict{constant < 1e-6 && residue < 1e-8,
                   fmt("constant dev %.3e (tol 1e-6), residue dev %.3e (tol 1e-8); "
                       "displayed form with exp(2 gamma) inside the log is off by %.3f",
                       constant, residue, literal)};
  });

  criterion(4, "functional equation", 10.0, [] {
    double worst = 0.0;
    for (Complex tau : {Complex(0, 1), Complex(1.0 / 3.0, 2.0), Complex(-0.5, 1.0)}) {
      for (int k = 2; k <= 8; ++k) {
        const double s = 0.1 * k;
        const double lhs = std::pow(kPi, -s) * std::tgamma(s) * eisenstein(tau, s);
        const double rhs = std::pow(kPi, s - 1.0) * std::tgamma(1.0 - s) * eisenstein(tau, 1.0 - s);
        worst = std::max(worst, std::abs(lhs - rhs));
      }
    }
    return Verdict{worst < 1e-9, fmt("max residual %.3e (tol 1e-9)", worst)};
  });

  criterion(5, "lattice-sum oracle", 30.0, [] {
    double worst = 0.0;
    for (Complex tau : {Complex(0, 1), Complex(0.2, 1.3)}) {
      for (double s : {1.5, 2.0, 3.0}) {
        worst = std::max(worst, std::abs(eisenstein(tau, s) - oracle::lattice_sum(tau, s, 5, 25)));
      }
    }
    return Verdict{worst < 1e-10, fmt("max deviation %.3e (tol 1e-10)", worst)};
  });

  criterion(6, "conjugacy-class oracle", 60.0, [] {
    bool ok = true;
    std::size_t count = 0;
    for (int maxlen = 1; maxlen <= 8; ++maxlen) {
      const auto classes = primitive_conjugacy_classes(2, maxlen);
      const auto oracle = brute_force_classes(2, maxlen);
      std::set<Word> got;
      for (const auto& c : classes) got.insert(c.representative);
      ok = ok && got.size() == classes.size() && got == oracle;
      for (std::size_t i = 1; i < classes.size(); ++i) {
        ok = ok && shortlex_less(classes[i - 1].representative, classes[i].representative);
      }
      count = classes.size();
    }
    return Verdict{ok, fmt("%zu classes at maxlen 8, representatives identical for every maxlen <= 8", count)};
  });

  criterion(7, "resummation identity", 120.0, [] {
    const SchottkyGroup g = g2();
    KernelOptions opts;
    opts.maxlen = 8;
    std::mt19937_64 rng(7);
    double worst = 0.0;  // deviation / allowance
    double dev = 0.0;
    for (int i = 0; i < 5; ++i) {
      const Complex z = point_in(g, rng, 5.0, 0.2);
      for (int n = 1; n <= 3; ++n) {
        const KernelEval a = a_gamma_sum(g, n, z, opts);
        const KernelEval b = class_resummed_a_sum(g, n, z, opts);
        const double d = std::abs(a.value - b.value);
        dev = std::max(dev, d);
        worst = std::max(worst, d / std::max(1e-10, 3.0 * (a.tail_estimate + b.tail_estimate)));
      }
    }
    return Verdict{worst <= 1.0, fmt("max deviation %.3e, worst ratio to max(1e-10, 3 tails) %.3f", dev, worst)};
  });

  criterion(8, "scalar Lambert identity", 1.0, [] {
    double worst = 0.0;
    for (Complex q : {cis(0.1, 0.3), cis(0.3, -1.2), cis(0.45, 2.5), cis(0.6, 0.9)}) {
      for (int n = 1; n <= 5; ++n) worst = std::max(worst, lambert_identity_residual(q, n));
    }
    return Verdict{worst < 1e-12, fmt("max residual %.3e on 20 (q, n) (tol 1e-12)", worst)};
  });

  criterion(9, "central charge", 1.0, [] {
    const AnalyticFunction expf{[](Complex z) { return std::exp(z); }};
    const AnalyticFunction cubic{[](Complex z) { return z + 0.3 * z * z * z; }};
    auto cubic_schwarzian = [](Complex z) {
      const Complex d1 = 1.0 + 0.9 * z * z, d2 = 1.8 * z, d3 = 1.8;
      return d3 / d1 - 1.5 * (d2 / d1) * (d2 / d1);
    };
    double worst = 0.0;
    for (int n = 1; n <= 4; ++n) {
      const double c = (6.0 * n * n - 6.0 * n + 1.0) / 6.0;
      for (Complex z : {Complex(0.0), Complex(0.4, -0.3)}) {
        worst = std::max(worst, std::abs(central_charge_limit(expf, z, n) - c * (-0.5)));
        worst = std::max(worst, std::abs(central_charge_limit(cubic, z, n) - c * cubic_schwarzian(z)));
      }
    }
    return Verdict{worst < 1e-6, fmt("max deviation %.3e (tol 1e-6)", worst)};
  });

  criterion(10, "Bers-kernel cocycle", 120.0, [] {
    const SchottkyGroup g = g2();
    KernelOptions opts;
    opts.maxlen = 6;
    const Complex z(0.3, 2.0);
    const Complex probe = g.interior_point();
    bool ok = true;
    double excess = 0.0, fit_ratio = 0.0, identity_ratio = 0.0;
    for (int n = 2; n <= 3; ++n) {
      std::vector<Letter> letters{1, -1, 2, -2};
      std::vector<CocycleFit> single;
      for (Letter r : letters) {
        single.push_back(cocycle_from_kernel(g, n, z, Word{r}, opts));
        const CocycleFit& f = single.back();
        ok = ok && f.polynomial.size() == 2 * n - 1 && f.excess <= f.excess_floor;
        excess = std::max(excess, f.excess / f.excess_floor);
        fit_ratio = std::max(fit_ratio, f.residual / f.tail_estimate);
      }
      for (std::size_t i = 0; i < letters.size(); ++i) {
        for (std::size_t j = 0; j < letters.size(); ++j) {
          if (letters[i] == -letters[j]) continue;
          const CocycleFit joint = cocycle_from_kernel(g, n, z, Word{letters[i], letters[j]}, opts);
          fit_ratio = std::max(fit_ratio, joint.residual / joint.tail_estimate);
          const Polynomial rhs = act(g.generator(letters[j]), single[i].polynomial, n) + single[j].polynomial;
          const Complex expected = evaluate_polynomial(rhs, probe);
          const double allowance = 10.0 * (joint.excess_floor + single[i].excess_floor + single[j].excess_floor) *
                                   std::max(1.0, std::abs(expected));
          identity_ratio =
              std::max(identity_ratio, std::abs(evaluate_polynomial(joint.polynomial, probe) - expected) / allowance);
        }
      }
    }
    ok = ok && fit_ratio < 10.0 && identity_ratio <= 1.0;
    return Verdict{ok, fmt("excess/floor %.3f, fit residual/tail %.3f (< 10), identity defect/allowance %.3f", excess,
                           fit_ratio, identity_ratio)};
  });

  criterion(11, "T1 automorphy", 60.0, [] {
    const SchottkyGroup g = g2();
    require_small_exponent(g);
    KernelOptions opts;
    opts.maxlen = 8;
    std::mt19937_64 rng(11);
    double worst = 0.0;
    for (int i = 0; i < 5; ++i) {
      const Complex z = point_in(g, rng, 5.0, 0.2);
      const KernelEval base = t_hat(g, 1, z, opts);
      for (Letter r : {1, -1, 2, -2}) {
        const MoebiusMap& m = g.generator(r);
        const Complex d2 = std::pow(m.derivative(z), 2);
        const KernelEval moved = t_hat(g, 1, m(z), opts);
        const double tails = base.tail_estimate + moved.tail_estimate * std::abs(d2);
        worst = std::max(worst, std::abs(moved.value * d2 - base.value) / tails);
      }
    }
    return Verdict{worst < 5.0, fmt("max defect / combined tail %.3f (< 5)", worst)};
  });

  criterion(12, "genus-1 reduction of F", 1.0, [] {
    double worst = 0.0;
    for (Complex q : {cis(0.1, 0.0), cis(0.05, 0.8), cis(0.3, -2.0)}) {
      const SeriesResult f = f_n(rank_one(q), ProductSpec{1, 8, 1e-12, 1});
      worst = std::max(worst, std::abs(f.value - torus_f(q)));
    }
    return Verdict{worst < 1e-12, fmt("max |F(1) - prod(1-q^m)^2| %.3e (tol 1e-12)", worst)};
  });

  criterion(13, "period matrix", 300.0, [] {
    const SchottkyGroup two = g2();
    const SchottkyGroup three = read_group(kData + "/g3.json");
    double alpha = 0.0, symmetry = 0.0;
    bool positive = true;
    for (const auto& [group, maxlen] : {std::pair{&two, 8}, std::pair{&three, 5}}) {
      const int g = group->genus();
      for (int j = 1; j <= g; ++j) {
        const AbelianDifferential phi(*group, j, maxlen);
        for (int k = 1; k <= g; ++k) alpha = std::max(alpha, std::abs(alpha_period(phi, *group, k) - (j == k ? 1.0 : 0.0)));
      }
      PeriodOptions opts;
      opts.maxlen = maxlen;
      const PeriodMatrix pm = period_matrix(*group, opts);
      symmetry = std::max(symmetry, pm.symmetry_defect);
      positive = positive && pm.im_positive;
    }
    double rank1 = 0.0;
    for (Complex q : {cis(0.05, 0.8), cis(0.2, -1.0)}) {
      const PeriodMatrix pm = period_matrix(rank_one(q), 8);
      rank1 = std::max(rank1, std::abs(pm.tau(0, 0) - std::log(q) / (2.0 * kPi * kI)));
    }
    const double gram = gram_check(two, 5, 400);
    const bool ok = alpha < 1e-6 && symmetry < 1e-6 && positive && rank1 < 1e-12 && gram < 1e-3;
    return Verdict{ok, fmt("alpha-I %.3e, asymmetry %.3e, Im tau > 0: %s, rank-1 %.3e, gram deviation %.3e (grid 400)",
                           alpha, symmetry, positive ? "yes" : "no", rank1, gram)};
  });

  criterion(14, "Eichler dimensions", 1.0, [] {
    std::mt19937_64 rng(14);
    std::normal_distribution<double> normal;
    bool dims = true;
    double worst = 0.0;
    for (int g : {2, 3}) {
      const SchottkyGroup group = mild_group(g);
      for (int n : {2, 3, 5}) {
        dims = dims && tilde_dimension(g, n) == (2 * n - 1) * (g - 1) &&
               static_cast<int>(normalized_basis(g, n).size()) == (2 * n - 1) * (g - 1);
        Polynomial p(2 * n - 1);
        for (auto& c : p) c = Complex(normal(rng), normal(rng));
        for (const auto& v : normalize(coboundary(p, group, n), group, n).generator_values) {
          worst = std::max(worst, v.cwiseAbs().maxCoeff());
        }
      }
    }
    return Verdict{dims && worst < 1e-12,
                   fmt("dimensions %s, max coefficient of normalized coboundary %.3e (tol 1e-12, |q| ~ 0.3)",
                       dims ? "match" : "differ", worst)};
  });

  criterion(15, "determinism across threads", 600.0, [] {
    const std::string g2f = kData + "/g2.json";
    const std::vector<std::vector<std::string>> configs{
        {"classes", "--group", g2f, "--maxlen", "8"},
        {"kernels", "--group", g2f, "--n", "1", "--z", "0.3", "2.0"},
        {"kernels", "--group", g2f, "--n", "2", "--seed", "3"},
        {"kernels", "--group", g2f, "--n", "3", "--seed", "4", "--format", "csv"},
        {"cocycle", "--group", g2f, "--n", "2", "--maxlen", "6"},
        {"cocycle", "--group", g2f, "--n", "3", "--maxlen", "6", "--format", "csv"},
        {"fn", "--group", kData + "/rank1.json", "--n", "1"},
        {"fn", "--group", g2f, "--n", "2", "--maxlen", "12"},
        {"periods", "--group", g2f},
        {"sweep", "--group", g2f, "--n", "2", "--format", "csv"},
    };
    int same = 0;
    for (const auto& cfg : configs) {
      auto one = cfg, eight = cfg;
      one.insert(one.end(), {"--threads", "1"});
      eight.insert(eight.end(), {"--threads", "8"});
      same += cli_output(one) == cli_output(eight);
    }
    return Verdict{same == static_cast<int>(configs.size()),
                   fmt("%d of %zu CLI configs byte-identical at 1 and 8 threads (Lambert and central-charge criteria have "
                       "no series to parallelize)",
                       same, configs.size())};
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
