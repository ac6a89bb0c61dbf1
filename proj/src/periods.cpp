#include "schottky/periods.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "schottky/qseries.hpp"

namespace schottky {

namespace {

constexpr double kOnCircle = 1e-9;

void check_index(const SchottkyGroup& group, int j) {
  if (j < 1 || j > group.genus()) throw Error(ErrorKind::InvalidInput, "differential index out of range");
}

// Gauss-Kronrod (7, 15) on [-1, 1]: Kronrod nodes, Kronrod weights, Gauss weights on odd nodes.
constexpr std::array<double, 8> kNodes{0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                       0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                       0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                       0.207784955007898467600689403773245, 0.0};
constexpr std::array<double, 8> kKronrod{0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                         0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                         0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                         0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kGauss{0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                       0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  Complex value{};
  double error = 0.0;
  double tail = 0.0;
};

template <class F>
Segment gauss_kronrod(const F& f, Complex a, Complex b) {
  const Complex mid = 0.5 * (a + b);
  const Complex half = 0.5 * (b - a);
  Segment out;
  Complex gauss{};
  for (int i = 0; i < 8; ++i) {
    const double x = kNodes[i];
    if (x == 0.0) {
      const KernelEval c = f(mid);
      out.value += kKronrod[i] * c.value;
      gauss += kGauss[3] * c.value;
      out.tail = std::max(out.tail, c.tail_estimate);
      continue;
    }
    const KernelEval lo = f(mid - half * x);
    const KernelEval hi = f(mid + half * x);
    out.value += kKronrod[i] * (lo.value + hi.value);
    if (i % 2 == 1) gauss += kGauss[i / 2] * (lo.value + hi.value);
    out.tail = std::max({out.tail, lo.tail_estimate, hi.tail_estimate});
  }
  out.value *= half;
  gauss *= half;
  out.error = std::abs(out.value - gauss);
  out.tail *= std::abs(b - a);
  return out;
}

template <class F>
Segment adaptive(const F& f, Complex a, Complex b, double tol, int depth = 0) {
  const Segment whole = gauss_kronrod(f, a, b);
  if (whole.error <= tol) return whole;
  if (depth >= 40) throw Error(ErrorKind::QuadratureNotConverged, "adaptive Gauss-Kronrod did not converge");
  const Complex mid = 0.5 * (a + b);
  const Segment left = adaptive(f, a, mid, tol / 2.0, depth + 1);
  const Segment right = adaptive(f, mid, b, tol / 2.0, depth + 1);
  return {left.value + right.value, left.error + right.error, left.tail + right.tail};
}

double segment_distance(Complex p, Complex a, Complex b) {
  const Complex d = b - a;
  const double len2 = std::norm(d);
  if (len2 == 0.0) return std::abs(p - a);
  const double t = std::clamp(((p - a) * std::conj(d)).real() / len2, 0.0, 1.0);
  return std::abs(p - (a + t * d));
}

bool on_circle(const Circle& c, Complex z) {
  return std::abs(std::abs(z - c.center) - c.radius) <= kOnCircle * std::max(1.0, c.radius);
}

bool segment_ok(const Circle& c, Complex a, Complex b, double margin) {
  const bool touches = on_circle(c, a) || on_circle(c, b);
  const double gap = touches ? -kOnCircle * std::max(1.0, c.radius) : margin * c.radius;
  if (c.orientation > 0) return segment_distance(c.center, a, b) >= c.radius + gap;
  // Exterior disk: the segment must stay inside the circle; convexity reduces this to the endpoints.
  for (Complex z : {a, b}) {
    const double limit = on_circle(c, z) ? c.radius * (1.0 + kOnCircle) : c.radius - margin * c.radius;
    if (std::abs(z - c.center) > limit) return false;
  }
  return true;
}

double path_length(const BetaPath& p) {
  double len = 0.0;
  for (std::size_t i = 1; i < p.vertices.size(); ++i) len += std::abs(p.vertices[i] - p.vertices[i - 1]);
  return len;
}

// Bounding window of D (as in SchottkyGroup::interior_point).
std::array<double, 4> window(const SchottkyGroup& group) {
  for (const Circle& c : group.circles()) {
    if (c.orientation < 0) {
      return {c.center.real() - c.radius, c.center.real() + c.radius, c.center.imag() - c.radius, c.center.imag() + c.radius};
    }
  }
  std::array<double, 4> w{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
                          std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const Circle& c : group.circles()) {
    w[0] = std::min(w[0], c.center.real() - c.radius), w[1] = std::max(w[1], c.center.real() + c.radius);
    w[2] = std::min(w[2], c.center.imag() - c.radius), w[3] = std::max(w[3], c.center.imag() + c.radius);
  }
  return w;
}

}  // namespace

AbelianDifferential::AbelianDifferential(const SchottkyGroup& group, int j, int maxlen, double tol)
    : j_(j), maxlen_(maxlen), tol_(tol), marginal_(group.is_marginal()) {
  check_index(group, j);
  if (maxlen < 0) throw Error(ErrorKind::InvalidInput, "maxlen must be non-negative");
  require_small_exponent(group);
  const LoxodromicDataD& data = group.fixed_data(j);
  for_each_word(group.genus(), maxlen, [&](std::span<const Letter> w) {
    if (!w.empty() && std::abs(w.back()) == j) return;
    const MoebiusMap m = group.evaluate(w);
    poles_.push_back({m.apply(data.attracting), m.apply(data.repelling), static_cast<int>(w.size())});
  });
}

KernelEval AbelianDifferential::evaluate(Complex z) const {
  ShellSums sums(maxlen_);
  const Complex scale = 1.0 / (2.0 * kPi * kI);
  for (const PolePair& p : poles_) {
    Complex term;
    if (p.a.is_infinite()) {
      term = -1.0 / (z - p.b.value());
    } else if (p.b.is_infinite()) {
      term = 1.0 / (z - p.a.value());
    } else {
      term = (p.a.value() - p.b.value()) / ((z - p.a.value()) * (z - p.b.value()));
    }
    sums.add(p.shell, scale * term);
  }
  const SeriesResult r = finish_series(sums, tol_, marginal_);
  KernelEval out;
  out.value = r.value;
  out.tail_estimate = r.tail_estimate;
  out.z = z;
  out.shells_used = r.shells_used;
  out.converged = r.converged;
  return out;
}

KernelEval abelian_differential(const SchottkyGroup& group, int j, Complex z, int maxlen) {
  return AbelianDifferential(group, j, maxlen).evaluate(z);
}

Complex alpha_period(const AbelianDifferential& phi, const SchottkyGroup& group, int k) {
  check_index(group, k);
  const Circle& c = group.circle(k);
  auto trapezoid = [&](int nodes) {
    Complex acc{};
    for (int m = 0; m < nodes; ++m) {
      const Complex u = std::polar(1.0, 2.0 * kPi * m / nodes);
      acc += phi(c.center + c.radius * u) * kI * c.radius * u;
    }
    return acc * (2.0 * kPi / nodes);
  };
  // Boundary of D: clockwise around a bounded D_k, counterclockwise when D_k contains infinity.
  const double sign = c.orientation > 0 ? -1.0 : 1.0;
  Complex previous = trapezoid(32);
  for (int nodes = 64; nodes <= (1 << 15); nodes *= 2) {
    const Complex current = trapezoid(nodes);
    if (std::abs(current - previous) <= 1e-12 * std::max(1.0, std::abs(current))) return sign * current;
    previous = current;
  }
  throw Error(ErrorKind::QuadratureNotConverged, "alpha period trapezoidal sums did not settle");
}

Complex alpha_period(const SchottkyGroup& group, int j, int k, int maxlen) {
  return alpha_period(AbelianDifferential(group, j, maxlen), group, k);
}

bool path_in_closure(const SchottkyGroup& group, const BetaPath& path, double margin) {
  if (path.vertices.size() < 2) return false;
  for (std::size_t i = 1; i < path.vertices.size(); ++i) {
    for (const Circle& c : group.circles()) {
      if (!segment_ok(c, path.vertices[i - 1], path.vertices[i], margin)) return false;
    }
  }
  return true;
}

namespace {

double cross(Complex a, Complex b) { return (std::conj(a) * b).imag(); }

bool segments_cross(Complex a, Complex b, Complex c, Complex d) {
  const double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

bool paths_cross(const BetaPath& p, const BetaPath& q) {
  for (std::size_t i = 1; i < p.vertices.size(); ++i) {
    for (std::size_t j = 1; j < q.vertices.size(); ++j) {
      if (segments_cross(p.vertices[i - 1], p.vertices[i], q.vertices[j - 1], q.vertices[j])) return true;
    }
  }
  return false;
}

// Admissible beta paths for k, shortest first: straight chords, else two-segment routes.
std::vector<BetaPath> beta_candidates(const SchottkyGroup& group, int k, double margin, bool detours) {
  const Circle& start = group.circle(k);
  const MoebiusMap& l = group.generator(k);
  constexpr int kBase = 64;
  std::vector<BetaPath> out;
  for (int i = 0; i < kBase; ++i) {
    const Complex z0 = start.point_at(2.0 * kPi * (i + 0.25) / kBase);
    BetaPath p{{z0, l(z0)}};
    if (path_in_closure(group, p, margin)) out.push_back(std::move(p));
  }
  if (out.empty() || detours) {
    const auto w = window(group);
    constexpr int kGrid = 41;
    std::vector<Complex> waypoints;
    for (int a = 0; a < kGrid; ++a) {
      for (int b = 0; b < kGrid; ++b) {
        const Complex p(w[0] + (w[1] - w[0]) * (a + 0.5) / kGrid, w[2] + (w[3] - w[2]) * (b + 0.5) / kGrid);
        if (group.clearance(p) > 0.0) waypoints.push_back(p);
      }
    }
    for (int i = 0; i < kBase; ++i) {
      const Complex z0 = start.point_at(2.0 * kPi * (i + 0.25) / kBase);
      for (const Complex& p : waypoints) {
        BetaPath path{{z0, p, l(z0)}};
        if (path_in_closure(group, path, margin)) out.push_back(std::move(path));
      }
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const BetaPath& a, const BetaPath& b) { return path_length(a) < path_length(b); });
  constexpr std::size_t kKeep = 512;
  if (out.size() > kKeep) out.resize(kKeep);
  return out;
}

bool choose_disjoint(const std::vector<std::vector<BetaPath>>& candidates, std::size_t k, std::vector<BetaPath>& chosen,
                     int& budget) {
  if (k == candidates.size()) return true;
  for (const BetaPath& p : candidates[k]) {
    if (--budget < 0) return false;
    bool clash = false;
    for (const BetaPath& q : chosen) clash = clash || paths_cross(p, q);
    if (clash) continue;
    chosen.push_back(p);
    if (choose_disjoint(candidates, k + 1, chosen, budget)) return true;
    chosen.pop_back();
  }
  return false;
}

}  // namespace

BetaPath route_beta_path(const SchottkyGroup& group, int k, double margin) {
  check_index(group, k);
  auto candidates = beta_candidates(group, k, margin, false);
  if (candidates.empty()) throw Error(ErrorKind::PathCrossesDisk, "no beta path avoids the other disks; supply waypoints");
  return candidates.front();
}

std::vector<BetaPath> route_beta_paths(const SchottkyGroup& group, double margin) {
  for (bool detours : {false, true}) {
    std::vector<std::vector<BetaPath>> candidates;
    for (int k = 1; k <= group.genus(); ++k) {
      candidates.push_back(beta_candidates(group, k, margin, detours));
      if (candidates.back().empty()) {
        throw Error(ErrorKind::PathCrossesDisk, "no beta path avoids the other disks; supply waypoints");
      }
    }
    std::vector<BetaPath> chosen;
    int budget = 200000;
    if (choose_disjoint(candidates, 0, chosen, budget)) return chosen;
  }
  throw Error(ErrorKind::PathCrossesDisk, "no pairwise disjoint beta paths found; supply waypoints");
}

PeriodMatrix period_matrix(const SchottkyGroup& group, const PeriodOptions& opts) {
  const int g = group.genus();
  std::vector<AbelianDifferential> phis;
  for (int j = 1; j <= g; ++j) phis.emplace_back(group, j, opts.maxlen);
  bool all_given = static_cast<int>(opts.paths.size()) >= g;
  for (int k = 1; all_given && k <= g; ++k) all_given = opts.paths[k - 1].has_value();
  std::vector<BetaPath> paths = all_given ? std::vector<BetaPath>{} : route_beta_paths(group);
  for (int k = 1; k <= g; ++k) {
    const bool given = static_cast<int>(opts.paths.size()) >= k && opts.paths[k - 1].has_value();
    if (!given) continue;
    if (!path_in_closure(group, *opts.paths[k - 1], 0.0)) {
      throw Error(ErrorKind::PathCrossesDisk, "supplied beta path leaves the fundamental domain");
    }
    if (all_given) {
      paths.push_back(*opts.paths[k - 1]);
    } else {
      paths[k - 1] = *opts.paths[k - 1];
    }
  }

  PeriodMatrix out;
  out.maxlen = opts.maxlen;
  out.tau = Eigen::MatrixXcd::Zero(g, g);
  std::vector<Segment> cells(static_cast<std::size_t>(g * g));
  parallel_for(cells.size(), opts.threads, [&](std::size_t idx) {
    const int j = static_cast<int>(idx) / g;
    const int k = static_cast<int>(idx) % g;
    const auto& phi = phis[j];
    auto f = [&](Complex z) { return phi.evaluate(z); };
    const double total = path_length(paths[k]);
    Segment acc;
    for (std::size_t s = 1; s < paths[k].vertices.size(); ++s) {
      const Complex a = paths[k].vertices[s - 1], b = paths[k].vertices[s];
      const Segment part = adaptive(f, a, b, 1e-13 * std::abs(b - a) / total);
      acc.value += part.value;
      acc.tail += part.tail;
    }
    cells[idx] = acc;
  });
  for (std::size_t idx = 0; idx < cells.size(); ++idx) {
    out.tau(static_cast<Eigen::Index>(idx) / g, static_cast<Eigen::Index>(idx) % g) = cells[idx].value;
    out.tail = std::max(out.tail, cells[idx].tail);
  }
  out.symmetry_defect = (out.tau - out.tau.transpose()).cwiseAbs().maxCoeff();
  const Eigen::MatrixXd im = 0.5 * (out.tau.imag() + out.tau.imag().transpose());
  out.im_positive = Eigen::LLT<Eigen::MatrixXd>(im).info() == Eigen::Success;
  return out;
}

PeriodMatrix period_matrix(const SchottkyGroup& group, int maxlen) {
  PeriodOptions opts;
  opts.maxlen = maxlen;
  return period_matrix(group, opts);
}

Eigen::MatrixXcd gram_matrix(const SchottkyGroup& group, int maxlen, int gridsize, int threads) {
  if (gridsize < 4) throw Error(ErrorKind::InvalidInput, "gridsize must be at least 4");
  const int g = group.genus();
  const Circle& outer_c = group.circle(1);
  const Circle& inner_c = group.circle(-1);
  if (std::abs(outer_c.center - inner_c.center) > 1e-9 * std::max(outer_c.radius, inner_c.radius)) {
    throw Error(ErrorKind::InvalidInput, "gram_check needs concentric C_1 and C_-1 (normalized group)");
  }
  const Complex center = outer_c.center;
  const double r_in = std::min(outer_c.radius, inner_c.radius);
  const double r_out = std::max(outer_c.radius, inner_c.radius);
  std::vector<AbelianDifferential> phis;
  for (int j = 1; j <= g; ++j) phis.emplace_back(group, j, maxlen);

  const double lo = std::log(r_in), hi = std::log(r_out);
  const double drho = (hi - lo) / gridsize;
  const double dtheta = 2.0 * kPi / gridsize;
  constexpr int kSub = 8;
  std::vector<Circle> others;
  for (int r = 2; r <= g; ++r) {
    others.push_back(group.circle(r));
    others.push_back(group.circle(-r));
  }

  std::vector<Eigen::MatrixXcd> rows(static_cast<std::size_t>(gridsize), Eigen::MatrixXcd::Zero(g, g));
  parallel_for(rows.size(), threads, [&](std::size_t row) {
    Eigen::VectorXcd values(g);
    auto accumulate = [&](double rho, double theta, double weight) {
      const double r = std::exp(rho);
      const Complex z = center + std::polar(r, theta);
      for (const Circle& c : others) {
        if (c.contains(RiemannSpherePoint(z))) return;
      }
      for (int j = 0; j < g; ++j) values(j) = phis[j](z);
      rows[row] += (weight * r * r) * values * values.adjoint();
    };
    const double rho = lo + (row + 0.5) * drho;
    for (int m = 0; m < gridsize; ++m) {
      const double theta = (m + 0.5) * dtheta;
      const Complex z = center + std::polar(std::exp(rho), theta);
      const double cell = std::exp(rho) * std::max(drho, dtheta);
      bool near = false;
      for (const Circle& c : others) near = near || std::abs(std::abs(z - c.center) - c.radius) < 1.5 * cell;
      if (!near) {
        accumulate(rho, theta, drho * dtheta);
        continue;
      }
      for (int a = 0; a < kSub; ++a) {
        for (int b = 0; b < kSub; ++b) {
          accumulate(rho + (a + 0.5 - kSub / 2.0) * drho / kSub, theta + (b + 0.5 - kSub / 2.0) * dtheta / kSub,
                     drho * dtheta / (kSub * kSub));
        }
      }
    }
  });
  Eigen::MatrixXcd gram = Eigen::MatrixXcd::Zero(g, g);
  for (const auto& r : rows) gram += r;
  return gram;
}

double gram_check(const SchottkyGroup& group, int maxlen, int gridsize) {
  const Eigen::MatrixXcd gram = gram_matrix(group, maxlen, gridsize, static_cast<int>(std::thread::hardware_concurrency()));
  const PeriodMatrix tau = period_matrix(group, maxlen);
  return (gram - tau.tau.imag().cast<Complex>()).cwiseAbs().maxCoeff();
}

}  // namespace schottky
