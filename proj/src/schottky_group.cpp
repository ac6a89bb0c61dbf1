#include "schottky/schottky_group.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace schottky {

namespace {

constexpr double kBoundaryTol = 1e-9;
constexpr double kMarginFactor = 1e-6;

// Circle through three finite points; throws when they are collinear (image is a line).
Circle circumcircle(Complex p1, Complex p2, Complex p3) {
  const Complex u = p2 - p1;
  const Complex v = p3 - p1;
  const double cross = (std::conj(u) * v).imag();
  const double scale = std::max({std::abs(u), std::abs(v), 1e-300});
  if (std::abs(cross) < 1e-14 * scale * scale) throw Error(ErrorKind::InvalidInput, "image of a circle is a line");
  // Center solves |c - p1| = |c - p2| = |c - p3|.
  const Complex center = p1 + kI * (std::norm(u) * v - std::norm(v) * u) / (2.0 * cross);
  Circle out;
  out.center = center;
  out.radius = (std::abs(p1 - center) + std::abs(p2 - center) + std::abs(p3 - center)) / 3.0;
  return out;
}

int orientation_for(const Circle& c, const RiemannSpherePoint& inside) {
  if (inside.is_infinite()) return -1;
  return std::abs(inside.value() - c.center) < c.radius ? 1 : -1;
}

}  // namespace

double Circle::depth(const RiemannSpherePoint& z) const {
  if (z.is_infinite()) {
    return orientation > 0 ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
  }
  return orientation * (radius - std::abs(z.value() - center));
}

Circle map_circle(const MoebiusMap& m, const Circle& c, const RiemannSpherePoint& inside) {
  std::array<Complex, 3> image;
  for (int k = 0; k < 3; ++k) {
    const RiemannSpherePoint w = m.apply(RiemannSpherePoint(c.point_at(2.0 * kPi * k / 3.0 + 0.1)));
    if (w.is_infinite()) throw Error(ErrorKind::InvalidInput, "image of a circle passes through infinity");
    image[k] = w.value();
  }
  Circle out = circumcircle(image[0], image[1], image[2]);
  out.orientation = orientation_for(out, m.apply(inside));
  return out;
}

std::pair<Circle, Circle> default_circles(const MoebiusMap& m) {
  const LoxodromicDataD fd = m.loxodromic_data();
  Circle forward;
  Circle backward;
  if (std::abs(m.c()) > 0.0) {
    // Isometric circles: |cz + d| = 1 bounds D_r (contains b_r); |-cz + a| = 1 bounds D_-r.
    forward = {-m.d() / m.c(), 1.0 / std::abs(m.c()), 1};
    backward = {m.a() / m.c(), 1.0 / std::abs(m.c()), 1};
    return {forward, backward};
  }
  // L fixes infinity: concentric circles about the finite fixed point, exchanged by L.
  const double root = std::sqrt(std::abs(fd.multiplier));
  const bool repels_at_infinity = fd.repelling.is_infinite();
  const Complex p = repels_at_infinity ? fd.attracting.value() : fd.repelling.value();
  if (repels_at_infinity) {
    forward = {p, 1.0 / root, -1};
    backward = {p, root, 1};
  } else {
    forward = {p, root, 1};
    backward = {p, 1.0 / root, -1};
  }
  return {forward, backward};
}

double disk_separation(const Circle& lhs, const Circle& rhs) {
  const double dist = std::abs(lhs.center - rhs.center);
  if (lhs.orientation > 0 && rhs.orientation > 0) return dist - lhs.radius - rhs.radius;
  if (lhs.orientation > 0) return rhs.radius - dist - lhs.radius;
  if (rhs.orientation > 0) return lhs.radius - dist - rhs.radius;
  return -std::numeric_limits<double>::infinity();  // two disks about infinity always meet
}

SchottkyGroup::SchottkyGroup(std::vector<MoebiusMap> generators, std::optional<std::vector<Circle>> circles)
    : generators_(std::move(generators)) {
  const int g = genus();
  if (g < 1) throw Error(ErrorKind::InvalidInput, "a Schottky group needs at least one generator");
  all_generators_.resize(2 * g);
  fixed_.resize(2 * g);
  circles_.resize(2 * g);
  for (int r = 1; r <= g; ++r) {
    const MoebiusMap& m = generators_[r - 1];
    all_generators_[slot(r)] = m;
    all_generators_[slot(-r)] = m.inverse();
    fixed_[slot(r)] = m.loxodromic_data();
    fixed_[slot(-r)] = {fixed_[slot(r)].repelling, fixed_[slot(r)].attracting, fixed_[slot(r)].multiplier};
  }
  if (circles) {
    if (static_cast<int>(circles->size()) != 2 * g) throw Error(ErrorKind::InvalidInput, "expected 2g circles");
    default_circles_ = false;
    for (int key = 1; key <= 2 * g; ++key) {
      Circle c = (*circles)[key - 1];
      if (!(c.radius > 0.0) || !std::isfinite(c.radius)) throw Error(ErrorKind::InvalidInput, "circle radius must be positive");
      // D_r is the side containing the repelling point b_r.
      c.orientation = orientation_for(c, fixed_[key - 1].repelling);
      circles_[key - 1] = c;
    }
  } else {
    for (int r = 1; r <= g; ++r) {
      const auto [forward, backward] = default_circles(generators_[r - 1]);
      circles_[slot(r)] = forward;
      circles_[slot(-r)] = backward;
    }
  }
  double max_radius = 0.0;
  for (const Circle& c : circles_) max_radius = std::max(max_radius, c.radius);
  for (std::size_t i = 0; i < circles_.size(); ++i) {
    for (std::size_t j = i + 1; j < circles_.size(); ++j) {
      if (disk_separation(circles_[i], circles_[j]) < kMarginFactor * max_radius) marginal_ = true;
    }
  }
}

const MoebiusMap& SchottkyGroup::generator(Letter r) const {
  if (r == 0 || std::abs(r) > genus()) throw Error(ErrorKind::InvalidInput, "generator index out of range");
  return all_generators_[slot(r)];
}

const LoxodromicDataD& SchottkyGroup::fixed_data(Letter r) const {
  if (r == 0 || std::abs(r) > genus()) throw Error(ErrorKind::InvalidInput, "generator index out of range");
  return fixed_[slot(r)];
}

const Circle& SchottkyGroup::circle(Letter r) const {
  if (r == 0 || std::abs(r) > genus()) throw Error(ErrorKind::InvalidInput, "generator index out of range");
  return circles_[slot(r)];
}

bool SchottkyGroup::is_normalized() const {
  const auto& f1 = fixed_data(1);
  bool ok = chordal_distance(f1.attracting, RiemannSpherePoint(0.0)) < kBoundaryTol &&
            chordal_distance(f1.repelling, RiemannSpherePoint::infinity()) < kBoundaryTol;
  if (genus() >= 2) ok = ok && chordal_distance(fixed_data(2).attracting, RiemannSpherePoint(1.0)) < kBoundaryTol;
  return ok;
}

SchottkyGroup SchottkyGroup::conjugated(const MoebiusMap& m) const {
  std::vector<MoebiusMap> gens;
  gens.reserve(generators_.size());
  const MoebiusMap minv = m.inverse();
  for (const auto& gen : generators_) gens.push_back(m * gen * minv);
  if (default_circles_) return SchottkyGroup(std::move(gens));
  std::vector<Circle> mapped;
  mapped.reserve(circles_.size());
  for (std::size_t k = 0; k < circles_.size(); ++k) mapped.push_back(map_circle(m, circles_[k], fixed_[k].repelling));
  return SchottkyGroup(std::move(gens), std::move(mapped));
}

SchottkyGroup SchottkyGroup::normalized() const {
  const auto& f1 = fixed_data(1);
  if (genus() == 1) return conjugated(MoebiusMap(detail::zero_infinity_frame(f1.attracting, f1.repelling)));
  return conjugated(normalizing_conjugation(f1.attracting, f1.repelling, fixed_data(2).attracting));
}

MoebiusMap SchottkyGroup::evaluate(std::span<const Letter> w) const {
  MoebiusMap out;
  for (Letter r : w) out = out * generator(r);
  return out;
}

double SchottkyGroup::clearance(Complex z) const {
  double best = std::numeric_limits<double>::infinity();
  for (const Circle& c : circles_) best = std::min(best, -c.depth(RiemannSpherePoint(z)));
  return best;
}

Complex SchottkyGroup::interior_point() const {
  // Search window: the bounded complement of an exterior disk if there is one, else the hull of the circles.
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  bool bounded = false;
  for (const Circle& c : circles_) {
    if (c.orientation < 0) {
      x0 = c.center.real() - c.radius, x1 = c.center.real() + c.radius;
      y0 = c.center.imag() - c.radius, y1 = c.center.imag() + c.radius;
      bounded = true;
      break;
    }
  }
  if (!bounded) {
    for (const Circle& c : circles_) {
      x0 = std::min(x0, c.center.real() - c.radius), x1 = std::max(x1, c.center.real() + c.radius);
      y0 = std::min(y0, c.center.imag() - c.radius), y1 = std::max(y1, c.center.imag() + c.radius);
    }
  }
  constexpr int kGrid = 201;
  Complex best_z{};
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < kGrid; ++i) {
    for (int j = 0; j < kGrid; ++j) {
      const Complex z(x0 + (x1 - x0) * (i + 0.5) / kGrid, y0 + (y1 - y0) * (j + 0.5) / kGrid);
      const double c = clearance(z);
      if (c > best) {
        best = c;
        best_z = z;
      }
    }
  }
  if (!(best > 0.0)) throw Error(ErrorKind::InvalidInput, "no interior point of the fundamental domain found");
  return best_z;
}

ValidationReport validate(const SchottkyGroup& group) {
  ValidationReport report;
  const int g = group.genus();
  auto fail = [&report](const std::string& msg) { report.failures.push_back(msg); };

  for (int r = 1; r <= g; ++r) {
    try {
      (void)group.generator(r).loxodromic_data();
    } catch (const Error&) {
      report.loxodromic = false;
      fail("L_" + std::to_string(r) + " is not loxodromic");
    }
  }

  double max_radius = 0.0;
  for (const Circle& c : group.circles()) max_radius = std::max(max_radius, c.radius);
  for (int k1 = 1; k1 <= 2 * g; ++k1) {
    for (int k2 = k1 + 1; k2 <= 2 * g; ++k2) {
      const Letter r1 = letter_from_key(k1);
      const Letter r2 = letter_from_key(k2);
      const double sep = disk_separation(group.circle(r1), group.circle(r2));
      std::ostringstream label;
      label << "D_" << r1 << " and D_" << r2;
      if (sep < 0.0) {
        report.disjoint = false;
        fail(label.str() + " overlap");
      } else if (sep < kMarginFactor * max_radius) {
        report.marginal = true;
        fail(label.str() + " are marginally separated");
      }
    }
  }

  constexpr int kSamples = 16;
  for (int key = 1; key <= 2 * g; ++key) {
    const Letter r = letter_from_key(key);
    const MoebiusMap& m = group.generator(r);
    const Circle& src = group.circle(r);
    const Circle& dst = group.circle(-r);
    double worst = 0.0;
    bool oriented = true;
    for (int k = 0; k < kSamples; ++k) {
      const double theta = 2.0 * kPi * (k + 0.25) / kSamples;
      const Complex p = src.point_at(theta);
      const RiemannSpherePoint w = m.apply(RiemannSpherePoint(p));
      if (w.is_infinite()) {
        worst = std::max(worst, 2.0);
        continue;
      }
      const Complex dir = w.value() - dst.center;
      const Complex nearest = dst.center + dst.radius * (std::abs(dir) > 0.0 ? dir / std::abs(dir) : Complex(1.0));
      worst = std::max(worst, chordal_distance(w, RiemannSpherePoint(nearest)));
      // A point just outside D_r must land inside D_-r.
      const Complex outward = std::polar(1.0, theta) * static_cast<double>(src.orientation);
      const RiemannSpherePoint pushed = m.apply(RiemannSpherePoint(p + 1e-3 * src.radius * outward));
      if (!(dst.depth(pushed) > 0.0)) oriented = false;
    }
    if (worst >= kBoundaryTol || !oriented) {
      report.pairing = false;
      std::ostringstream msg;
      msg << "L_" << r << " does not map C_" << r << " onto C_" << -r;
      if (worst >= kBoundaryTol) msg << " (chordal deviation " << worst << ")";
      if (!oriented) msg << " (orientation)";
      fail(msg.str());
    }
  }

  report.normalized = group.is_normalized();
  return report;
}

Region disk_membership(const SchottkyGroup& group, const RiemannSpherePoint& z) {
  Region out;
  const int g = group.genus();
  for (int key = 1; key <= 2 * g; ++key) {
    const Letter r = letter_from_key(key);
    const double d = group.circle(r).depth(z);
    if (std::abs(d) < kBoundaryTol) throw Error(ErrorKind::OnBoundary, "point lies on C_" + std::to_string(r));
    if (d > 0.0 && out.disk == 0) out.disk = r;
  }
  return out;
}

double convergence_exponent_estimate(const SchottkyGroup& group, Complex z, int max_shell) {
  if (max_shell < 3) throw Error(ErrorKind::InvalidInput, "max_shell must be at least 3");
  if (disk_membership(group, RiemannSpherePoint(z)).disk != 0) {
    throw Error(ErrorKind::InvalidInput, "convergence estimate needs a point of the fundamental domain");
  }
  // log of the spherical derivative (1 + |z|^2) / (|az + b|^2 + |cz + d|^2) per shell.
  std::vector<std::vector<double>> logs(max_shell + 1);
  const double zz = 1.0 + std::norm(z);
  Word word;
  auto visit = [&](auto&& self, const MoebiusMap& m) -> void {
    const double den = std::norm(m.a() * z + m.b()) + std::norm(m.c() * z + m.d());
    logs[word.size()].push_back(std::log(zz / den));
    if (static_cast<int>(word.size()) == max_shell) return;
    for (int key = 1; key <= 2 * group.genus(); ++key) {
      const Letter r = letter_from_key(key);
      if (!word.empty() && word.back() == -r) continue;
      word.push_back(r);
      self(self, m * group.generator(r));
      word.pop_back();
    }
  };
  visit(visit, MoebiusMap::identity());

  // Shells 2..max_shell; the first shells are dominated by the group's shortest words.
  const int first = 2;
  auto shell_logs = [&](double s) {
    std::vector<double> out;
    for (int l = first; l <= max_shell; ++l) {
      double peak = -std::numeric_limits<double>::infinity();
      for (double v : logs[l]) peak = std::max(peak, s * v);
      double acc = 0.0;
      for (double v : logs[l]) acc += std::exp(s * v - peak);
      out.push_back(peak + std::log(acc));
    }
    return out;
  };
  auto fit = [&](double s, double* residual) {
    const std::vector<double> y = shell_logs(s);
    const double n = static_cast<double>(y.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double x = static_cast<double>(i);
      sx += x, sy += y[i], sxx += x * x, sxy += x * y[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    if (residual) {
      const double intercept = (sy - slope * sx) / n;
      double worst = 0.0;
      for (std::size_t i = 0; i < y.size(); ++i) {
        worst = std::max(worst, std::abs(y[i] - intercept - slope * static_cast<double>(i)));
      }
      *residual = worst;
    }
    return slope;
  };

  double lo = 0.0;
  double hi = 2.0;
  if (fit(lo, nullptr) <= 1e-12) return 0.0;
  if (fit(hi, nullptr) > 0.0) throw Error(ErrorKind::Inconclusive, "shell sums still grow at s = 2");
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (fit(mid, nullptr) > 0.0 ? lo : hi) = mid;
  }
  const double estimate = 0.5 * (lo + hi);
  double residual = 0.0;
  fit(estimate, &residual);
  if (residual > 0.5) throw Error(ErrorKind::Inconclusive, "shell sums are not geometric");
  return estimate;
}

std::vector<Word> coset_representatives(const SchottkyGroup& group, Letter j, int maxlen) {
  return coset_representatives(group.genus(), j, maxlen);
}

}  // namespace schottky
