#pragma once

#include <Eigen/Core>

#include <cmath>
#include <complex>
#include <limits>

#include "schottky/constants.hpp"
#include "schottky/errors.hpp"

namespace schottky {

/// A point of the Riemann sphere: a finite complex number or the point at infinity.
template <typename Real>
class SpherePoint {
 public:
  using Scalar = std::complex<Real>;

  SpherePoint() = default;
  SpherePoint(Scalar z) : value_(z) {}  // NOLINT(google-explicit-constructor)
  SpherePoint(Real x) : value_(x) {}    // NOLINT(google-explicit-constructor)

  static SpherePoint infinity() {
    SpherePoint p;
    p.infinite_ = true;
    return p;
  }

  bool is_infinite() const { return infinite_; }
  bool is_finite() const { return !infinite_; }

  /// Finite value; meaningless when is_infinite().
  Scalar value() const { return value_; }

  friend bool operator==(const SpherePoint& p, const SpherePoint& q) {
    if (p.infinite_ || q.infinite_) return p.infinite_ == q.infinite_;
    return p.value_ == q.value_;
  }

 private:
  Scalar value_{};
  bool infinite_ = false;
};

/// Chordal distance on the unit-diameter-2 sphere; bounded by 2.
template <typename Real>
Real chordal_distance(const SpherePoint<Real>& p, const SpherePoint<Real>& q) {
  if (p.is_infinite() && q.is_infinite()) return Real(0);
  if (p.is_infinite()) return Real(2) / std::sqrt(Real(1) + std::norm(q.value()));
  if (q.is_infinite()) return Real(2) / std::sqrt(Real(1) + std::norm(p.value()));
  return Real(2) * std::abs(p.value() - q.value()) /
         std::sqrt((Real(1) + std::norm(p.value())) * (Real(1) + std::norm(q.value())));
}

template <typename Real>
struct LoxodromicData {
  SpherePoint<Real> attracting;
  SpherePoint<Real> repelling;
  std::complex<Real> multiplier;
};

/// z -> (a z + b) / (c z + d), stored as a unit-determinant matrix.
/// The representative is defined up to sign; nothing exported depends on the sign.
template <typename Real>
class Moebius {
 public:
  using Scalar = std::complex<Real>;
  using Matrix = Eigen::Matrix<Scalar, 2, 2>;
  using Point = SpherePoint<Real>;

  Moebius() : m_(Matrix::Identity()) {}

  Moebius(Scalar a, Scalar b, Scalar c, Scalar d) {
    m_ << a, b, c, d;
    normalize_determinant();
  }

  explicit Moebius(const Matrix& m) : m_(m) { normalize_determinant(); }

  static Moebius identity() { return Moebius(); }

  Scalar a() const { return m_(0, 0); }
  Scalar b() const { return m_(0, 1); }
  Scalar c() const { return m_(1, 0); }
  Scalar d() const { return m_(1, 1); }
  const Matrix& matrix() const { return m_; }

  Scalar determinant() const { return m_(0, 0) * m_(1, 1) - m_(0, 1) * m_(1, 0); }
  Scalar trace_squared() const {
    const Scalar t = m_.trace();
    return t * t;
  }

  /// (this o other)(z) = this(other(z)). The product of unimodular matrices is unimodular;
  /// dividing by the computed ad - bc would only inject its cancellation error for long words.
  friend Moebius operator*(const Moebius& lhs, const Moebius& rhs) {
    Moebius out;
    out.m_ = lhs.m_ * rhs.m_;
    return out;
  }

  Moebius inverse() const {
    Matrix inv;
    inv << d(), -b(), -c(), a();
    Moebius out;
    out.m_ = inv;  // adjugate of a det-1 matrix is already unimodular
    return out;
  }

  Point apply(const Point& z) const {
    if (z.is_infinite()) {
      if (c() == Scalar(0)) return Point::infinity();
      return Point(a() / c());
    }
    const Scalar den = c() * z.value() + d();
    if (den == Scalar(0)) return Point::infinity();
    return Point((a() * z.value() + b()) / den);
  }

  /// Finite-only evaluation for hot loops; the caller guarantees z is not the pole.
  Scalar operator()(Scalar z) const { return (a() * z + b()) / (c() * z + d()); }

  /// gamma'(z) = 1 / (c z + d)^2.
  Scalar derivative(Scalar z) const {
    const Scalar den = c() * z + d();
    if (std::abs(den) < Real(1e-300)) throw Error(ErrorKind::PoleError, "derivative evaluated at the pole");
    return Scalar(1) / (den * den);
  }

  /// Multiplier and fixed points of a loxodromic element.
  LoxodromicData<Real> loxodromic_data() const;

  /// Multiplier only (no fixed points), for hot loops over group elements.
  Scalar multiplier() const;

  /// Sup-norm distance between matrix representatives, modulo the sign ambiguity.
  Real distance(const Moebius& other) const {
    const Real plus = (m_ - other.m_).cwiseAbs().maxCoeff();
    const Real minus = (m_ + other.m_).cwiseAbs().maxCoeff();
    return std::min(plus, minus);
  }

 private:
  void normalize_determinant() {
    const Scalar det = determinant();
    if (det == Scalar(0)) throw Error(ErrorKind::InvalidInput, "singular Moebius matrix");
    m_ /= std::sqrt(det);
  }

  Matrix m_;
};

using MoebiusMap = Moebius<double>;
using RiemannSpherePoint = SpherePoint<double>;
using LoxodromicDataD = LoxodromicData<double>;

template <typename Real>
Moebius<Real> compose(const Moebius<Real>& outer, const Moebius<Real>& inner) {
  return outer * inner;
}

template <typename Real>
Moebius<Real> inverse(const Moebius<Real>& m) {
  return m.inverse();
}

template <typename Real>
LoxodromicData<Real> Moebius<Real>::loxodromic_data() const {
  constexpr Real kMargin = Real(1e-10);
  const Scalar tr2 = trace_squared();
  // Distance from tr^2 to the real segment [0, 4]; inside it the map is elliptic, parabolic or the identity.
  const Real excess = std::max({Real(0), -tr2.real(), tr2.real() - Real(4)});
  if (std::hypot(tr2.imag(), excess) <= kMargin) {
    throw Error(ErrorKind::NotLoxodromic, "trace squared lies in [0,4]");
  }

  // q + 1/q = tr^2 - 2; take the large root stably and invert it.
  const Scalar u = tr2 - Scalar(2);
  const Scalar s = std::sqrt(u * u - Scalar(4));
  const Scalar big = std::abs(u + s) >= std::abs(u - s) ? (u + s) / Real(2) : (u - s) / Real(2);
  LoxodromicData<Real> out;
  out.multiplier = Scalar(1) / big;

  // Fixed points: c z^2 + (d - a) z - b = 0.
  const Scalar qa = c();
  const Scalar qb = d() - a();
  const Scalar qc = -b();
  Point r1, r2;
  if (qa == Scalar(0)) {
    r1 = Point::infinity();
    r2 = Point(-qc / qb);
  } else {
    const Scalar disc = std::sqrt(qb * qb - Real(4) * qa * qc);
    const Scalar t = std::abs(qb + disc) >= std::abs(qb - disc) ? -(qb + disc) / Real(2) : -(qb - disc) / Real(2);
    r1 = Point(t / qa);
    r2 = t == Scalar(0) ? Point(Scalar(0)) : Point(qc / t);
  }

  // |gamma'| at a finite fixed point is |q| or 1/|q|; infinity is attracting iff the finite one repels.
  auto contraction = [&](const Point& p, const Point& other) {
    if (p.is_finite()) return std::abs(Scalar(1) / std::pow(c() * p.value() + d(), 2));
    return Real(1) / std::abs(Scalar(1) / std::pow(c() * other.value() + d(), 2));
  };
  if (contraction(r1, r2) < contraction(r2, r1)) {
    out.attracting = r1;
    out.repelling = r2;
  } else {
    out.attracting = r2;
    out.repelling = r1;
  }
  return out;
}

template <typename Real>
std::complex<Real> Moebius<Real>::multiplier() const {
  using Scalar = std::complex<Real>;
  const Scalar u = trace_squared() - Scalar(2);
  const Scalar s = std::sqrt(u * u - Scalar(4));
  const Scalar big = std::abs(u + s) >= std::abs(u - s) ? (u + s) / Real(2) : (u - s) / Real(2);
  return Scalar(1) / big;
}

namespace detail {

// Matrix of a map sending a -> 0 and b -> infinity.
template <typename Real>
Eigen::Matrix<std::complex<Real>, 2, 2> zero_infinity_frame(const SpherePoint<Real>& a, const SpherePoint<Real>& b) {
  using Scalar = std::complex<Real>;
  Eigen::Matrix<Scalar, 2, 2> t;
  if (b.is_infinite()) {
    t << Scalar(1), -a.value(), Scalar(0), Scalar(1);
  } else if (a.is_infinite()) {
    t << Scalar(0), Scalar(1), Scalar(1), -b.value();
  } else {
    t << Scalar(1), -a.value(), Scalar(1), -b.value();
  }
  return t;
}

}  // namespace detail

/// The loxodromic map with attracting point a, repelling point b and multiplier q:
/// (gz - a)/(gz - b) = q (z - a)/(z - b).
template <typename Real>
Moebius<Real> from_fixed_data(const SpherePoint<Real>& a, const SpherePoint<Real>& b, std::complex<Real> q) {
  using Scalar = std::complex<Real>;
  const Real aq = std::abs(q);
  if (!(aq > Real(0) && aq < Real(1))) throw Error(ErrorKind::InvalidMultiplier, "|q| must lie in (0,1)");
  if (chordal_distance(a, b) < Real(1e-12)) throw Error(ErrorKind::DegeneratePoints, "fixed points coincide");
  const Moebius<Real> frame(detail::zero_infinity_frame(a, b));
  const Scalar root = std::sqrt(q);
  const Moebius<Real> dilation(root, Scalar(0), Scalar(0), Scalar(1) / root);
  return frame.inverse() * dilation * frame;
}

/// The unique map sending (a1, b1, a2) to (0, infinity, 1).
template <typename Real>
Moebius<Real> normalizing_conjugation(const SpherePoint<Real>& a1, const SpherePoint<Real>& b1,
                                      const SpherePoint<Real>& a2) {
  using Scalar = std::complex<Real>;
  constexpr Real kTol = Real(1e-12);
  if (chordal_distance(a1, b1) < kTol || chordal_distance(a1, a2) < kTol || chordal_distance(b1, a2) < kTol) {
    throw Error(ErrorKind::DegeneratePoints, "normalization points must be distinct");
  }
  auto t = detail::zero_infinity_frame(a1, b1);
  const SpherePoint<Real> w = Moebius<Real>(t).apply(a2);
  // w is finite and nonzero because the three points are distinct.
  const Scalar scale = w.value();
  t.row(1) *= scale;
  return Moebius<Real>(t);
}

}  // namespace schottky
