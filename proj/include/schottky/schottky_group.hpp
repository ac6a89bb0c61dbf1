#pragma once

#include <optional>
#include <utility>
#include <span>
#include <string>
#include <vector>

#include "schottky/moebius.hpp"
#include "schottky/words.hpp"

namespace schottky {

/// A circle bounding the disk D_r. orientation = +1 when D_r is the bounded component,
/// -1 when D_r is the exterior (contains infinity).
struct Circle {
  Complex center;
  double radius = 1.0;
  int orientation = 1;

  /// Signed distance, positive inside D_r.
  double depth(const RiemannSpherePoint& z) const;
  bool contains(const RiemannSpherePoint& z) const { return depth(z) > 0.0; }
  Complex point_at(double theta) const { return center + radius * std::polar(1.0, theta); }
};

/// Where a point sits relative to the circle decomposition.
struct Region {
  Letter disk = 0;  // 0 means the fundamental domain D, otherwise the r of D_r
  bool in_fundamental_domain() const { return disk == 0; }
};

/// Marked Schottky group: generators L_1..L_g and circles C_{+-1}..C_{+-g}. Immutable.
class SchottkyGroup {
 public:
  /// Builds the group; missing circles are filled with the default choice (isometric circles,
  /// or concentric circles of radii |q|^{-+1/2} about the finite fixed point when c = 0).
  SchottkyGroup(std::vector<MoebiusMap> generators, std::optional<std::vector<Circle>> circles = std::nullopt);

  int genus() const { return static_cast<int>(generators_.size()); }

  /// L_r for r in {+-1..+-g}.
  const MoebiusMap& generator(Letter r) const;
  const LoxodromicDataD& fixed_data(Letter r) const;
  const Circle& circle(Letter r) const;
  std::span<const Circle> circles() const { return circles_; }
  std::span<const MoebiusMap> generators() const { return generators_; }

  /// a_1 = 0, b_1 = infinity and (g >= 2) a_2 = 1, to chordal tolerance 1e-9.
  bool is_normalized() const;

  /// Conjugate every generator (and circle) by m: L_r -> m L_r m^{-1}.
  SchottkyGroup conjugated(const MoebiusMap& m) const;

  /// Conjugates into normalized position (0, infinity, 1).
  SchottkyGroup normalized() const;

  /// Product of generator matrices in word order.
  MoebiusMap evaluate(std::span<const Letter> w) const;

  /// A deterministic point deep inside D (largest clearance from the circles on a grid).
  Complex interior_point() const;

  /// Distance from z to the nearest circle, negative when z is inside some D_r.
  double clearance(Complex z) const;

  /// Some pair of closed disks is closer than 1e-6 * max radius (or overlaps).
  bool is_marginal() const { return marginal_; }

 private:
  static std::size_t slot(Letter r) { return static_cast<std::size_t>(letter_key(r) - 1); }

  std::vector<MoebiusMap> generators_;
  std::vector<MoebiusMap> all_generators_;  // indexed by slot
  std::vector<LoxodromicDataD> fixed_;      // indexed by slot
  std::vector<Circle> circles_;             // indexed by slot: C_1, C_-1, C_2, C_-2, ...
  bool default_circles_ = true;
  bool marginal_ = false;
};

/// Image of a circle under a Moebius map; `inside` is a point of D_r used to orient the image.
/// Throws InvalidInput when the image is a line.
Circle map_circle(const MoebiusMap& m, const Circle& c, const RiemannSpherePoint& inside);

/// Default circle pair for a loxodromic generator: (C_r, C_-r).
std::pair<Circle, Circle> default_circles(const MoebiusMap& m);

/// Separation of two closed disks (negative when they meet).
double disk_separation(const Circle& lhs, const Circle& rhs);

struct ValidationReport {
  bool loxodromic = true;
  bool disjoint = true;
  bool marginal = false;  // separation below 1e-6 * max radius
  bool pairing = true;    // L_r maps C_r onto C_{-r}, exterior of D_r into D_{-r}
  bool normalized = false;
  std::vector<std::string> failures;
  bool ok() const { return loxodromic && disjoint && pairing && !marginal; }
};

ValidationReport validate(const SchottkyGroup& group);

/// Region of the circle decomposition containing z; throws OnBoundary within 1e-9 of a circle.
Region disk_membership(const SchottkyGroup& group, const RiemannSpherePoint& z);

/// Shell-fit estimate of the exponent of convergence at z in D using the spherical derivative
/// (conjugation invariant, finite when infinity is a limit point).
double convergence_exponent_estimate(const SchottkyGroup& group, Complex z, int max_shell);

/// <L_j>\Gamma representatives with length <= maxlen.
std::vector<Word> coset_representatives(const SchottkyGroup& group, Letter j, int maxlen);

}  // namespace schottky
