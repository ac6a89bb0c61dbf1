#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "schottky/kernels.hpp"
#include "schottky/schottky_group.hpp"

namespace schottky {

/// phi_j as a sum over left cosets gamma <L_j> (words not ending in +-j), with the pole pairs
/// gamma(a_j), gamma(b_j) precomputed so that repeated evaluation is cheap.
class AbelianDifferential {
 public:
  /// Requires an exponent estimate below 0.9 (DeltaTooLarge otherwise).
  AbelianDifferential(const SchottkyGroup& group, int j, int maxlen, double tol = 1e-10);

  /// (1/2 pi i) sum [1/(z - gamma a_j) - 1/(z - gamma b_j)] with its shell tail.
  KernelEval evaluate(Complex z) const;
  Complex operator()(Complex z) const { return evaluate(z).value; }

  int index() const { return j_; }
  int maxlen() const { return maxlen_; }

 private:
  struct PolePair {
    RiemannSpherePoint a;
    RiemannSpherePoint b;
    int shell;
  };
  int j_;
  int maxlen_;
  double tol_;
  bool marginal_;
  std::vector<PolePair> poles_;
};

KernelEval abelian_differential(const SchottkyGroup& group, int j, Complex z, int maxlen);

/// Integral of phi_j over C_k, oriented as part of the boundary of D, by trapezoidal sums
/// doubled until two successive values agree to 1e-12 (QuadratureNotConverged after 2^15 nodes).
Complex alpha_period(const SchottkyGroup& group, int j, int k, int maxlen);
Complex alpha_period(const AbelianDifferential& phi, const SchottkyGroup& group, int k);

/// Polyline from a point of C_k to its image on C_{-k}.
struct BetaPath {
  std::vector<Complex> vertices;
};

/// Shortest straight chord (64 base points on C_k) that keeps `margin` * radius away from all
/// other disks, else the shortest two-segment route through a grid waypoint in D.
/// Throws PathCrossesDisk when nothing qualifies.
BetaPath route_beta_path(const SchottkyGroup& group, int k, double margin = 0.1);

/// One path per k, pairwise non-crossing (so that the beta cycles together with the C_k form a
/// canonical basis), shortest-first backtracking over the candidates of route_beta_path.
std::vector<BetaPath> route_beta_paths(const SchottkyGroup& group, double margin = 0.1);

/// True when the polyline stays in the closure of D, touching circles only at its endpoints.
bool path_in_closure(const SchottkyGroup& group, const BetaPath& path, double margin);

struct PeriodMatrix {
  Eigen::MatrixXcd tau;
  int maxlen = 0;
  double tail = 0.0;
  double symmetry_defect = 0.0;  // max |tau_jk - tau_kj|
  bool im_positive = false;      // Cholesky of Im tau succeeds
};

struct PeriodOptions {
  int maxlen = 8;
  int threads = 1;
  /// Per-k override of the automatic beta paths.
  std::vector<std::optional<BetaPath>> paths;
};

/// tau_jk = integral of phi_j along the beta path of k, adaptive Gauss-Kronrod (7, 15).
PeriodMatrix period_matrix(const SchottkyGroup& group, const PeriodOptions& opts);
PeriodMatrix period_matrix(const SchottkyGroup& group, int maxlen);

/// Integral of phi_j conj(phi_k) dx dy over D on a log-polar grid between the concentric
/// circles C_1 and C_-1, other disks masked out (cells near a circle are subsampled).
/// Returns max |gram_jk - Im tau_jk|.
double gram_check(const SchottkyGroup& group, int maxlen, int gridsize);

/// The Gram matrix itself, for inspection.
Eigen::MatrixXcd gram_matrix(const SchottkyGroup& group, int maxlen, int gridsize, int threads = 1);

}  // namespace schottky
