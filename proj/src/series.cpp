#include "schottky/series.hpp"

namespace schottky {

TailFit fit_tail(std::span<const double> magnitudes) {
  constexpr double kRefuse = 0.95;
  TailFit out;
  if (magnitudes.empty()) return out;
  const double last = magnitudes.back();
  if (last == 0.0) return out;
  if (magnitudes.size() < 3) {
    out.ratio = 1.0;
    out.tail = last * kRefuse / (1.0 - kRefuse);
    out.geometric = false;
    return out;
  }
  const std::size_t n = magnitudes.size();
  const double m2 = magnitudes[n - 3];
  const double m1 = magnitudes[n - 2];
  const double r1 = m2 > 0.0 ? m1 / m2 : 1.0;
  const double r2 = m1 > 0.0 ? last / m1 : 1.0;
  out.ratio = std::max(r1, r2);
  if (out.ratio < kRefuse) {
    out.tail = last * out.ratio / (1.0 - out.ratio);
    return out;
  }
  // Shells that alternate in size decay geometrically in pairs; retry on the pair sums.
  if (n >= 6) {
    const double b0 = magnitudes[n - 6] + magnitudes[n - 5];
    const double b1 = magnitudes[n - 4] + magnitudes[n - 3];
    const double b2 = m1 + last;
    const double rb = std::max(b0 > 0.0 ? b1 / b0 : 1.0, b1 > 0.0 ? b2 / b1 : 1.0);
    if (rb < kRefuse) {
      out.ratio = std::sqrt(rb);
      out.tail = b2 * rb / (1.0 - rb);
      return out;
    }
  }
  out.geometric = false;
  out.tail = last * kRefuse / (1.0 - kRefuse);
  return out;
}

SeriesResult finish_series(const ShellSums& sums, double tol, bool refuse) {
  SeriesResult out;
  out.value = sums.total();
  const TailFit fit = fit_tail(sums.magnitude);
  out.tail_estimate = fit.tail;
  out.shells_used = static_cast<int>(sums.value.size()) - 1;
  out.converged = !refuse && fit.geometric && fit.tail <= tol;
  return out;
}

}  // namespace schottky
