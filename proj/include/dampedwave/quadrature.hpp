#pragma once

#include "dampedwave/linalg.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <span>

namespace dampedwave {

/// Composite Gauss-Legendre rule (8 points per panel) of f over [lo, hi].
template <typename F>
auto composite_gauss(F&& f, double lo, double hi, int panels)
{
  using Rule = boost::math::quadrature::gauss<double, 8>;
  using Result = decltype(f(lo));
  Result total{};
  if (!(hi > lo) || panels < 1)
    return total;
  const double width = (hi - lo) / panels;
  const auto& nodes = Rule::abscissa();
  const auto& weights = Rule::weights();
  for (int p = 0; p < panels; ++p) {
    const double mid = lo + (p + 0.5) * width;
    const double half = 0.5 * width;
    // boost stores the non-negative half of the symmetric rule
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      if (nodes[j] == 0.0) {
        total += weights[j] * half * f(mid);
      } else {
        total += weights[j] * half * f(mid + half * nodes[j]);
        total += weights[j] * half * f(mid - half * nodes[j]);
      }
    }
  }
  return total;
}

/// Composite Simpson rule for uniformly spaced samples (odd sample count required;
/// an even count closes with a trapezoid on the last cell).
double simpson(std::span<const double> samples, double dx);

/// Fourth-order compact (Pade) first derivative of uniformly spaced samples,
/// third-order closures at both ends.
CVector compact_derivative(std::span<const cplx> samples, double dx);

/// Quintic Hermite interpolation on [0, 1] from value, first and second derivative at both
/// ends (derivatives already scaled to the unit interval). Returns value and first derivative.
struct HermiteEval {
  cplx value;
  cplx d1;
};
HermiteEval quintic_hermite(double s, cplx f0, cplx d0, cplx dd0, cplx f1, cplx d1, cplx dd1);

} // namespace dampedwave
