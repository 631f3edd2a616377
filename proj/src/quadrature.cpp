#include "dampedwave/quadrature.hpp"

#include "dampedwave/errors.hpp"

namespace dampedwave {

double simpson(std::span<const double> samples, double dx)
{
  const std::size_t n = samples.size();
  if (n < 2)
    return 0.0;
  std::size_t last = (n % 2 == 1) ? n - 1 : n - 2;
  double total = 0.0;
  for (std::size_t i = 0; i + 2 <= last; i += 2)
    total += samples[i] + 4.0 * samples[i + 1] + samples[i + 2];
  total *= dx / 3.0;
  if (last != n - 1)
    total += 0.5 * dx * (samples[n - 2] + samples[n - 1]);
  return total;
}

CVector compact_derivative(std::span<const cplx> f, double dx)
{
  const std::size_t n = f.size();
  if (n < 3)
    throw DomainError("compact_derivative: need at least 3 samples");
  Tridiagonal system;
  system.diag.assign(n, cplx{1.0});
  system.lower.assign(n - 1, cplx{0.25});
  system.upper.assign(n - 1, cplx{0.25});
  CVector rhs(n);
  system.upper[0] = 2.0;
  rhs[0] = (-2.5 * f[0] + 2.0 * f[1] + 0.5 * f[2]) / dx;
  system.lower[n - 2] = 2.0;
  rhs[n - 1] = (2.5 * f[n - 1] - 2.0 * f[n - 2] - 0.5 * f[n - 3]) / dx;
  for (std::size_t i = 1; i + 1 < n; ++i)
    rhs[i] = 0.75 * (f[i + 1] - f[i - 1]) / dx;
  return solve_tridiagonal(system, std::move(rhs));
}

HermiteEval quintic_hermite(double s, cplx f0, cplx d0, cplx dd0, cplx f1, cplx d1, cplx dd1)
{
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double s4 = s3 * s;
  const double s5 = s4 * s;
  const double h0 = 1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5;
  const double h1 = s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5;
  const double h2 = 0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5;
  const double h3 = 0.5 * s3 - s4 + 0.5 * s5;
  const double h4 = -4.0 * s3 + 7.0 * s4 - 3.0 * s5;
  const double h5 = 10.0 * s3 - 15.0 * s4 + 6.0 * s5;

  const double g0 = -30.0 * s2 + 60.0 * s3 - 30.0 * s4;
  const double g1 = 1.0 - 18.0 * s2 + 32.0 * s3 - 15.0 * s4;
  const double g2 = s - 4.5 * s2 + 6.0 * s3 - 2.5 * s4;
  const double g3 = 1.5 * s2 - 4.0 * s3 + 2.5 * s4;
  const double g4 = -12.0 * s2 + 28.0 * s3 - 15.0 * s4;
  const double g5 = 30.0 * s2 - 60.0 * s3 + 30.0 * s4;

  return {h0 * f0 + h1 * d0 + h2 * dd0 + h3 * dd1 + h4 * d1 + h5 * f1,
          g0 * f0 + g1 * d0 + g2 * dd0 + g3 * dd1 + g4 * d1 + g5 * f1};
}

} // namespace dampedwave
