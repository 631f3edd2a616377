#pragma once

#include "dampedwave/cap_solver.hpp"
#include "dampedwave/core_model.hpp"
#include "dampedwave/eigenfinder.hpp"
#include "dampedwave/quadrature.hpp"

#include <cstddef>

namespace dampedwave {

/// q = base + offset with base = 2 pi m / b (= 1/h^2) and offset = lambda_h^2 / 2, kept apart so
/// that k_m^2 - q^2 does not cancel catastrophically.
struct QuasiFrequency {
  double base = 0.0;
  cplx offset;

  cplx value() const { return base + offset; }
  double real() const { return base + offset.real(); }
  double imag() const { return offset.imag(); }
  /// (2 pi m / b)^2 - q^2
  cplx mode_shift() const { return -offset * (2.0 * base + offset); }
};

struct Ansatz {
  long m = 0;
  QuasiFrequency q;
  /// |Re q - 1/h^2 - pi^2 l^2 h^2 / a^2| / (pi^2 l^2 h^2 / a^2)
  double re_expansion_error = 0.0;
  /// Im q / (2 Im(C_h) pi l / a h^((2 beta+6)/(beta+2)))
  double im_leading_ratio = 0.0;
};

/// Throws ConfigError when b / (2 pi h^2) is not an integer.
Ansatz ansatz_params(const EigenSolution& eig, double b);

/// Contributions to the residual of the reduced stationary operator, all relative to ||u||.
struct ResidualParts {
  double relative = 0.0;
  /// (k^2 - q^2 + lambda^2/h^2) u, the lambda^4/4 term
  double bulk = 0.0;
  /// i q W u - i (x-a)_+^beta u / h^2
  double damping = 0.0;
  /// -2 phi' v' - phi'' v
  double cutoff = 0.0;
  /// ||u||_{L^2(0,b)}
  double norm = 0.0;
};

struct EnergyIdentity {
  double damped_mass = 0.0; ///< int (x-a)_+^beta |v|^2
  double predicted = 0.0;   ///< Im(lambda^2) int |v|^2 / h^0
  double relative_error = 0.0;
  double im_lambda_sq = 0.0;
};

struct LiftCheck {
  double one_d = 0.0;
  double two_d = 0.0;
  /// ||u|| |k^2 - k_fd^2| / ||u||, the consistency error of the second difference in y
  double fd_bound = 0.0;
};

/// phi * v on [0, b] with v = v_l on (0, a) and B F((x-a)/h^(2/(beta+2))) beyond, extended
/// oddly (Dirichlet) or evenly (Neumann) to (-b, b). Values are evaluated from the closed form on
/// the left and by Hermite interpolation of the half-line solution on the right.
class Quasimode {
public:
  /// Throws DomainError when h >= sigma^(beta/2), ResolutionError when grid_points (if nonzero)
  /// puts fewer than 20 points in one period of e^{i lambda x / h}.
  static Quasimode glue_and_extend(const EigenSolution& eig, const CapSolver& cap,
                                   const DampingProfile& profile, const Cutoff& cutoff,
                                   std::size_t grid_points = 0);

  const EigenSolution& eigen() const { return eig_; }
  const DampingProfile& profile() const { return profile_; }
  const Cutoff& cutoff() const { return cutoff_; }
  const CapSolution& half_line() const { return cap_; }
  long m() const { return ansatz_.m; }
  const QuasiFrequency& q() const { return ansatz_.q; }
  const Ansatz& ansatz() const { return ansatz_; }
  double h() const { return eig_.h; }
  double scale() const { return t_; }
  BoundaryCondition parity() const { return eig_.bc; }
  cplx B() const { return B_; }
  /// |v_l(a) - B F(0)| and |v_l'(a) - B F'(0)/t| relative to max(|v_l(a)|, |v_l'(a)|).
  double value_mismatch() const;
  double slope_mismatch() const;

  struct Local {
    cplx value;
    cplx d1;
  };
  /// Uncut v and v' for x >= 0 (zero beyond the half-line truncation).
  Local v(double x) const;
  /// u(x) on [-b, b].
  cplx operator()(double x) const;
  /// u at n uniformly spaced points of [-b, b] (endpoints included).
  CVector sample(std::size_t n) const;

  /// Residual density -u'' + i q W u + (k^2 - q^2) u at 0 <= x <= b.
  cplx residual_density(double x) const;
  double residual_norm() const { return residual_parts().relative; }
  ResidualParts residual_parts() const;
  /// ||u||^2_{L^2(a+sigma, b)} / ||u||^2_{L^2(0, b)}
  double tail_mass() const;
  /// ||v||^2 / ||phi v||^2 on (0, b)
  double mass_ratio() const;
  /// 1 + sigma^beta / (sigma^beta - h^2)
  double mass_bound() const;
  EnergyIdentity energy_identity() const;
  /// Residual of u(x) sin(2 pi m y / b) with a second difference in y on ny points per period
  /// of the transverse mode, against the separated 1D residual.
  LiftCheck lift_check(long points_per_period) const;

  /// Integral of f over [lo, hi] subset of [0, b], with panels sized to the local scale.
  template <typename F>
  auto integrate(F&& f, double lo, double hi) const;

private:
  Quasimode(const EigenSolution& eig, CapSolution cap, const DampingProfile& profile,
            const Cutoff& cutoff);

  int panels(double lo, double hi) const;
  /// End of the sampled half-line solution in x.
  double support_end() const { return profile_.a() + t_ * cap_.length; }

  EigenSolution eig_;
  CapSolution cap_;
  DampingProfile profile_;
  Cutoff cutoff_;
  Ansatz ansatz_;
  double t_;
  cplx B_;
};

template <typename F>
auto Quasimode::integrate(F&& f, double lo, double hi) const
{
  using Result = decltype(f(lo));
  Result total{};
  const double a = profile_.a();
  double cuts[] = {a, a + profile_.sigma(), cutoff_.transition_start(), cutoff_.transition_end(),
                   support_end()};
  double left = lo;
  while (left < hi) {
    double right = hi;
    for (double c : cuts)
      if (c > left && c < right)
        right = c;
    if (left < support_end() || left < a)
      total += composite_gauss(f, left, right, panels(left, right));
    left = right;
  }
  return total;
}

} // namespace dampedwave
