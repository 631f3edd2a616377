#pragma once

#include "dampedwave/cap_solver.hpp"
#include "dampedwave/core_model.hpp"

#include <optional>
#include <span>
#include <vector>

namespace dampedwave {

/// Eigenvalue of the glued half-line problem at one semiclassical parameter h.
struct EigenSolution {
  double h = 0.0;
  double l = 0.0;
  BoundaryCondition bc = BoundaryCondition::Dirichlet;
  double beta = 0.0;
  double a = 0.0;
  cplx F0;       ///< F(0, 0)
  cplx A1;       ///< pi l F0 / a^2
  cplx mu;       ///< root of G(., h)
  cplx C_h;      ///< A1 + mu
  cplx lambda_h; ///< pi l h / a + C_h h^((beta+4)/(beta+2))
  cplx B;        ///< gluing constant
  cplx eta;      ///< lambda_h^2 / h^(2 beta/(beta+2))
  cplx F_boundary; ///< F(0, eta)
  int newton_iterations = 0;
  double newton_residual = 0.0; ///< |G(mu, h)|
  double value_mismatch = 0.0;  ///< |v_l(a) - B v_r(a)| relative
  double slope_mismatch = 0.0;  ///< |v_l'(a) - B v_r'(a)| relative

  /// (beta+4)/(beta+2)
  double offset_exponent() const { return (beta + 4.0) / (beta + 2.0); }
  /// lambda_h - pi l h / a, evaluated as C_h h^p.
  cplx lambda_offset() const;
  /// h^(2/(beta+2)), the rescaling length of the right half-line.
  double scale() const;
};

/// Ref(lambda, h): -e^{-2 i lambda a/h} (Dirichlet) or +e^{-2 i lambda a/h} (Neumann).
cplx reflection_coeff(cplx lambda, double h, double a, BoundaryCondition bc);

struct LeftValue {
  cplx value;
  cplx d1;
  cplx d2;
};
/// v_l(x) = e^{i lambda (x-a)/h} + Ref e^{-i lambda (x-a)/h} and its derivatives, 0 <= x <= a.
LeftValue left_solution(cplx lambda, double h, double a, double x, BoundaryCondition bc);

struct EigenOptions {
  double newton_tol = 1e-12;
  double glue_tol = 1e-8;
  int max_iterations = 40;
  /// Radius of the contour used to differentiate G in mu.
  double derivative_radius = 1e-3;
  int derivative_points = 8;
};

/// Compatibility function and its root in mu for a fixed (beta, a, l, bc).
class Eigenfinder {
public:
  Eigenfinder(CapSolver cap, double a, double l, BoundaryCondition bc, EigenOptions options = {});

  const CapSolver& cap() const { return cap_; }
  double beta() const { return cap_.beta(); }
  double a() const { return a_; }
  double l() const { return l_; }
  BoundaryCondition bc() const { return bc_; }
  const EigenOptions& options() const { return options_; }
  cplx F0() const { return F0_; }
  cplx A1() const { return A1_; }
  /// Bound on |C_h|: pi |l| |F0| / a^2 + 1.
  double K() const;

  double scale(double h) const;
  cplx lambda(cplx mu, double h) const;
  cplx eta(cplx mu, double h) const;

  /// G(mu, h) with the exponential remainder g kept exact. h = 0 allowed.
  cplx evaluate_G(cplx mu, double h) const;
  /// dG/dmu from a Cauchy integral on a small circle around mu.
  cplx dG_dmu(cplx mu, double h) const;

  /// D(lambda) = v_l'(a) F(0, eta) - v_l(a) h^{-2/(beta+2)} from the explicit left solution.
  cplx raw_compatibility(cplx lambda, double h) const;

  /// Newton on mu -> G(mu, h) from mu_start; throws ConvergenceError or InconsistencyError.
  EigenSolution find_eigenvalue(double h, cplx mu_start = {}) const;

  /// Secant root of D(lambda) started from the leading-order guess, mapped to mu.
  cplx raw_compatibility_root(double h, std::optional<cplx> lambda_start = {}) const;

  /// Largest h with |eta(mu, h)| <= lambda_tilde_1 / 2 for every |mu| <= 1.
  double admissible_h_max() const;

  /// Continuation sweep: solves in increasing h, seeding each Newton run with the previous mu.
  /// Results are returned in the order of `hs`.
  std::vector<EigenSolution> sweep(std::span<const double> hs) const;

  /// Distinct roots with |mu| < 1 reached from a grid of starting points.
  std::vector<cplx> multistart_roots(double h, int grid = 3) const;

private:
  CapSolver cap_;
  double a_;
  double l_;
  BoundaryCondition bc_;
  EigenOptions options_;
  cplx F0_;
  cplx A1_;
};

/// Exponent of |lambda_h - pi l h / a| against h over a sweep.
double fitted_offset_exponent(std::span<const EigenSolution> sweep);

} // namespace dampedwave
