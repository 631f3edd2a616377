#pragma once

#include "dampedwave/linalg.hpp"

#include <cstddef>

namespace dampedwave {

/// Lowest Neumann level of -d^2/dx^2 + x^beta on the half line.
struct NeumannSpectrumResult {
  double beta = 0.0;
  double lambda_tilde_1 = 0.0;
  double length = 0.0;
  std::size_t intervals = 0;
  /// beta = 0: the value 1 is the bottom of the essential spectrum, not an eigenvalue.
  bool essential = false;
};

/// Sampled decaying solution of -F'' + (i x^beta - eta) F = 0 on [0, L] with F'(0) = 1.
struct CapSolution {
  cplx eta;
  double beta = 0.0;
  double length = 0.0;
  std::size_t intervals = 0;
  /// F at s_j = j * length / intervals.
  CVector samples;
  /// F' at the same nodes (compact differences).
  CVector derivative;
  /// F(0, eta).
  cplx f0;
  /// Relative residual of the continuous ODE on the samples (fourth-order stencil).
  double residual = 0.0;
  /// |F(L)| / max |F|.
  double tail_ratio = 0.0;

  double spacing() const { return length / static_cast<double>(intervals); }

  /// F and F' at arbitrary s in [0, length] by quintic Hermite interpolation, using the ODE
  /// for F''. Zero beyond the truncation length.
  struct Point {
    cplx value;
    cplx d1;
  };
  Point evaluate(double s) const;
  /// F'' from the ODE at s.
  cplx second_derivative(double s, cplx value) const;
};

struct CapOptions {
  double length = 0.0;        ///< 0 selects default_cap_length(beta)
  std::size_t intervals = 0;  ///< 0 selects from max_spacing
  double max_spacing = 2.5e-3;
  double tail_tol = 1e-10;
};

/// Truncation length at which the slowest WKB decay over |eta| <= eta_radius reaches e^-25
/// (never below 10).
double default_cap_length(double beta, double eta_radius = 0.55);

NeumannSpectrumResult neumann_ground(double beta, double length = 0.0,
                                     std::size_t intervals = 0);

/// |eta| <= lambda_tilde_1 / 2.
bool check_eta_admissible(cplx eta, const NeumannSpectrumResult& spectrum);

/// Banded finite-difference solver for the half-line problem, bound to one beta and grid.
/// Second-order centred differences with a WKB Robin condition at L, Richardson-extrapolated
/// over (n, 2n).
class CapSolver {
public:
  explicit CapSolver(double beta, CapOptions options = {});
  CapSolver(const NeumannSpectrumResult& spectrum, CapOptions options);

  double beta() const { return spectrum_.beta; }
  double length() const { return length_; }
  std::size_t intervals() const { return intervals_; }
  const NeumannSpectrumResult& spectrum() const { return spectrum_; }
  const CapOptions& options() const { return options_; }

  /// Full solution; throws AdmissibilityError or TruncationError.
  CapSolution solve(cplx eta) const;
  /// F(0, eta) only.
  cplx boundary_value(cplx eta) const;

  /// Same spectrum and spacing, longer truncation.
  CapSolver extended_to(double length) const;

private:
  CVector solve_grid(cplx eta, std::size_t intervals) const;
  CVector richardson(cplx eta) const;
  void require_admissible(cplx eta) const;

  NeumannSpectrumResult spectrum_;
  CapOptions options_;
  double length_;
  std::size_t intervals_;
};

CapSolution solve_F(cplx eta, double beta, double length, std::size_t intervals);

/// Independent route to F(0, eta): integrate the ODE from L down to 0 with classical RK4,
/// starting from the WKB decaying data, then normalise F'(0) = 1.
cplx shoot_F0(cplx eta, double beta, double length, double step = 1e-3);

/// conj F(0) + int |F'|^2 + i int x^beta |F|^2 - eta int |F|^2 (+ Robin boundary term),
/// relative to the size of the terms. Vanishes for an exact solution.
double energy_identity_residual(const CapSolution& solution);

/// Survey of F(0, eta) over the closed admissible disk.
struct DiskSurvey {
  double min_abs = 0.0;
  double max_abs = 0.0;
  /// max(max_abs, 1/min_abs)
  double bound = 0.0;
  /// Largest second difference |F(eta+d) - 2F(eta) + F(eta-d)| / d^2 over the polar grid.
  double max_second_difference = 0.0;
  /// Winding number of F(0, .) around 0 along the boundary circle (zero count inside).
  int zeros_inside = 0;
};
DiskSurvey survey_disk(const CapSolver& solver, int radial = 6, int angular = 24);

} // namespace dampedwave
