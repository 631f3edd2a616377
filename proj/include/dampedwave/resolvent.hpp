#pragma once

#include "dampedwave/core_model.hpp"
#include "dampedwave/fit.hpp"
#include "dampedwave/linalg.hpp"

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace dampedwave {

class Quasimode;

/// Damping as seen by a grid: cell averages of W over [-b, b].
struct DampingSampler {
  std::string name;
  double b = 0.0;
  double max_value = 0.0;
  /// Average of W over [x - dx/2, x + dx/2].
  std::function<double(double x, double dx)> cell_average;

  static DampingSampler from_profile(const DampingProfile& profile);
  /// W = 0, the self-adjoint control.
  static DampingSampler zero(double b);
  /// W = c everywhere, the geometric-control case.
  static DampingSampler constant(double c, double b);
};

/// Interior nodes x_i = -b + (i+1) dx, dx = 2b/(n+1), of the Dirichlet grid.
std::vector<double> interior_nodes(double b, std::size_t n);

/// -d^2/dx^2 + i q W - rho with Dirichlet ends at +-b on n interior nodes. Throws
/// ResolutionError when fewer than 20 points fall in one local wavelength
/// 2 pi / sqrt(|rho| + q max W).
Tridiagonal assemble_shifted_operator(double q, double rho, const DampingSampler& damping,
                                      std::size_t n);

/// The Fourier-mode-m reduction -d^2 + i q W + (2 pi m / b)^2 - q^2.
Tridiagonal assemble_reduced_operator(double q, long m, const DampingSampler& damping,
                                      std::size_t n);

void write_matrix_market(const Tridiagonal& matrix, std::ostream& out);

struct SingularValueOptions {
  int max_iterations = 400;
  double tolerance = 1e-11;
  /// Accepted relative change when the iteration runs out of steps (clustered singular values).
  double stall_tolerance = 1e-6;
  /// Dense SVD is used when the iteration stalls and n does not exceed this.
  std::size_t dense_limit = 2500;
};

struct SingularValueResult {
  double sigma_min = 0.0;
  int iterations = 0;
  bool dense_fallback = false;
  /// Right singular vector estimate (empty after a dense fallback).
  CVector vector;
};

/// Smallest singular value by inverse iteration on A^H A with a banded LU of A.
SingularValueResult min_singular_value(const Tridiagonal& matrix, SingularValueOptions options = {},
                                       std::span<const cplx> start = {});

struct ResolventSample {
  double q = 0.0;
  long m = 0;
  double rho = 0.0; ///< q^2 - (2 pi m / b)^2
  double norm = 0.0;
  std::size_t n = 0;
  bool dense_fallback = false;
};

ResolventSample resolvent_norm(double q, long m, const DampingSampler& damping, std::size_t n);
/// Norm of (-d^2 + i q W - rho)^{-1}.
double shifted_resolvent_norm(double q, double rho, const DampingSampler& damping, std::size_t n,
                              SingularValueOptions options = {});

/// Eigenvalue of a complex-symmetric tridiagonal matrix near guess, by Rayleigh quotient
/// iteration with the bilinear quotient x^T A x / x^T x.
struct TrappedMode {
  cplx value;
  CVector vector;
  int iterations = 0;
};
TrappedMode trapped_eigenvalue(const Tridiagonal& matrix, cplx guess,
                               std::span<const cplx> start = {}, int max_iterations = 60);
/// cos / sin (j pi x / 2a) on |x| < a, zero elsewhere: start vector for level j.
CVector trapped_profile(double b, double a, int level, std::size_t n);

/// Envelope of max_m ||R_m(q)|| near q: the resolvent is maximised over real rho next to each
/// of the first few trapped levels, then moved to the nearest exact mode (q', m) with
/// q'^2 - (2 pi m / b)^2 = rho.
struct EnvelopePoint {
  double q_scan = 0.0;
  double q = 0.0;
  long m = 0;
  double rho = 0.0;
  double norm = 0.0;
  int level = 0;
  cplx trapped;
  /// max over m in the +-3 window around b q / 2 pi at the scan frequency itself
  double window_norm = 0.0;
  long window_m = 0;
};

struct ScanOptions {
  std::size_t n = 4000;
  int levels = 3;
  /// Width (half) of the m window checked at the scan frequency.
  int m_window = 3;
  /// Worker threads for scan_and_fit.
  int jobs = 1;
};

EnvelopePoint envelope_point(double q, const DampingSampler& damping, double a,
                             ScanOptions options = {});

struct RateFit {
  LineFit line;
  double exponent = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::vector<EnvelopePoint> samples;
};

/// Least-squares slope of log(envelope norm) against log q. Throws DomainError when the grid
/// spans less than 1.5 decades.
RateFit scan_and_fit(std::span<const double> q_grid, const DampingSampler& damping, double a,
                     ScanOptions options = {});

/// ||u|| / ||A u|| for the quasimode sampled on the grid, with A the reduced operator at
/// (Re q, m). Any vector gives a lower bound on the resolvent norm.
struct QuasimodeBound {
  double q = 0.0;
  long m = 0;
  double lower_bound = 0.0;
  double scanned_norm = 0.0;
  /// 1 / (2 Re q |Im q|), the leading-order prediction
  double predicted = 0.0;
};
QuasimodeBound quasimode_lower_bound(const Quasimode& quasimode, std::size_t n);

/// The Dirichlet eigenvalues (pi k / 2b)^2 of -d^2 on (-b, b) nearest rho, and 1/dist.
double self_adjoint_resolvent_norm(double rho, double b);

} // namespace dampedwave
