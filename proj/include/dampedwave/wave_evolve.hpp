#pragma once

#include "dampedwave/fit.hpp"
#include "dampedwave/linalg.hpp"
#include "dampedwave/resolvent.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace dampedwave {

class Quasimode;

/// One transverse Fourier mode m of the damped wave on the interior Dirichlet nodes of (-b, b).
struct WaveState {
  CVector u;
  CVector v;
  long m = 0;
  double b = 0.0;
  double t = 0.0;

  std::size_t size() const { return u.size(); }
  double spacing() const { return 2.0 * b / static_cast<double>(u.size() + 1); }
  double wavenumber() const;
};

/// 1/2 (||u_x||^2 + k^2 ||u||^2 + ||v||^2) on the grid, u = 0 at both ends.
double discrete_energy(const WaveState& state);

struct EnergyTrace {
  std::vector<double> times;
  std::vector<double> energies;
  long m = 0;
  double dt = 0.0;
  /// max over steps of |E_{n+1} - E_n + dt sum W |v_mid|^2 dx| / E_n
  double dissipation_residual = 0.0;
  /// max over steps of (E_{n+1} - E_n) / E_n, positive only through round-off
  double max_relative_increase = 0.0;
};

struct EvolveOptions {
  /// record every stride-th step
  std::size_t stride = 1;
  /// relative energy growth per step that counts as an instability
  double growth_tolerance = 1e-10;
};

/// Crank-Nicolson (implicit midpoint) for u_t = v, v_t = u_xx - k^2 u - W v. The state is
/// advanced in place. Throws InstabilityError when the energy grows.
EnergyTrace evolve(WaveState& state, const DampingSampler& damping, double dt, double horizon,
                   EvolveOptions options = {});

/// u0 = quasimode sampled on n interior nodes, v0 = i q u0, mode m of the quasimode.
WaveState quasimode_state(const Quasimode& quasimode, std::size_t n);

struct DecayFit {
  /// alpha from E ~ t^(-2 alpha)
  double exponent = 0.0;
  double t_start = 0.0;
  double t_end = 0.0;
  double r2 = 0.0;
  /// -d log E / dt from the exponential model over the same window
  double exponential_rate = 0.0;
  double exponential_r2 = 0.0;
  /// r2 below 0.9 or the exponential model fits better
  bool inconclusive = false;
};

/// Power-law fit of log E against log t on [start_fraction T, T] (T the last time).
DecayFit fit_decay(const EnergyTrace& trace, double start_fraction = 0.1);

/// -slope of log E against t over [t0, t1].
LineFit fit_exponential(const EnergyTrace& trace, double t0, double t1);

/// Superposition of independent modes: the 2D energy is the sum of the mode energies
/// (the transverse sines are orthogonal). Traces must share their time samples.
EnergyTrace superpose(std::span<const EnergyTrace> modes, std::span<const double> weights);

} // namespace dampedwave
