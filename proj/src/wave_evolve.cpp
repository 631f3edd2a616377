#include "dampedwave/wave_evolve.hpp"

#include "dampedwave/errors.hpp"
#include "dampedwave/quasimode.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace dampedwave {

double WaveState::wavenumber() const
{
  return 2.0 * std::numbers::pi * static_cast<double>(m) / b;
}

double discrete_energy(const WaveState& state)
{
  const std::size_t n = state.size();
  const double dx = state.spacing();
  const double k = state.wavenumber();
  double grad = 0.0;
  double mass = 0.0;
  double kinetic = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    const cplx left = i == 0 ? cplx{} : state.u[i - 1];
    const cplx right = i == n ? cplx{} : state.u[i];
    grad += std::norm(right - left);
  }
  for (std::size_t i = 0; i < n; ++i) {
    mass += std::norm(state.u[i]);
    kinetic += std::norm(state.v[i]);
  }
  return 0.5 * (grad / dx + k * k * mass * dx + kinetic * dx);
}

namespace {

/// K u = -u_xx + k^2 u with Dirichlet ends.
CVector apply_stiffness(std::span<const cplx> u, double dx, double k)
{
  const std::size_t n = u.size();
  CVector out(n);
  const double inv = 1.0 / (dx * dx);
  for (std::size_t i = 0; i < n; ++i) {
    const cplx left = i == 0 ? cplx{} : u[i - 1];
    const cplx right = i + 1 == n ? cplx{} : u[i + 1];
    out[i] = (2.0 * u[i] - left - right) * inv + k * k * u[i];
  }
  return out;
}

} // namespace

EnergyTrace evolve(WaveState& state, const DampingSampler& damping, double dt, double horizon,
                   EvolveOptions options)
{
  const std::size_t n = state.size();
  if (n < 3 || state.v.size() != n)
    throw DomainError("evolve: state needs matching u and v with at least 3 nodes");
  if (!(dt > 0.0) || !(horizon > 0.0))
    throw DomainError("evolve: dt and horizon must be positive");
  if (std::abs(damping.b - state.b) > 1e-12)
    throw ConfigError("evolve: damping and state disagree on b");
  const double dx = state.spacing();
  const double k = state.wavenumber();
  const auto x = interior_nodes(state.b, n);
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i)
    w[i] = damping.cell_average(x[i], dx);

  // (I + dt W/2 + dt^2 K/4) v_new = (I - dt W/2 - dt^2 K/4) v - dt K u
  const double c = dt * dt / 4.0;
  const double inv = 1.0 / (dx * dx);
  Tridiagonal lhs;
  lhs.lower.assign(n - 1, cplx{-c * inv, 0.0});
  lhs.upper.assign(n - 1, cplx{-c * inv, 0.0});
  lhs.diag.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    lhs.diag[i] = 1.0 + 0.5 * dt * w[i] + c * (2.0 * inv + k * k);
  const TridiagonalLU lu(lhs);

  EnergyTrace trace;
  trace.m = state.m;
  trace.dt = dt;
  double energy = discrete_energy(state);
  trace.times.push_back(state.t);
  trace.energies.push_back(energy);
  const auto steps = static_cast<std::size_t>(std::llround(horizon / dt));
  const std::size_t stride = std::max<std::size_t>(1, options.stride);
  CVector rhs(n);
  for (std::size_t step = 1; step <= steps; ++step) {
    const CVector ku = apply_stiffness(state.u, dx, k);
    const CVector kv = apply_stiffness(state.v, dx, k);
    for (std::size_t i = 0; i < n; ++i)
      rhs[i] = state.v[i] - 0.5 * dt * w[i] * state.v[i] - c * kv[i] - dt * ku[i];
    lu.solve(rhs);
    double dissipated = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const cplx mid = 0.5 * (rhs[i] + state.v[i]);
      dissipated += w[i] * std::norm(mid);
      state.u[i] += dt * mid;
      state.v[i] = rhs[i];
    }
    state.t += dt;
    const double next = discrete_energy(state);
    const double change = (next - energy) / energy;
    trace.max_relative_increase = std::max(trace.max_relative_increase, change);
    trace.dissipation_residual = std::max(
        trace.dissipation_residual, std::abs(next - energy + dt * dissipated * dx) / energy);
    if (change > options.growth_tolerance) {
      std::ostringstream msg;
      msg << "energy grew by " << change << " (relative) at t = " << state.t;
      throw InstabilityError(msg.str());
    }
    energy = next;
    if (step % stride == 0 || step == steps) {
      trace.times.push_back(state.t);
      trace.energies.push_back(energy);
    }
  }
  return trace;
}

WaveState quasimode_state(const Quasimode& quasimode, std::size_t n)
{
  WaveState state;
  state.b = quasimode.profile().b();
  state.m = quasimode.m();
  const auto x = interior_nodes(state.b, n);
  const cplx iq = cplx{0.0, 1.0} * quasimode.q().value();
  state.u.resize(n);
  state.v.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    state.u[i] = quasimode(x[i]);
    state.v[i] = iq * state.u[i];
  }
  return state;
}

DecayFit fit_decay(const EnergyTrace& trace, double start_fraction)
{
  if (trace.times.size() < 3)
    throw DomainError("fit_decay: trace too short");
  DecayFit out;
  out.t_end = trace.times.back();
  out.t_start = start_fraction * out.t_end;
  if (!(out.t_start > 0.0) || out.t_end / out.t_start < 10.0 - 1e-9)
    throw DomainError("fit_decay: window must cover at least one decade of time");
  std::vector<double> logt, t, loge;
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    if (trace.times[i] >= out.t_start && trace.energies[i] > 0.0) {
      t.push_back(trace.times[i]);
      logt.push_back(std::log(trace.times[i]));
      loge.push_back(std::log(trace.energies[i]));
    }
  }
  if (t.size() < 3)
    throw DomainError("fit_decay: fewer than 3 samples in the window");
  // equal weight per unit log t, so the dense late samples do not dominate
  std::vector<double> weights(t.size());
  for (std::size_t i = 0; i < t.size(); ++i)
    weights[i] = 1.0 / t[i];
  const LineFit power = fit_line(logt, loge, weights);
  const LineFit expo = fit_line(t, loge, weights);
  out.exponent = -power.slope / 2.0;
  out.r2 = power.r2;
  out.exponential_rate = -expo.slope;
  out.exponential_r2 = expo.r2;
  out.inconclusive = power.r2 < 0.9 || expo.r2 > power.r2;
  return out;
}

LineFit fit_exponential(const EnergyTrace& trace, double t0, double t1)
{
  std::vector<double> t, loge;
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    if (trace.times[i] >= t0 && trace.times[i] <= t1 && trace.energies[i] > 0.0) {
      t.push_back(trace.times[i]);
      loge.push_back(std::log(trace.energies[i]));
    }
  }
  if (t.size() < 3)
    throw DomainError("fit_exponential: fewer than 3 samples in the window");
  return fit_line(t, loge);
}

EnergyTrace superpose(std::span<const EnergyTrace> modes, std::span<const double> weights)
{
  if (modes.empty() || modes.size() != weights.size())
    throw DomainError("superpose: need one weight per mode");
  EnergyTrace out;
  out.times = modes.front().times;
  out.energies.assign(out.times.size(), 0.0);
  for (std::size_t j = 0; j < modes.size(); ++j) {
    if (modes[j].times.size() != out.times.size())
      throw DomainError("superpose: traces have different time samples");
    for (std::size_t i = 0; i < out.times.size(); ++i) {
      if (std::abs(modes[j].times[i] - out.times[i]) > 1e-9 * std::max(1.0, out.times[i]))
        throw DomainError("superpose: traces have different time samples");
      out.energies[i] += weights[j] * modes[j].energies[i];
    }
    out.dissipation_residual = std::max(out.dissipation_residual, modes[j].dissipation_residual);
    out.max_relative_increase =
        std::max(out.max_relative_increase, modes[j].max_relative_increase);
  }
  return out;
}

} // namespace dampedwave
