#include "dampedwave/cap_solver.hpp"

#include "dampedwave/errors.hpp"
#include "dampedwave/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

namespace dampedwave {

namespace {

constexpr cplx I{0.0, 1.0};

double power(double x, double beta)
{
  // 0^0 = 1 keeps the beta = 0 potential identically 1
  if (beta == 0.0)
    return 1.0;
  return std::pow(x, beta);
}

cplx impedance(double length, double beta, cplx eta)
{
  return std::sqrt(I * power(length, beta) - eta);
}

std::size_t intervals_for(double length, double beta, const CapOptions& options)
{
  if (options.intervals > 0)
    return options.intervals;
  // resolve the local wavenumber at the far end as well
  const double k_max = std::sqrt(std::max(1.0, power(length, beta)));
  const double spacing = std::min(options.max_spacing, 2.0 * std::numbers::pi / (40.0 * k_max));
  return std::max<std::size_t>(1000, static_cast<std::size_t>(std::ceil(length / spacing)));
}

} // namespace

double default_cap_length(double beta, double eta_radius)
{
  if (!(beta >= 0.0))
    throw DomainError("default_cap_length: beta must be >= 0");
  // accumulate the slowest WKB decay rate over the disk until it reaches 25
  const double target = 25.0;
  const double step = 0.01;
  double decay = 0.0;
  double s = 0.0;
  while (decay < target) {
    const double mid = s + 0.5 * step;
    double slowest = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 64; ++k) {
      const cplx eta = std::polar(eta_radius, 2.0 * std::numbers::pi * k / 64.0);
      slowest = std::min(slowest, std::sqrt(I * power(mid, beta) - eta).real());
    }
    decay += slowest * step;
    s += step;
  }
  return std::max(10.0, s);
}

NeumannSpectrumResult neumann_ground(double beta, double length, std::size_t intervals)
{
  if (!(beta >= 0.0))
    throw DomainError("neumann_ground: beta must be >= 0");
  NeumannSpectrumResult result;
  result.beta = beta;
  if (beta == 0.0) {
    result.lambda_tilde_1 = 1.0;
    result.essential = true;
    return result;
  }
  result.length = length > 0.0 ? length : default_cap_length(beta);
  result.intervals = intervals > 0 ? intervals : 4000;

  // cell-centred grid: Neumann by reflection at 0, Dirichlet by antisymmetric ghost at L
  auto level = [&](std::size_t n) {
    const double dx = result.length / static_cast<double>(n);
    const double inv = 1.0 / (dx * dx);
    std::vector<double> diag(n), off(n - 1, -inv);
    for (std::size_t i = 0; i < n; ++i)
      diag[i] = 2.0 * inv + power((static_cast<double>(i) + 0.5) * dx, beta);
    diag.front() -= inv;
    diag.back() += inv;
    return lowest_symmetric_eigenvalue(diag, off);
  };
  const double coarse = level(result.intervals);
  const double fine = level(2 * result.intervals);
  result.lambda_tilde_1 = (4.0 * fine - coarse) / 3.0;
  if (!(result.lambda_tilde_1 > 0.0))
    throw DiscretizationError("neumann_ground: computed ground level is not positive");
  return result;
}

bool check_eta_admissible(cplx eta, const NeumannSpectrumResult& spectrum)
{
  return std::abs(eta) <= 0.5 * spectrum.lambda_tilde_1 * (1.0 + 1e-12);
}

CapSolver::CapSolver(double beta, CapOptions options)
    : CapSolver(neumann_ground(beta), options)
{
}

CapSolver::CapSolver(const NeumannSpectrumResult& spectrum, CapOptions options)
    : spectrum_(spectrum), options_(options)
{
  length_ = options_.length > 0.0
                ? options_.length
                : default_cap_length(spectrum_.beta, 0.5 * spectrum_.lambda_tilde_1);
  intervals_ = intervals_for(length_, spectrum_.beta, options_);
  if (intervals_ < 1000)
    throw DomainError("CapSolver: at least 1000 grid intervals required");
}

CapSolver CapSolver::extended_to(double length) const
{
  if (length <= length_)
    return *this;
  CapOptions opts = options_;
  const double spacing = length_ / static_cast<double>(intervals_);
  opts.length = length;
  const double k_max = std::sqrt(std::max(1.0, power(length, spectrum_.beta)));
  const double far = 2.0 * std::numbers::pi / (40.0 * k_max);
  opts.intervals = static_cast<std::size_t>(std::ceil(length / std::min(spacing, far)));
  return CapSolver(spectrum_, opts);
}

void CapSolver::require_admissible(cplx eta) const
{
  if (!check_eta_admissible(eta, spectrum_)) {
    std::ostringstream msg;
    msg << "spectral parameter |eta| = " << std::abs(eta)
        << " outside the admissible disk |eta| <= " << 0.5 * spectrum_.lambda_tilde_1
        << "; use a smaller h";
    throw AdmissibilityError(msg.str());
  }
}

CVector CapSolver::solve_grid(cplx eta, std::size_t n) const
{
  // Rows -u[j-1] + (2 + d[j]) u[j] - u[j+1] with d = ds^2 (i s^beta - eta), ghost-point closures
  // F'(0) = 1 and F'(L) + theta F(L) = 0. Forming 2 + d in floating point quantises eta in steps
  // of about 1e-16 / ds^2, the same for every row, so F(0, eta) would jump as eta moves. The
  // elimination below carries the pivots as 1 + e[j] and never adds d to 2.
  const double ds = length_ / static_cast<double>(n);
  const double beta = spectrum_.beta;
  auto d = [&](std::size_t j) {
    return ds * ds * (I * power(static_cast<double>(j) * ds, beta) - eta);
  };
  CVector w(n + 1), y(n + 1);
  const cplx d0 = d(0);
  w[0] = 2.0 + d0;
  y[0] = -2.0 * ds / w[0];
  // pivot of row 1: 2 + d1 - 2 / w0 = 1 + d1 + d0 / (2 + d0)
  cplx e = d(1) + d0 / w[0];
  for (std::size_t j = 1; j < n; ++j) {
    if (j > 1)
      e = d(j) + e / (1.0 + e);
    w[j] = 1.0 + e;
    y[j] = y[j - 1] / w[j];
  }
  // last row: -2 u[n-1] + (2 + d[n] + 2 ds theta) u[n]
  w[n] = d(n) + 2.0 * ds * impedance(length_, beta, eta) + 2.0 * e / (1.0 + e);
  y[n] = 2.0 * y[n - 1] / w[n];
  CVector u(n + 1);
  u[n] = y[n];
  for (std::size_t j = n - 1; j >= 1; --j)
    u[j] = y[j] + u[j + 1] / w[j];
  u[0] = y[0] + 2.0 * u[1] / w[0];
  return u;
}

CVector CapSolver::richardson(cplx eta) const
{
  const CVector coarse = solve_grid(eta, intervals_);
  const CVector fine = solve_grid(eta, 2 * intervals_);
  CVector out(coarse.size());
  for (std::size_t j = 0; j < coarse.size(); ++j)
    out[j] = (4.0 * fine[2 * j] - coarse[j]) / 3.0;

  // a non-integer beta leaves an ds^(beta+1) term from the kink of s^beta at 0; a third grid
  // removes it
  const double beta = spectrum_.beta;
  if (beta == std::floor(beta) || beta >= 3.0)
    return out;
  const CVector finest = solve_grid(eta, 4 * intervals_);
  const double r = std::pow(2.0, beta + 1.0);
  for (std::size_t j = 0; j < out.size(); ++j) {
    const cplx second = (4.0 * finest[4 * j] - fine[2 * j]) / 3.0;
    out[j] = (r * second - out[j]) / (r - 1.0);
  }
  return out;
}

cplx CapSolver::boundary_value(cplx eta) const
{
  require_admissible(eta);
  return richardson(eta).front();
}

CapSolution CapSolver::solve(cplx eta) const
{
  require_admissible(eta);
  CapSolution sol;
  sol.eta = eta;
  sol.beta = spectrum_.beta;
  sol.length = length_;
  sol.intervals = intervals_;
  sol.samples = richardson(eta);
  sol.f0 = sol.samples.front();
  const double ds = sol.spacing();
  sol.derivative = compact_derivative(sol.samples, ds);

  double peak = 0.0;
  for (const auto& z : sol.samples)
    peak = std::max(peak, std::abs(z));
  sol.tail_ratio = std::abs(sol.samples.back()) / peak;
  if (!(sol.tail_ratio <= options_.tail_tol)) {
    std::ostringstream msg;
    msg << "half-line solution has not decayed at L = " << length_
        << " (|F(L)|/max|F| = " << sol.tail_ratio << "); increase the truncation length";
    throw TruncationError(msg.str());
  }

  double num = 0.0, den = 0.0;
  const auto& f = sol.samples;
  for (std::size_t j = 2; j + 2 < f.size(); ++j) {
    const cplx f2 =
        (-f[j - 2] + 16.0 * f[j - 1] - 30.0 * f[j] + 16.0 * f[j + 1] - f[j + 2]) / (12.0 * ds * ds);
    const cplx cf = (I * power(static_cast<double>(j) * ds, sol.beta) - eta) * f[j];
    num += std::norm(-f2 + cf);
    den += std::norm(f2) + std::norm(cf);
  }
  sol.residual = den > 0.0 ? std::sqrt(num / den) : 0.0;
  return sol;
}

cplx CapSolution::second_derivative(double s, cplx value) const
{
  return (I * power(s, beta) - eta) * value;
}

CapSolution::Point CapSolution::evaluate(double s) const
{
  if (s < 0.0)
    throw DomainError("CapSolution::evaluate: s must be >= 0");
  if (s > length)
    return {cplx{}, cplx{}};
  const double ds = spacing();
  auto j = static_cast<std::size_t>(s / ds);
  if (j >= intervals)
    j = intervals - 1;
  const double s0 = static_cast<double>(j) * ds;
  const double s1 = s0 + ds;
  const double u = (s - s0) / ds;
  const auto r = quintic_hermite(u, samples[j], derivative[j] * ds,
                                 second_derivative(s0, samples[j]) * ds * ds, samples[j + 1],
                                 derivative[j + 1] * ds,
                                 second_derivative(s1, samples[j + 1]) * ds * ds);
  return {r.value, r.d1 / ds};
}

CapSolution solve_F(cplx eta, double beta, double length, std::size_t intervals)
{
  CapOptions opts;
  opts.length = length;
  opts.intervals = intervals;
  return CapSolver(beta, opts).solve(eta);
}

cplx shoot_F0(cplx eta, double beta, double length, double step)
{
  using State = std::array<cplx, 2>;
  namespace odeint = boost::numeric::odeint;
  auto rhs = [&](const State& y, State& dy, double s) {
    dy[0] = y[1];
    dy[1] = (I * power(std::max(s, 0.0), beta) - eta) * y[0];
  };
  State y{cplx{1.0}, -impedance(length, beta, eta)};
  odeint::runge_kutta4<State, double, State, double, odeint::array_algebra> stepper;
  // uniform steps down to s0, then steps proportional to s so that the kink of s^beta at 0
  // costs no accuracy
  const double s0 = std::min(length, 0.5);
  const auto steps = static_cast<std::size_t>(std::ceil((length - s0) / step));
  double s = length;
  if (steps > 0) {
    const double dt = -(length - s0) / static_cast<double>(steps);
    for (std::size_t k = 0; k < steps; ++k) {
      stepper.do_step(rhs, y, s, dt);
      s += dt;
    }
  }
  s = s0;
  while (s > 1e-12) {
    const double dt = -std::min(0.02 * s, step);
    stepper.do_step(rhs, y, s, dt);
    s += dt;
  }
  stepper.do_step(rhs, y, s, -s);
  return y[0] / y[1];
}

double energy_identity_residual(const CapSolution& sol)
{
  // Gauss rule per cell on the Hermite interpolant; the first cell is split geometrically
  // toward 0, where s^beta need not be smooth
  struct Terms {
    double grad = 0.0;
    double weighted = 0.0;
    double mass = 0.0;
    Terms& operator+=(const Terms& o)
    {
      grad += o.grad;
      weighted += o.weighted;
      mass += o.mass;
      return *this;
    }
  };
  auto integrand = [&](double s) {
    const auto p = sol.evaluate(s);
    const double m = std::norm(p.value);
    return Terms{std::norm(p.d1), power(s, sol.beta) * m, m};
  };
  auto piece = [&](double lo, double hi) {
    Terms t;
    boost::math::quadrature::gauss<double, 8> rule;
    t.grad = rule.integrate([&](double s) { return integrand(s).grad; }, lo, hi);
    t.weighted = rule.integrate([&](double s) { return integrand(s).weighted; }, lo, hi);
    t.mass = rule.integrate([&](double s) { return integrand(s).mass; }, lo, hi);
    return t;
  };
  const double ds = sol.spacing();
  Terms total;
  double right = ds;
  for (int k = 0; k < 40; ++k, right *= 0.5)
    total += piece(0.5 * right, right);
  for (std::size_t j = 1; j < sol.intervals; ++j)
    total += piece(static_cast<double>(j) * ds, static_cast<double>(j + 1) * ds);

  const cplx boundary = impedance(sol.length, sol.beta, sol.eta) * std::norm(sol.samples.back());
  const cplx sum =
      std::conj(sol.f0) + total.grad + I * total.weighted - sol.eta * total.mass + boundary;
  const double scale = std::abs(sol.f0) + total.grad + total.weighted + std::abs(sol.eta) * total.mass;
  return std::abs(sum) / scale;
}

DiskSurvey survey_disk(const CapSolver& solver, int radial, int angular)
{
  const double radius = 0.5 * solver.spectrum().lambda_tilde_1;
  DiskSurvey out;
  out.min_abs = std::numeric_limits<double>::infinity();

  std::vector<std::vector<cplx>> values(static_cast<std::size_t>(radial) + 1);
  for (int r = 0; r <= radial; ++r) {
    const double rho = radius * r / radial;
    const int count = r == 0 ? 1 : angular;
    for (int k = 0; k < count; ++k) {
      const cplx eta = std::polar(rho, 2.0 * std::numbers::pi * k / angular);
      const cplx f = solver.boundary_value(eta);
      values[static_cast<std::size_t>(r)].push_back(f);
      out.min_abs = std::min(out.min_abs, std::abs(f));
      out.max_abs = std::max(out.max_abs, std::abs(f));
    }
  }
  out.bound = std::max(out.max_abs, 1.0 / out.min_abs);

  // radial second differences along each ray, angular ones along each circle
  const double dr = radius / radial;
  for (int k = 0; k < angular; ++k) {
    for (int r = 1; r + 1 <= radial; ++r) {
      const cplx prev = r - 1 == 0 ? values[0][0] : values[static_cast<std::size_t>(r - 1)][static_cast<std::size_t>(k)];
      const cplx cur = values[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)];
      const cplx next = values[static_cast<std::size_t>(r + 1)][static_cast<std::size_t>(k)];
      out.max_second_difference =
          std::max(out.max_second_difference, std::abs(next - 2.0 * cur + prev) / (dr * dr));
    }
  }
  for (int r = 1; r <= radial; ++r) {
    const auto& ring = values[static_cast<std::size_t>(r)];
    const double arc = radius * r / radial * 2.0 * std::numbers::pi / angular;
    for (int k = 0; k < angular; ++k) {
      const cplx prev = ring[static_cast<std::size_t>((k + angular - 1) % angular)];
      const cplx next = ring[static_cast<std::size_t>((k + 1) % angular)];
      out.max_second_difference = std::max(
          out.max_second_difference,
          std::abs(next - 2.0 * ring[static_cast<std::size_t>(k)] + prev) / (arc * arc));
    }
  }

  // argument principle on a finer boundary circle
  const int loop = 4 * angular;
  double winding = 0.0;
  cplx last = solver.boundary_value(cplx{radius, 0.0});
  for (int k = 1; k <= loop; ++k) {
    const cplx cur = solver.boundary_value(std::polar(radius, 2.0 * std::numbers::pi * k / loop));
    winding += std::arg(cur / last);
    last = cur;
  }
  out.zeros_inside = static_cast<int>(std::lround(winding / (2.0 * std::numbers::pi)));
  return out;
}

} // namespace dampedwave
