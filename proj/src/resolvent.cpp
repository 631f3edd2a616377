#include "dampedwave/resolvent.hpp"

#include "dampedwave/errors.hpp"
#include "dampedwave/quasimode.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

namespace dampedwave {

namespace {

constexpr double pi = std::numbers::pi;

cplx bilinear(std::span<const cplx> x, std::span<const cplx> y)
{
  cplx acc{};
  for (std::size_t i = 0; i < x.size(); ++i)
    acc += x[i] * y[i];
  return acc;
}

void normalize(CVector& x)
{
  const double norm = l2_norm(x);
  for (auto& v : x)
    v /= norm;
}

Tridiagonal shifted(const Tridiagonal& base, cplx shift)
{
  Tridiagonal out = base;
  for (auto& d : out.diag)
    d -= shift;
  return out;
}

} // namespace

DampingSampler DampingSampler::from_profile(const DampingProfile& profile)
{
  DampingSampler out;
  out.name = "profile(beta=" + std::to_string(profile.beta()) + ")";
  out.b = profile.b();
  out.max_value = profile.max_value();
  out.cell_average = [profile](double x, double dx) { return profile.cell_average(x, dx); };
  return out;
}

DampingSampler DampingSampler::zero(double b)
{
  return {"zero", b, 0.0, [](double, double) { return 0.0; }};
}

DampingSampler DampingSampler::constant(double c, double b)
{
  if (!(c > 0.0))
    throw ConfigError("constant damping requires c > 0");
  return {"constant", b, c, [c](double, double) { return c; }};
}

std::vector<double> interior_nodes(double b, std::size_t n)
{
  std::vector<double> x(n);
  const double dx = 2.0 * b / static_cast<double>(n + 1);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = -b + static_cast<double>(i + 1) * dx;
  return x;
}

Tridiagonal assemble_shifted_operator(double q, double rho, const DampingSampler& damping,
                                      std::size_t n)
{
  if (n < 3)
    throw DomainError("reduced operator needs at least 3 interior nodes");
  const double b = damping.b;
  const double dx = 2.0 * b / static_cast<double>(n + 1);
  const double k_local = std::sqrt(std::abs(rho) + std::abs(q) * damping.max_value);
  if (k_local * dx > 2.0 * pi / 20.0) {
    std::ostringstream msg;
    msg << "grid of " << n << " nodes gives " << 2.0 * pi / (k_local * dx)
        << " points per local wavelength at q = " << q << ", need 20";
    throw ResolutionError(msg.str());
  }
  Tridiagonal op;
  const double inv = 1.0 / (dx * dx);
  op.lower.assign(n - 1, cplx{-inv, 0.0});
  op.upper.assign(n - 1, cplx{-inv, 0.0});
  op.diag.resize(n);
  const auto x = interior_nodes(b, n);
  for (std::size_t i = 0; i < n; ++i)
    op.diag[i] = cplx{2.0 * inv - rho, q * damping.cell_average(x[i], dx)};
  return op;
}

Tridiagonal assemble_reduced_operator(double q, long m, const DampingSampler& damping,
                                      std::size_t n)
{
  const double k = 2.0 * pi * static_cast<double>(m) / damping.b;
  return assemble_shifted_operator(q, (q - k) * (q + k), damping, n);
}

void write_matrix_market(const Tridiagonal& matrix, std::ostream& out)
{
  const std::size_t n = matrix.size();
  out << "%%MatrixMarket matrix coordinate complex general\n";
  out << n << ' ' << n << ' ' << (3 * n - 2) << '\n';
  out.precision(17);
  auto entry = [&](std::size_t i, std::size_t j, cplx v) {
    out << i + 1 << ' ' << j + 1 << ' ' << v.real() << ' ' << v.imag() << '\n';
  };
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0)
      entry(i, i - 1, matrix.lower[i - 1]);
    entry(i, i, matrix.diag[i]);
    if (i + 1 < n)
      entry(i, i + 1, matrix.upper[i]);
  }
}

SingularValueResult min_singular_value(const Tridiagonal& matrix, SingularValueOptions options,
                                       std::span<const cplx> start)
{
  const std::size_t n = matrix.size();
  SingularValueResult out;
  CVector x(n);
  if (start.size() == n) {
    std::copy(start.begin(), start.end(), x.begin());
  } else {
    std::mt19937_64 rng(20240611);
    std::normal_distribution<double> normal;
    for (auto& v : x)
      v = cplx{normal(rng), normal(rng)};
  }
  normalize(x);
  try {
    TridiagonalLU lu(matrix);
    double previous = 0.0;
    double change = 1.0;
    for (int it = 1; it <= options.max_iterations; ++it) {
      lu.solve_adjoint(x);
      const double growth = l2_norm(x); // ||A^{-H} x|| with ||x|| = 1
      lu.solve(x);
      normalize(x);
      const double estimate = 1.0 / growth;
      out.iterations = it;
      change = std::abs(estimate - previous) / estimate;
      if (it > 1 && change <= options.tolerance) {
        out.sigma_min = estimate;
        out.vector = std::move(x);
        return out;
      }
      previous = estimate;
    }
    if (change <= options.stall_tolerance) {
      out.sigma_min = previous;
      out.vector = std::move(x);
      return out;
    }
  } catch (const DiscretizationError&) {
    // exactly singular pivot: sigma_min is zero to working precision
    out.sigma_min = 0.0;
    return out;
  }
  if (n > options.dense_limit)
    throw ConvergenceError("inverse iteration for sigma_min stalled after " +
                           std::to_string(options.max_iterations) + " steps at n = " +
                           std::to_string(n));
  out.sigma_min = dense_min_singular_value(matrix);
  out.dense_fallback = true;
  return out;
}

ResolventSample resolvent_norm(double q, long m, const DampingSampler& damping, std::size_t n)
{
  ResolventSample out;
  out.q = q;
  out.m = m;
  const double k = 2.0 * pi * static_cast<double>(m) / damping.b;
  out.rho = (q - k) * (q + k);
  out.n = n;
  const auto sv = min_singular_value(assemble_shifted_operator(q, out.rho, damping, n));
  out.norm = 1.0 / sv.sigma_min;
  out.dense_fallback = sv.dense_fallback;
  return out;
}

double shifted_resolvent_norm(double q, double rho, const DampingSampler& damping, std::size_t n,
                              SingularValueOptions options)
{
  return 1.0 /
         min_singular_value(assemble_shifted_operator(q, rho, damping, n), options).sigma_min;
}

CVector trapped_profile(double b, double a, int level, std::size_t n)
{
  const auto x = interior_nodes(b, n);
  CVector out(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(x[i]) < a) {
      const double arg = level * pi * x[i] / (2.0 * a);
      out[i] = level % 2 == 1 ? std::cos(arg) : std::sin(arg);
    }
  }
  return out;
}

TrappedMode trapped_eigenvalue(const Tridiagonal& matrix, cplx guess, std::span<const cplx> start,
                               int max_iterations)
{
  const std::size_t n = matrix.size();
  TrappedMode out;
  CVector x(n, cplx{1.0, 0.0});
  if (start.size() == n)
    std::copy(start.begin(), start.end(), x.begin());
  normalize(x);
  // a few fixed-shift steps pick the eigenvalue nearest the guess, then Rayleigh steps
  cplx theta = guess;
  for (int it = 1; it <= max_iterations; ++it) {
    const bool rayleigh = it > 3;
    try {
      TridiagonalLU lu(shifted(matrix, theta));
      lu.solve(x);
    } catch (const DiscretizationError&) {
      out.value = theta;
      out.vector = std::move(x);
      out.iterations = it;
      return out;
    }
    normalize(x);
    const CVector ax = matrix.apply(x);
    const cplx next = bilinear(x, ax) / bilinear(x, x);
    out.iterations = it;
    if (rayleigh) {
      const bool done = std::abs(next - theta) <= 1e-13 * std::max(1.0, std::abs(next));
      theta = next;
      if (done)
        break;
    }
  }
  out.value = theta;
  out.vector = std::move(x);
  return out;
}

namespace {

struct Peak {
  double rho = 0.0;
  double norm = 0.0;
};

/// Maximise ||(T - rho)^{-1}|| over real rho near the trapped level.
Peak peak_near(const Tridiagonal& base, const TrappedMode& mode)
{
  const double width = std::max(3.0 * std::abs(mode.value.imag()), 1e-8);
  CVector warm = mode.vector;
  auto sigma = [&](double rho) {
    auto sv = min_singular_value(shifted(base, rho), {}, warm);
    if (!sv.vector.empty())
      warm = sv.vector;
    return sv.sigma_min;
  };
  std::uintmax_t iterations = 60;
  const auto best = boost::math::tools::brent_find_minima(
      sigma, mode.value.real() - width, mode.value.real() + width, 40, iterations);
  return {best.first, 1.0 / best.second};
}

Tridiagonal unshifted(double q, const DampingSampler& damping, std::size_t n, double rho_scale)
{
  // assemble at rho = 0 after checking resolution at the working rho
  (void)assemble_shifted_operator(q, rho_scale, damping, n);
  return assemble_shifted_operator(q, 0.0, damping, n);
}

} // namespace

EnvelopePoint envelope_point(double q, const DampingSampler& damping, double a,
                             ScanOptions options)
{
  const double b = damping.b;
  const std::size_t n = options.n;
  EnvelopePoint out;
  out.q_scan = q;
  const double top = std::pow(pi * options.levels / (2.0 * a), 2);
  const Tridiagonal base = unshifted(q, damping, n, top);
  Peak best;
  for (int j = 1; j <= options.levels; ++j) {
    const double level = std::pow(pi * j / (2.0 * a), 2);
    const TrappedMode mode =
        trapped_eigenvalue(base, cplx{level, 0.0}, trapped_profile(b, a, j, n));
    const Peak peak = peak_near(base, mode);
    if (peak.norm > best.norm) {
      best = peak;
      out.level = j;
      out.trapped = mode.value;
    }
  }
  // move to the exact mode with q'^2 - k_m^2 = rho nearest the scan frequency, then re-peak
  double q_mode = q;
  long m = 0;
  for (int pass = 0; pass < 2; ++pass) {
    const double k = std::sqrt(q_mode * q_mode - best.rho);
    const double m_real = b * k / (2.0 * pi);
    long chosen = std::max(1L, static_cast<long>(std::floor(m_real)));
    double chosen_q = 0.0;
    for (long cand : {chosen, chosen + 1}) {
      const double kc = 2.0 * pi * static_cast<double>(cand) / b;
      const double qc = std::sqrt(kc * kc + best.rho);
      if (chosen_q == 0.0 || std::abs(qc - q) < std::abs(chosen_q - q)) {
        chosen_q = qc;
        m = cand;
      }
    }
    q_mode = chosen_q;
    if (pass == 0) {
      const Tridiagonal moved = unshifted(q_mode, damping, n, top);
      const TrappedMode mode =
          trapped_eigenvalue(moved, out.trapped, trapped_profile(b, a, out.level, n));
      best.rho = peak_near(moved, mode).rho;
      out.trapped = mode.value;
    }
  }
  out.q = q_mode;
  out.m = m;
  out.rho = best.rho;
  out.norm = shifted_resolvent_norm(q_mode, best.rho, damping, n);

  // off-resonant modes only need a rough value: clustered singular values converge slowly
  SingularValueOptions rough;
  rough.max_iterations = 200;
  rough.stall_tolerance = 1e-3;
  const long m0 = std::lround(b * q / (2.0 * pi));
  for (long mm = std::max(1L, m0 - options.m_window); mm <= m0 + options.m_window; ++mm) {
    const double k = 2.0 * pi * static_cast<double>(mm) / b;
    const double rho = (q - k) * (q + k);
    if (std::abs(rho) + q * damping.max_value > 0.0) {
      try {
        const double norm = shifted_resolvent_norm(q, rho, damping, n, rough);
        if (norm > out.window_norm) {
          out.window_norm = norm;
          out.window_m = mm;
        }
      } catch (const ResolutionError&) {
        // far off-resonant modes with huge |rho| are irrelevant to the maximum
      }
    }
  }
  return out;
}

RateFit scan_and_fit(std::span<const double> q_grid, const DampingSampler& damping, double a,
                     ScanOptions options)
{
  if (q_grid.size() < 3)
    throw DomainError("scan_and_fit needs at least 3 frequencies");
  const auto [lo, hi] = std::minmax_element(q_grid.begin(), q_grid.end());
  if (!(*lo > 0.0) || std::log10(*hi / *lo) < 1.5 - 1e-9)
    throw DomainError("scan_and_fit needs a q grid spanning at least 1.5 decades");
  RateFit out;
  out.samples.resize(q_grid.size());
  const int jobs = std::max(1, options.jobs);
  if (jobs == 1) {
    for (std::size_t i = 0; i < q_grid.size(); ++i)
      out.samples[i] = envelope_point(q_grid[i], damping, a, options);
  } else {
    std::vector<std::future<void>> workers;
    for (int w = 0; w < jobs; ++w)
      workers.push_back(std::async(std::launch::async, [&, w] {
        for (std::size_t i = static_cast<std::size_t>(w); i < q_grid.size();
             i += static_cast<std::size_t>(jobs))
          out.samples[i] = envelope_point(q_grid[i], damping, a, options);
      }));
    for (auto& f : workers)
      f.get();
  }
  std::vector<double> qs, norms;
  for (const auto& s : out.samples) {
    qs.push_back(s.q);
    norms.push_back(s.norm);
  }
  out.line = fit_loglog(qs, norms);
  out.exponent = out.line.slope;
  out.ci_low = out.line.slope_ci_low;
  out.ci_high = out.line.slope_ci_high;
  return out;
}

QuasimodeBound quasimode_lower_bound(const Quasimode& quasimode, std::size_t n)
{
  QuasimodeBound out;
  const auto& q = quasimode.q();
  const double b = quasimode.profile().b();
  out.q = q.real();
  out.m = quasimode.m();
  // Re q^2 - k^2 from the split form
  const double rho = q.offset.real() * (2.0 * q.base + q.offset.real());
  const auto damping = DampingSampler::from_profile(quasimode.profile());
  const Tridiagonal op = assemble_shifted_operator(out.q, rho, damping, n);
  CVector u(n);
  const auto x = interior_nodes(b, n);
  for (std::size_t i = 0; i < n; ++i)
    u[i] = quasimode(x[i]);
  out.lower_bound = l2_norm(u) / l2_norm(op.apply(u));
  out.scanned_norm = 1.0 / min_singular_value(op).sigma_min;
  out.predicted = 1.0 / (2.0 * q.real() * std::abs(q.imag()));
  return out;
}

double self_adjoint_resolvent_norm(double rho, double b)
{
  const double step = pi / (2.0 * b);
  const long k0 = std::lround(std::sqrt(std::max(rho, 0.0)) / step);
  double dist = std::numeric_limits<double>::infinity();
  for (long k = std::max(1L, k0 - 1); k <= k0 + 1; ++k)
    dist = std::min(dist, std::abs(std::pow(step * static_cast<double>(k), 2) - rho));
  return 1.0 / dist;
}

} // namespace dampedwave
