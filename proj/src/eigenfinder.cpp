#include "dampedwave/eigenfinder.hpp"

#include "dampedwave/errors.hpp"
#include "dampedwave/fit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace dampedwave {

namespace {

constexpr cplx I{0.0, 1.0};
constexpr double pi = std::numbers::pi;

/// e^z - 1 - z without cancellation for small |z|.
cplx exp_remainder(cplx z)
{
  if (std::abs(z) >= 0.5)
    return std::exp(z) - 1.0 - z;
  cplx term = z * z / 2.0;
  cplx sum = term;
  for (int k = 3; k < 40; ++k) {
    term *= z / static_cast<double>(k);
    sum += term;
    if (std::abs(term) <= 1e-18 * std::abs(sum))
      break;
  }
  return sum;
}

} // namespace

cplx EigenSolution::lambda_offset() const
{
  return C_h * std::pow(h, offset_exponent());
}

double EigenSolution::scale() const
{
  return std::pow(h, 2.0 / (beta + 2.0));
}

cplx reflection_coeff(cplx lambda, double h, double a, BoundaryCondition bc)
{
  if (!(h > 0.0))
    throw DomainError("reflection_coeff: h must be > 0");
  const cplx e = std::exp(-2.0 * I * lambda * a / h);
  return bc == BoundaryCondition::Dirichlet ? -e : e;
}

LeftValue left_solution(cplx lambda, double h, double a, double x, BoundaryCondition bc)
{
  const cplx ref = reflection_coeff(lambda, h, a, bc);
  const cplx k = lambda / h;
  const cplx plus = std::exp(I * k * (x - a));
  const cplx minus = ref * std::exp(-I * k * (x - a));
  return {plus + minus, I * k * (plus - minus), -k * k * (plus + minus)};
}

Eigenfinder::Eigenfinder(CapSolver cap, double a, double l, BoundaryCondition bc,
                         EigenOptions options)
    : cap_(std::move(cap)), a_(a), l_(l), bc_(bc), options_(options)
{
  if (!(a > 0.0))
    throw ConfigError("Eigenfinder: a must be > 0");
  if (!longitudinal_index_valid(l, bc))
    throw ConfigError(bc == BoundaryCondition::Dirichlet
                          ? "Dirichlet branch requires a nonzero integer l"
                          : "Neumann branch requires a half-integer l");
  F0_ = cap_.boundary_value(0.0);
  A1_ = pi * l_ * F0_ / (a_ * a_);
}

double Eigenfinder::K() const
{
  return pi * std::abs(l_) * std::abs(F0_) / (a_ * a_) + 1.0;
}

double Eigenfinder::scale(double h) const
{
  if (h < 0.0)
    throw DomainError("Eigenfinder: h must be >= 0");
  return h == 0.0 ? 0.0 : std::pow(h, 2.0 / (beta() + 2.0));
}

cplx Eigenfinder::lambda(cplx mu, double h) const
{
  return pi * l_ * h / a_ + (A1_ + mu) * std::pow(h, (beta() + 4.0) / (beta() + 2.0));
}

cplx Eigenfinder::eta(cplx mu, double h) const
{
  const double t = scale(h);
  const cplx rate = pi * l_ / a_ + (A1_ + mu) * t; // lambda / h
  return (rate * t) * (rate * t);
}

cplx Eigenfinder::evaluate_G(cplx mu, double h) const
{
  const double t = scale(h);
  const cplx x = A1_ + mu;
  const cplx z = -2.0 * I * a_ * x * t;
  const cplx g = exp_remainder(z);
  const cplx f = t == 0.0 ? F0_ : cap_.boundary_value(eta(mu, h));
  const cplx g_over_t = t == 0.0 ? cplx{} : g / t;
  return (I * pi * l_ / a_ + I * x * t) * (2.0 - 2.0 * I * a_ * x * t + g) * f -
         2.0 * I * a_ * x + g_over_t;
}

cplx Eigenfinder::dG_dmu(cplx mu, double h) const
{
  const int n = options_.derivative_points;
  const double r = options_.derivative_radius;
  cplx acc{};
  for (int k = 0; k < n; ++k) {
    const cplx w = std::polar(1.0, 2.0 * pi * k / n);
    acc += evaluate_G(mu + r * w, h) / (r * w);
  }
  return acc / static_cast<double>(n);
}

cplx Eigenfinder::raw_compatibility(cplx lambda, double h) const
{
  const double t = scale(h);
  const LeftValue left = left_solution(lambda, h, a_, a_, bc_);
  const cplx e = lambda * lambda / std::pow(h, 2.0 * beta() / (beta() + 2.0));
  return left.d1 * cap_.boundary_value(e) - left.value / t;
}

EigenSolution Eigenfinder::find_eigenvalue(double h, cplx mu_start) const
{
  if (!(h > 0.0))
    throw DomainError("find_eigenvalue: h must be > 0");
  EigenSolution sol;
  sol.h = h;
  sol.l = l_;
  sol.bc = bc_;
  sol.beta = beta();
  sol.a = a_;
  sol.F0 = F0_;
  sol.A1 = A1_;

  cplx mu = mu_start;
  cplx value = evaluate_G(mu, h);
  int it = 0;
  while (std::abs(value) > options_.newton_tol) {
    if (++it > options_.max_iterations)
      throw ConvergenceError("Newton iteration on G did not converge at h = " +
                             std::to_string(h) + "; bisect toward smaller h");
    const cplx step = value / dG_dmu(mu, h);
    mu -= step;
    if (!(std::abs(mu) < 1.0))
      throw ConvergenceError("Newton iterate left |mu| < 1 at h = " + std::to_string(h) +
                             "; bisect toward smaller h");
    value = evaluate_G(mu, h);
    if (std::abs(step) <= 1e-15 * (1.0 + std::abs(mu)))
      break;
  }
  sol.newton_iterations = it;
  sol.newton_residual = std::abs(value);
  sol.mu = mu;
  sol.C_h = A1_ + mu;
  sol.lambda_h = lambda(mu, h);
  sol.eta = eta(mu, h);
  sol.F_boundary = cap_.boundary_value(sol.eta);

  const double t = scale(h);
  const LeftValue left = left_solution(sol.lambda_h, h, a_, a_, bc_);
  sol.B = left.value / sol.F_boundary;
  const double ref = std::max(std::abs(left.value), std::abs(left.d1));
  sol.value_mismatch = std::abs(left.value - sol.B * sol.F_boundary) / ref;
  sol.slope_mismatch = std::abs(left.d1 - sol.B / t) / ref;
  if (sol.slope_mismatch > options_.glue_tol || sol.value_mismatch > options_.glue_tol) {
    std::ostringstream msg;
    msg << "compatibility residual " << std::max(sol.slope_mismatch, sol.value_mismatch)
        << " exceeds glue tolerance at h = " << h;
    throw InconsistencyError(msg.str());
  }
  return sol;
}

cplx Eigenfinder::raw_compatibility_root(double h, std::optional<cplx> lambda_start) const
{
  const cplx base = pi * l_ * h / a_;
  const double hp = std::pow(h, (beta() + 4.0) / (beta() + 2.0));
  cplx x0 = lambda_start.value_or(base + A1_ * hp);
  cplx x1 = x0 + 1e-3 * hp;
  cplx f0 = raw_compatibility(x0, h);
  cplx f1 = raw_compatibility(x1, h);
  for (int it = 0; it < 100; ++it) {
    if (f1 == f0)
      break;
    const cplx x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
    x0 = x1;
    f0 = f1;
    x1 = x2;
    if (std::abs(x1 - x0) <= 1e-15 * std::abs(x1))
      break;
    f1 = raw_compatibility(x1, h);
  }
  return (x1 - base) / hp - A1_;
}

double Eigenfinder::admissible_h_max() const
{
  const double target = std::sqrt(0.5 * cap_.spectrum().lambda_tilde_1);
  const cplx lead = pi * l_ / a_;
  // worst case over |mu| <= 1 is |lead + A1 t| + t by the maximum modulus principle
  auto excess = [&](double t) { return (std::abs(lead + A1_ * t) + t) * t - target; };
  double lo = 0.0;
  double hi = 1e-3;
  while (excess(hi) < 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6)
      throw ConvergenceError("admissible_h_max: no admissibility boundary found");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) < 0.0 ? lo : hi) = mid;
  }
  return std::pow(lo, (beta() + 2.0) / 2.0);
}

std::vector<EigenSolution> Eigenfinder::sweep(std::span<const double> hs) const
{
  std::vector<std::size_t> order(hs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](auto i, auto j) { return hs[i] < hs[j]; });
  std::vector<EigenSolution> out(hs.size());
  cplx seed{};
  for (auto idx : order) {
    out[idx] = find_eigenvalue(hs[idx], seed);
    seed = out[idx].mu;
  }
  return out;
}

std::vector<cplx> Eigenfinder::multistart_roots(double h, int grid) const
{
  std::vector<cplx> roots;
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      const cplx start{-0.6 + 1.2 * i / std::max(grid - 1, 1), -0.6 + 1.2 * j / std::max(grid - 1, 1)};
      try {
        const cplx mu = find_eigenvalue(h, start).mu;
        const bool seen = std::any_of(roots.begin(), roots.end(),
                                      [&](cplx r) { return std::abs(r - mu) < 1e-8; });
        if (!seen)
          roots.push_back(mu);
      } catch (const Error&) {
        // starting point outside every basin inside the unit disk
      }
    }
  }
  return roots;
}

double fitted_offset_exponent(std::span<const EigenSolution> sweep)
{
  std::vector<double> hs, offsets;
  for (const auto& s : sweep) {
    hs.push_back(s.h);
    offsets.push_back(std::abs(s.lambda_offset()));
  }
  return fit_loglog(hs, offsets).slope;
}

} // namespace dampedwave
