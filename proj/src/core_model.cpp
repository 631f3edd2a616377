#include "dampedwave/core_model.hpp"

#include "dampedwave/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

namespace dampedwave {

std::string to_string(Join join)
{
  return join == Join::ConstantLevel ? "constant" : "smooth";
}

std::string to_string(BoundaryCondition bc)
{
  return bc == BoundaryCondition::Dirichlet ? "dirichlet" : "neumann";
}

Jet smooth_step(double s)
{
  if (s <= 0.0)
    return {0.0, 0.0, 0.0};
  if (s >= 1.0)
    return {1.0, 0.0, 0.0};

  // S = 1 / (1 + e^psi), psi = 1/s - 1/(1-s)
  const double r = 1.0 - s;
  const double psi = 1.0 / s - 1.0 / r;
  const double dpsi = -1.0 / (s * s) - 1.0 / (r * r);
  const double d2psi = 2.0 / (s * s * s) - 2.0 / (r * r * r);

  double value;
  if (psi > 0.0) {
    const double e = std::exp(-psi);
    value = e / (1.0 + e);
  } else {
    value = 1.0 / (1.0 + std::exp(psi));
  }
  // S(1-S) = 1 / (2 + 2 cosh psi); overflow of cosh gives the correct limit 0
  const double logistic_slope = 1.0 / (2.0 + 2.0 * std::cosh(psi));
  const double d1 = -logistic_slope * dpsi;
  const double d2 = -(1.0 - 2.0 * value) * d1 * dpsi - logistic_slope * d2psi;
  return {value, d1, d2};
}

std::vector<std::string> DampingProfile::violations(double beta, double a, double sigma,
                                                    double b)
{
  std::vector<std::string> out;
  if (!(beta >= 0.0) || !std::isfinite(beta))
    out.emplace_back("beta must be a finite real >= 0");
  if (!(a > 0.0))
    out.emplace_back("a must be > 0 (undamped strip half-width)");
  if (!(sigma > 0.0))
    out.emplace_back("sigma must be > 0 (width of the polynomial region)");
  if (!(a + sigma < b))
    out.emplace_back("damping profile requires a + sigma < b");
  return out;
}

DampingProfile::DampingProfile(double beta, double a, double sigma, double b, Join join)
    : beta_(beta), a_(a), sigma_(sigma), b_(b), join_(join)
{
  const auto bad = violations(beta, a, sigma, b);
  if (!bad.empty()) {
    std::ostringstream msg;
    msg << "invalid damping profile:";
    for (const auto& v : bad)
      msg << "\n  - " << v;
    throw ConfigError(msg.str());
  }
  c_floor_ = std::pow(sigma_, beta_);
  blend_level_ = std::pow(2.0 * sigma_, beta_);
}

double DampingProfile::max_value() const
{
  if (join_ == Join::ConstantLevel)
    return c_floor_;
  return std::max((*this)(b_), c_floor_);
}

double DampingProfile::model_potential(double x) const
{
  if (x <= a_)
    return 0.0;
  return std::pow(x - a_, beta_);
}

double DampingProfile::operator()(double x) const
{
  const double r = std::abs(x);
  if (r > b_ * (1.0 + 1e-14))
    throw DomainError("damping_value: |x| > b");
  if (r <= a_)
    return 0.0;
  if (r <= a_ + sigma_)
    return std::pow(r - a_, beta_);
  if (join_ == Join::ConstantLevel)
    return c_floor_;
  const double chi = smooth_step((r - a_ - sigma_) / sigma_).value;
  return (1.0 - chi) * std::pow(r - a_, beta_) + chi * blend_level_;
}

double DampingProfile::cell_average(double x, double dx) const
{
  const double lo = std::max(x - 0.5 * dx, -b_);
  const double hi = std::min(x + 0.5 * dx, b_);
  if (hi <= lo)
    return (*this)(std::clamp(x, -b_, b_));

  // split at the kinks so every piece is smooth, then 4-point Gauss-Legendre
  std::array<double, 6> breaks{-a_ - sigma_, -a_, a_, a_ + sigma_, lo, hi};
  std::sort(breaks.begin(), breaks.end());
  static constexpr std::array<double, 4> nodes{-0.8611363115940526, -0.3399810435848563,
                                               0.3399810435848563, 0.8611363115940526};
  static constexpr std::array<double, 4> weights{0.3478548451374538, 0.6521451548625461,
                                                 0.6521451548625461, 0.3478548451374538};
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    const double p = std::max(breaks[k], lo);
    const double q = std::min(breaks[k + 1], hi);
    if (q <= p)
      continue;
    const double mid = 0.5 * (p + q);
    const double half = 0.5 * (q - p);
    for (std::size_t j = 0; j < nodes.size(); ++j)
      total += weights[j] * half * (*this)(mid + half * nodes[j]);
  }
  return total / (hi - lo);
}

double damping_value(double x, const DampingProfile& profile)
{
  return profile(x);
}

Cutoff::Cutoff(double b, double delta) : b_(b), delta_(delta)
{
  if (!(delta > 0.0) || !(2.0 * delta < b))
    throw ConfigError("cutoff requires 0 < delta < b/2");
}

Cutoff::Cutoff(const DampingProfile& profile, double delta) : Cutoff(profile.b(), delta)
{
  if (!(profile.a() + profile.sigma() < profile.b() - 2.0 * delta))
    throw ConfigError("cutoff requires a + sigma < b - 2 delta");
}

Jet Cutoff::jet(double x) const
{
  const double s = (x - transition_start()) / delta_;
  const Jet step = smooth_step(s);
  return {1.0 - step.value, -step.d1 / delta_, -step.d2 / (delta_ * delta_)};
}

double Cutoff::max_slope() const
{
  // the step is symmetric about s = 1/2, where its slope peaks
  return std::abs(jet(transition_start() + 0.5 * delta_).d1);
}

double cutoff_value(double x, const Cutoff& cutoff)
{
  if (x < 0.0)
    throw DomainError("cutoff_value: x must be >= 0");
  return cutoff(x);
}

double select_h(long m, double b)
{
  if (m < 1)
    throw DomainError("select_h: m must be a positive integer");
  if (!(b > 0.0))
    throw DomainError("select_h: b must be positive");
  return std::sqrt(b / (2.0 * std::numbers::pi * static_cast<double>(m)));
}

long transverse_index(double h, double b, double rel_tol)
{
  const double exact = b / (2.0 * std::numbers::pi * h * h);
  const double m = std::round(exact);
  if (m < 1.0 || std::abs(exact - m) > rel_tol * m)
    throw ConfigError("b / (2 pi h^2) must be a positive integer; pick h with select_h");
  return static_cast<long>(m);
}

bool longitudinal_index_valid(double l, BoundaryCondition bc)
{
  if (l == 0.0 || !std::isfinite(l))
    return false;
  const double shifted = bc == BoundaryCondition::Dirichlet ? l : l + 0.5;
  return shifted == std::round(shifted);
}

} // namespace dampedwave
