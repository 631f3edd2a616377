#include "dampedwave/quasimode.hpp"

#include "dampedwave/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace dampedwave {

namespace {

constexpr cplx I{0.0, 1.0};
constexpr double pi = std::numbers::pi;

/// Half-line length past which |F| has fallen below about e^-600.
double underflow_length(double beta)
{
  const double rate = std::cos(pi / 4.0) * 2.0 / (beta + 2.0);
  return std::pow(600.0 / rate, 2.0 / (beta + 2.0));
}

} // namespace

Ansatz ansatz_params(const EigenSolution& eig, double b)
{
  Ansatz out;
  out.m = transverse_index(eig.h, b);
  out.q.base = 2.0 * pi * static_cast<double>(out.m) / b;
  out.q.offset = eig.lambda_h * eig.lambda_h / 2.0;
  const double h = eig.h;
  const double lead_re = std::pow(pi * eig.l * h / eig.a, 2) / 2.0;
  // the offset is lambda^2 / 2, so the expansion term pi^2 l^2 h^2/a^2 of Re q carries the 1/2
  out.re_expansion_error =
      std::abs(out.q.real() - 1.0 / (h * h) - lead_re) / lead_re;
  const double lead_im = eig.C_h.imag() * pi * eig.l / eig.a *
                         std::pow(h, (2.0 * eig.beta + 6.0) / (eig.beta + 2.0));
  out.im_leading_ratio = out.q.imag() / lead_im;
  return out;
}

Quasimode::Quasimode(const EigenSolution& eig, CapSolution cap, const DampingProfile& profile,
                     const Cutoff& cutoff)
    : eig_(eig), cap_(std::move(cap)), profile_(profile), cutoff_(cutoff)
{
  ansatz_ = ansatz_params(eig_, profile_.b());
  t_ = eig_.scale();
  B_ = left_solution(eig_.lambda_h, eig_.h, eig_.a, eig_.a, eig_.bc).value / cap_.f0;
}

Quasimode Quasimode::glue_and_extend(const EigenSolution& eig, const CapSolver& cap,
                                     const DampingProfile& profile, const Cutoff& cutoff,
                                     std::size_t grid_points)
{
  if (std::abs(eig.beta - profile.beta()) > 1e-12 || std::abs(eig.a - profile.a()) > 1e-12)
    throw ConfigError("quasimode: eigen solution and damping profile disagree on beta or a");
  const double threshold = std::pow(profile.sigma(), profile.beta() / 2.0);
  if (!(eig.h < threshold)) {
    std::ostringstream msg;
    msg << "quasimode requires h < sigma^(beta/2) = " << threshold << ", got h = " << eig.h;
    throw DomainError(msg.str());
  }
  if (grid_points != 0) {
    const double period = 2.0 * pi * eig.h / std::abs(eig.lambda_h);
    const double dx = 2.0 * profile.b() / static_cast<double>(grid_points - 1);
    if (period / dx < 20.0) {
      std::ostringstream msg;
      msg << "grid of " << grid_points << " points resolves one period with " << period / dx
          << " points, need 20";
      throw ResolutionError(msg.str());
    }
  }
  const double t = eig.scale();
  const double wanted = (cutoff.transition_end() - profile.a()) / t;
  const double length =
      std::max(cap.length(), std::min(wanted, std::max(cap.length(), underflow_length(eig.beta))));
  CapSolution solution = cap.extended_to(length).solve(eig.eta);
  return Quasimode(eig, std::move(solution), profile, cutoff);
}

double Quasimode::value_mismatch() const
{
  const auto left = left_solution(eig_.lambda_h, eig_.h, eig_.a, eig_.a, eig_.bc);
  const double ref = std::max(std::abs(left.value), std::abs(left.d1));
  return std::abs(left.value - B_ * cap_.f0) / ref;
}

double Quasimode::slope_mismatch() const
{
  const auto left = left_solution(eig_.lambda_h, eig_.h, eig_.a, eig_.a, eig_.bc);
  const double ref = std::max(std::abs(left.value), std::abs(left.d1));
  // F'(0) = 1 by normalisation
  return std::abs(left.d1 - B_ / t_) / ref;
}

Quasimode::Local Quasimode::v(double x) const
{
  if (x < 0.0 || x > profile_.b())
    throw DomainError("quasimode: v is defined on [0, b]");
  const double a = eig_.a;
  if (x <= a) {
    const auto left = left_solution(eig_.lambda_h, eig_.h, a, x, eig_.bc);
    return {left.value, left.d1};
  }
  const double s = (x - a) / t_;
  if (s >= cap_.length)
    return {};
  const auto p = cap_.evaluate(s);
  return {B_ * p.value, B_ * p.d1 / t_};
}

cplx Quasimode::operator()(double x) const
{
  const double r = std::abs(x);
  const cplx value = cutoff_(r) * v(r).value;
  if (x < 0.0 && eig_.bc == BoundaryCondition::Dirichlet)
    return -value;
  return value;
}

CVector Quasimode::sample(std::size_t n) const
{
  if (n < 2)
    throw DomainError("quasimode sample needs at least two points");
  const double b = profile_.b();
  CVector out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = -b + 2.0 * b * static_cast<double>(i) / static_cast<double>(n - 1);
    out[i] = (*this)(std::clamp(x, -b, b));
  }
  return out;
}

namespace {

struct Density {
  cplx bulk;
  cplx damping;
  cplx cutoff;
};

/// Squared norms accumulated together so the density is evaluated once per node.
struct Sums {
  double total = 0.0;
  double bulk = 0.0;
  double damping = 0.0;
  double cutoff = 0.0;
  double mass = 0.0;

  Sums& operator+=(const Sums& o)
  {
    total += o.total;
    bulk += o.bulk;
    damping += o.damping;
    cutoff += o.cutoff;
    mass += o.mass;
    return *this;
  }
};

Sums operator*(double w, const Sums& s)
{
  return {w * s.total, w * s.bulk, w * s.damping, w * s.cutoff, w * s.mass};
}

} // namespace

int Quasimode::panels(double lo, double hi) const
{
  const double a = profile_.a();
  double width;
  if (hi <= a) {
    width = a / (32.0 * std::max(1.0, std::abs(eig_.l)));
  } else {
    width = std::min(0.05 * t_, cutoff_.delta() / 16.0);
    // local wavelength of F shrinks like s^(-beta/2)
    const double s = (lo - a) / t_;
    if (eig_.beta > 0.0 && s > 1.0)
      width /= std::pow(s, eig_.beta / 2.0);
  }
  return std::max(1, static_cast<int>(std::ceil((hi - lo) / width)));
}

cplx Quasimode::residual_density(double x) const
{
  const double h = eig_.h;
  const auto& q = ansatz_.q;
  // base = 1/h^2 exactly, so k^2 - q^2 + lambda^2 / h^2 = -lambda^4 / 4
  const cplx kappa = -q.offset * q.offset;
  const double w = profile_(x);
  const double model = profile_.model_potential(x);
  const cplx damping = I * ((w - model) / (h * h) + w * q.offset);
  const Jet phi = cutoff_.jet(x);
  const Local local = v(x);
  return phi.value * (kappa + damping) * local.value - 2.0 * phi.d1 * local.d1 -
         phi.d2 * local.value;
}

ResidualParts Quasimode::residual_parts() const
{
  const double h = eig_.h;
  const auto& q = ansatz_.q;
  const cplx kappa = -q.offset * q.offset;
  auto density = [&](double x) {
    const double w = profile_(x);
    const double model = profile_.model_potential(x);
    const Jet phi = cutoff_.jet(x);
    const Local local = v(x);
    const cplx damping = I * ((w - model) / (h * h) + w * q.offset);
    return Density{phi.value * kappa * local.value, phi.value * damping * local.value,
                   -2.0 * phi.d1 * local.d1 - phi.d2 * local.value};
  };
  const Sums s = integrate(
      [&](double x) {
        const Density d = density(x);
        const cplx u = cutoff_(x) * v(x).value;
        return Sums{std::norm(d.bulk + d.damping + d.cutoff), std::norm(d.bulk),
                    std::norm(d.damping), std::norm(d.cutoff), std::norm(u)};
      },
      0.0, profile_.b());
  ResidualParts out;
  out.norm = std::sqrt(s.mass);
  out.relative = std::sqrt(s.total) / out.norm;
  out.bulk = std::sqrt(s.bulk) / out.norm;
  out.damping = std::sqrt(s.damping) / out.norm;
  out.cutoff = std::sqrt(s.cutoff) / out.norm;
  return out;
}

double Quasimode::tail_mass() const
{
  auto mass = [&](double x) { return std::norm((*this)(x)); };
  const double total = integrate(mass, 0.0, profile_.b());
  const double tail = integrate(mass, profile_.a() + profile_.sigma(), profile_.b());
  return tail / total;
}

double Quasimode::mass_ratio() const
{
  const double full = integrate([&](double x) { return std::norm(v(x).value); }, 0.0, profile_.b());
  const double cut = integrate([&](double x) { return std::norm((*this)(x)); }, 0.0, profile_.b());
  return full / cut;
}

double Quasimode::mass_bound() const
{
  const double s = std::pow(profile_.sigma(), profile_.beta());
  return 1.0 + s / (s - eig_.h * eig_.h);
}

EnergyIdentity Quasimode::energy_identity() const
{
  // the uncut solution on its whole support, where -h^2 v'' + i (x-a)_+^beta v = lambda^2 v
  const double a = eig_.a;
  const double end = a + t_ * cap_.length;
  auto v_at = [&](double x) {
    if (x <= a)
      return left_solution(eig_.lambda_h, eig_.h, a, x, eig_.bc).value;
    const double s = (x - a) / t_;
    return s >= cap_.length ? cplx{} : B_ * cap_.evaluate(s).value;
  };
  auto gauss = [&](auto f, double lo, double hi) {
    double width = hi <= a ? a / (32.0 * std::max(1.0, std::abs(eig_.l))) : 0.05 * t_;
    return composite_gauss(f, lo, hi, std::max(1, static_cast<int>(std::ceil((hi - lo) / width))));
  };
  auto weighted = [&](double x) {
    return std::pow(x - a, eig_.beta) * std::norm(v_at(x));
  };
  auto mass = [&](double x) { return std::norm(v_at(x)); };
  EnergyIdentity out;
  // split the right part so that the panel width can follow the local wavelength
  double damped = 0.0;
  double total = gauss(mass, 0.0, a);
  const double step = t_;
  for (double lo = a; lo < end; lo += step) {
    const double hi = std::min(end, lo + step);
    const double s = (lo - a) / t_;
    const int n = std::max(1, static_cast<int>(std::ceil(20.0 * std::max(1.0, std::pow(s, eig_.beta / 2.0)))));
    damped += composite_gauss(weighted, lo, hi, n);
    total += composite_gauss(mass, lo, hi, n);
  }
  const cplx lam2 = eig_.lambda_h * eig_.lambda_h;
  out.im_lambda_sq = lam2.imag();
  out.damped_mass = damped;
  out.predicted = lam2.imag() * total;
  out.relative_error = std::abs(damped - out.predicted) / std::abs(damped);
  return out;
}

LiftCheck Quasimode::lift_check(long points_per_period) const
{
  if (points_per_period < 4)
    throw DomainError("lift_check needs at least 4 points per period");
  const double b = profile_.b();
  const long m = ansatz_.m;
  const long ny = m * points_per_period;
  const double dy = b / static_cast<double>(ny);
  const double k = ansatz_.q.base;
  // x-integrals over (0, b); parity doubles every one of them
  const double i_rr =
      integrate([&](double x) { return std::norm(residual_density(x)); }, 0.0, b);
  const double i_uu = integrate([&](double x) { return std::norm((*this)(x)); }, 0.0, b);
  const cplx i_ru = integrate(
      [&](double x) { return residual_density(x) * std::conj((*this)(x)); }, 0.0, b);
  double s_ss = 0.0, s_se = 0.0, s_ee = 0.0;
  auto sy = [&](long j) { return std::sin(k * dy * static_cast<double>(j)); };
  for (long j = 0; j < ny; ++j) {
    const double s = sy(j);
    const double dyy = (sy(j + 1) - 2.0 * s + sy(j - 1)) / (dy * dy);
    const double e = -dyy - k * k * s;
    s_ss += s * s * dy;
    s_se += s * e * dy;
    s_ee += e * e * dy;
  }
  LiftCheck out;
  out.one_d = std::sqrt(i_rr / i_uu);
  out.two_d = std::sqrt(std::max(0.0, i_rr * s_ss + 2.0 * i_ru.real() * s_se + i_uu * s_ee) /
                        (i_uu * s_ss));
  const double k_fd2 = 4.0 / (dy * dy) * std::pow(std::sin(k * dy / 2.0), 2);
  out.fd_bound = std::abs(k * k - k_fd2);
  return out;
}

} // namespace dampedwave
