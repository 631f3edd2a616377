#include "dampedwave/errors.hpp"
#include "dampedwave/fit.hpp"
#include "dampedwave/quasimode.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

using namespace dampedwave;

namespace {

constexpr double pi = std::numbers::pi;

struct Setup {
  double beta;
  CapSolver cap;
  Eigenfinder finder;
  DampingProfile profile;
  Cutoff cutoff;

  explicit Setup(double beta_, double l = 1.0, BoundaryCondition bc = BoundaryCondition::Dirichlet)
      : beta(beta_), cap(beta_), finder(cap, 1.0, l, bc), profile(beta_, 1.0, 2.0, 4.0),
        cutoff(profile, 0.25)
  {
  }

  Quasimode build(long m) const
  {
    const auto eig = finder.find_eigenvalue(select_h(m, profile.b()));
    return Quasimode::glue_and_extend(eig, cap, profile, cutoff);
  }
};

const Setup& setup(double beta)
{
  static const Setup s0(0.0), s1(1.0), s2(2.0);
  return beta == 0.0 ? s0 : beta == 1.0 ? s1 : s2;
}

} // namespace

TEST_CASE("ansatz")
{
  const auto& s = setup(1.0);
  const long m = 20000;
  const auto eig = s.finder.find_eigenvalue(select_h(m, 4.0));
  const auto an = ansatz_params(eig, 4.0);
  CHECK(an.m == m);
  CHECK(an.q.base == doctest::Approx(1.0 / (eig.h * eig.h)).epsilon(1e-12));
  const cplx q = 1.0 / (eig.h * eig.h) + eig.lambda_h * eig.lambda_h / 2.0;
  CHECK(std::abs(an.q.value() - q) < 1e-12 * std::abs(q));
  CHECK(an.re_expansion_error < 0.1);
  CHECK(an.q.imag() > 0.0);
  // mode shift is k^2 - q^2 evaluated without cancellation
  const cplx direct = an.q.base * an.q.base - an.q.value() * an.q.value();
  CHECK(std::abs(an.q.mode_shift() - direct) < 1e-6 * std::abs(an.q.value() * an.q.value()));

  SUBCASE("synthetic zero offset")
  {
    EigenSolution z = eig;
    z.lambda_h = 0.0;
    const auto zero = ansatz_params(z, 4.0);
    CHECK(zero.q.imag() == 0.0);
    CHECK(zero.q.real() == doctest::Approx(1.0 / (eig.h * eig.h)).epsilon(1e-12));
  }
  SUBCASE("non-integral m")
  {
    EigenSolution bad = eig;
    bad.h *= 1.001;
    CHECK_THROWS_AS(ansatz_params(bad, 4.0), ConfigError);
  }
}

TEST_CASE("Im q leading term at beta = 1")
{
  // Im q = Im(lambda^2) / 2, so Im q / h^{8/3} tends to pi Im(C_h) / a
  const auto& s = setup(1.0);
  double previous = 1e300;
  for (long m : {1000L, 100000L, 10000000L}) {
    const auto eig = s.finder.find_eigenvalue(select_h(m, 4.0));
    const double ratio = ansatz_params(eig, 4.0).im_leading_ratio;
    const double direct = ansatz_params(eig, 4.0).q.imag() /
                          (pi * eig.C_h.imag() * std::pow(eig.h, 8.0 / 3.0));
    CHECK(ratio == doctest::Approx(direct).epsilon(1e-12));
    CHECK(std::abs(ratio - 1.0) < previous);
    previous = std::abs(ratio - 1.0);
  }
  CHECK(previous < 1e-2);
}

TEST_CASE("glue preconditions")
{
  const Setup s(1.0);
  // sigma^(beta/2) = 0.1 at beta = 1, sigma = 0.01
  const DampingProfile narrow(1.0, 1.0, 0.0121, 4.0);
  const Cutoff cut(narrow, 0.25);
  const auto eig = s.finder.find_eigenvalue(select_h(70, 4.0)); // h = 0.0954
  CHECK_NOTHROW(Quasimode::glue_and_extend(eig, s.cap, narrow, cut));
  const DampingProfile narrower(1.0, 1.0, 0.009, 4.0);
  CHECK_THROWS_AS(Quasimode::glue_and_extend(eig, s.cap, narrower, Cutoff(narrower, 0.25)),
                  DomainError);
  const auto small = s.finder.find_eigenvalue(select_h(5000, 4.0));
  // one period of e^{i lambda x / h} is about 2a, independent of h
  CHECK_THROWS_AS(Quasimode::glue_and_extend(small, s.cap, s.profile, s.cutoff, 40), ResolutionError);
  CHECK_NOTHROW(Quasimode::glue_and_extend(small, s.cap, s.profile, s.cutoff, 40000));
  const DampingProfile other(2.0, 1.0, 2.0, 4.0);
  CHECK_THROWS_AS(Quasimode::glue_and_extend(small, s.cap, other, Cutoff(other, 0.25)), ConfigError);
}

TEST_CASE("glued quasimode invariants")
{
  for (double beta : {0.0, 1.0, 2.0}) {
    const auto qm = setup(beta).build(5000);
    CHECK(qm.value_mismatch() < 1e-10);
    CHECK(qm.slope_mismatch() < 1e-8);
    CHECK(std::abs(qm(4.0)) == 0.0);
    CHECK(std::abs(qm(-4.0)) == 0.0);
    for (double x : {0.3, 0.99, 1.2, 1.6}) {
      CHECK(std::abs(qm(-x) + qm(x)) <= 1e-14 * std::abs(qm(x)));
      // continuity across a
      CHECK(std::abs(qm(1.0 - 1e-9) - qm(1.0 + 1e-9)) < 1e-6 * std::abs(qm(1.0)));
    }
    const auto samples = qm.sample(801);
    CHECK(std::abs(samples[0]) == 0.0);
    CHECK(std::abs(samples[400]) < 1e-14);
  }
}

TEST_CASE("Neumann quasimode is even")
{
  const Setup s(1.0, 0.5, BoundaryCondition::Neumann);
  const auto qm = s.build(3000);
  CHECK(qm.parity() == BoundaryCondition::Neumann);
  for (double x : {0.2, 0.7, 1.3})
    CHECK(std::abs(qm(-x) - qm(x)) <= 1e-14 * std::abs(qm(x)));
  const double e = 1e-6;
  CHECK(std::abs(qm(e) - qm(-e)) / (2 * e) < 1e-8 * std::abs(qm(0.0)) / qm.h());
}

TEST_CASE("residual density matches a finite-difference operator")
{
  const auto qm = setup(1.0).build(300); // h about 0.046
  const auto& W = qm.profile();
  const cplx q = qm.q().value();
  const double k = qm.q().base;
  for (double x : {0.4, 1.05, 1.5, 3.6}) {
    const double e = 2e-4 * qm.scale();
    const cplx uxx = (qm(x + e) - 2.0 * qm(x) + qm(x - e)) / (e * e);
    const cplx direct = -uxx + cplx(0, 1) * q * W(x) * qm(x) + (k * k - q * q) * qm(x);
    CHECK(std::abs(qm.residual_density(x) - direct) < 1e-3 * std::abs(uxx) + 1e-12);
  }
}

TEST_CASE("residual splits into its parts")
{
  for (double beta : {0.0, 1.0, 2.0}) {
    const auto qm = setup(beta).build(20000);
    const auto parts = qm.residual_parts();
    CHECK(parts.relative > 0.0);
    CHECK(parts.relative <= parts.bulk + parts.damping + parts.cutoff + 1e-12 * parts.relative);
    CHECK(parts.relative >= std::abs(parts.damping - parts.bulk - parts.cutoff) * (1 - 1e-9));
    // the quasimode bound in its weak form: residual below C / Re q with C of order one
    CHECK(parts.relative * qm.q().real() < 1e3);
  }
}

TEST_CASE("energy identity and mass bound")
{
  for (double beta : {0.0, 1.0, 2.0}) {
    for (long m : {2000L, 50000L}) {
      const auto qm = setup(beta).build(m);
      const auto id = qm.energy_identity();
      CHECK(id.im_lambda_sq > 0.0);
      CHECK(id.relative_error < 1e-6);
      CHECK(id.damped_mass <= id.predicted * (1 + 1e-6));
      CHECK(qm.mass_ratio() >= 1.0);
      CHECK(qm.mass_ratio() <= qm.mass_bound());
      CHECK(qm.tail_mass() < 1e-10);
    }
  }
}

TEST_CASE("Im q slope")
{
  for (double beta : {0.0, 1.0, 2.0}) {
    std::vector<double> re, im;
    for (double h : log_space(1e-5, 3e-4, 6)) {
      const auto eig = setup(beta).finder.find_eigenvalue(select_h(transverse_index(h, 4.0, 1.0), 4.0));
      const auto an = ansatz_params(eig, 4.0);
      re.push_back(an.q.real());
      im.push_back(an.q.imag());
    }
    CHECK(fit_loglog(re, im).slope ==
          doctest::Approx(-(beta + 3.0) / (beta + 2.0)).epsilon(0.05 / 1.5));
  }
}

TEST_CASE("two-dimensional lift separates")
{
  const auto qm = setup(1.0).build(300);
  const auto lift = qm.lift_check(16);
  CHECK(lift.two_d >= lift.one_d * (1 - 1e-12));
  CHECK(lift.two_d - lift.one_d <= lift.fd_bound * (1 + 1e-9) + 1e-12);
  const auto fine = qm.lift_check(64);
  CHECK(std::abs(fine.two_d - fine.one_d) < std::abs(lift.two_d - lift.one_d));
  CHECK_THROWS_AS(qm.lift_check(2), DomainError);
}
