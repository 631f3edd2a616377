#include "dampedwave/eigenfinder.hpp"
#include "dampedwave/errors.hpp"
#include "dampedwave/fit.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace dampedwave;

namespace {

constexpr double pi = std::numbers::pi;
const cplx I{0.0, 1.0};

const Eigenfinder& finder(double beta)
{
  static const Eigenfinder f0(CapSolver(0.0), 1.0, 1.0, BoundaryCondition::Dirichlet);
  static const Eigenfinder f1(CapSolver(1.0), 1.0, 1.0, BoundaryCondition::Dirichlet);
  static const Eigenfinder f2(CapSolver(2.0), 1.0, 1.0, BoundaryCondition::Dirichlet);
  return beta == 0.0 ? f0 : beta == 1.0 ? f1 : f2;
}

} // namespace

TEST_CASE("reflection coefficient")
{
  const double h = 0.01, a = 1.3;
  CHECK(std::abs(reflection_coeff(pi * 2.0 * h / a, h, a, BoundaryCondition::Dirichlet) + 1.0) <
        1e-12);
  CHECK(std::abs(reflection_coeff(pi * 1.5 * h / a, h, a, BoundaryCondition::Neumann) + 1.0) <
        1e-12);
  CHECK(std::abs(reflection_coeff(0.0371, h, a, BoundaryCondition::Dirichlet)) ==
        doctest::Approx(1.0));
  const cplx lambda(0.05, 1e-3);
  CHECK(std::abs(reflection_coeff(lambda, h, a, BoundaryCondition::Neumann)) ==
        doctest::Approx(std::exp(2.0 * a * lambda.imag() / h)));
}

TEST_CASE("left solution satisfies the equation and the boundary condition")
{
  const cplx lambda(0.031, 2e-4);
  const double h = 0.01, a = 1.0;
  const auto d0 = left_solution(lambda, h, a, 0.0, BoundaryCondition::Dirichlet);
  CHECK(std::abs(d0.value) < 1e-12);
  const auto n0 = left_solution(lambda, h, a, 0.0, BoundaryCondition::Neumann);
  CHECK(std::abs(n0.d1) < 1e-12 * std::abs(lambda / h));
  const auto end = left_solution(lambda, h, a, a, BoundaryCondition::Dirichlet);
  CHECK(std::abs(end.value - (1.0 + reflection_coeff(lambda, h, a, BoundaryCondition::Dirichlet))) <
        1e-13);
  for (double x : {0.1, 0.5, 0.9}) {
    const auto v = left_solution(lambda, h, a, x, BoundaryCondition::Dirichlet);
    // -h^2 v'' = lambda^2 v
    CHECK(std::abs(-h * h * v.d2 - lambda * lambda * v.value) < 1e-12 * std::abs(v.d2) * h * h + 1e-14);
    const double e = 1e-6;
    const auto p = left_solution(lambda, h, a, x + e, BoundaryCondition::Dirichlet);
    const auto m = left_solution(lambda, h, a, x - e, BoundaryCondition::Dirichlet);
    CHECK(std::abs((p.value - m.value) / (2 * e) - v.d1) < 1e-5 * std::abs(v.d1));
  }
}

TEST_CASE("G at h = 0")
{
  for (double beta : {0.0, 1.0, 2.0}) {
    const auto& f = finder(beta);
    CHECK(std::abs(f.evaluate_G(0.0, 0.0)) < 1e-12);
    CHECK(std::abs(f.dG_dmu(0.0, 0.0) + 2.0 * I * f.a()) < 1e-10);
    // the closed form 2 pi l i F0 / a - 2 i a (A1 + mu)
    const cplx mu(0.2, -0.1);
    const cplx expected = 2.0 * pi * f.l() * I * f.F0() / f.a() - 2.0 * I * f.a() * (f.A1() + mu);
    CHECK(std::abs(f.evaluate_G(mu, 0.0) - expected) < 1e-12);
  }
}

TEST_CASE("G and the raw compatibility function vanish together")
{
  const auto& f = finder(1.0);
  const double h = 0.05;
  const auto sol = f.find_eigenvalue(h);
  CHECK(std::abs(sol.mu) < 1.0);
  CHECK(std::abs(f.evaluate_G(sol.mu, h)) <= 1e-12 * 10);
  const cplx raw = f.raw_compatibility(sol.lambda_h, h);
  const auto left = left_solution(sol.lambda_h, h, f.a(), f.a(), f.bc());
  CHECK(std::abs(raw) < 1e-8 * std::abs(left.d1));
  // independent root of D(lambda) by secant
  CHECK(std::abs(f.raw_compatibility_root(h) - sol.mu) < 1e-8);
  // away from the root both are nonzero
  CHECK(std::abs(f.evaluate_G(sol.mu + 0.3, h)) > 1e-3);
}

TEST_CASE("eigen solution invariants")
{
  for (double beta : {0.0, 1.0, 2.0}) {
    const auto& f = finder(beta);
    for (double h : {1e-4, 1e-3, 1e-2}) {
      const auto s = f.find_eigenvalue(h);
      const double p = (beta + 4.0) / (beta + 2.0);
      CHECK(std::abs(s.lambda_h - (pi * s.l * h / s.a + s.C_h * std::pow(h, p))) <
            1e-14 * std::abs(s.lambda_h));
      CHECK(std::abs(s.C_h - (s.A1 + s.mu)) < 1e-14);
      CHECK(std::abs(s.C_h) < f.K());
      CHECK(s.newton_residual <= f.options().newton_tol);
      CHECK(s.value_mismatch <= f.options().glue_tol);
      CHECK(s.slope_mismatch <= f.options().glue_tol);
      CHECK(check_eta_admissible(s.eta, f.cap().spectrum()));
    }
  }
}

TEST_CASE("|Ref| tends to 1 along the family")
{
  const auto& f = finder(1.0);
  double previous = 1e300;
  for (double h : {1e-2, 1e-3, 1e-4, 1e-5}) {
    const auto s = f.find_eigenvalue(h);
    const double gap = std::abs(std::abs(reflection_coeff(s.lambda_h, h, s.a, s.bc)) - 1.0);
    CHECK(gap < previous);
    if (previous < 1e300)
      // 1 - |Ref| is of order h^{2/(beta+2)}
      CHECK(gap / previous == doctest::Approx(std::pow(10.0, -2.0 / 3.0)).epsilon(0.1));
    previous = gap;
  }
  CHECK(previous < 3e-3);
}

TEST_CASE("offset exponent over two decades")
{
  for (double beta : {0.0, 1.0, 2.0}) {
    const auto sweep = finder(beta).sweep(log_space(1e-5, 1e-3, 7));
    CHECK(fitted_offset_exponent(sweep) ==
          doctest::Approx((beta + 4.0) / (beta + 2.0)).epsilon(0.05 / 2.0));
  }
}

TEST_CASE("sweep returns results in input order")
{
  const std::vector<double> hs{1e-3, 1e-5, 1e-4};
  const auto out = finder(2.0).sweep(hs);
  REQUIRE(out.size() == 3);
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(out[i].h == hs[i]);
}

TEST_CASE("Neumann branch with half-integer l")
{
  const Eigenfinder f(CapSolver(1.0), 1.0, 0.5, BoundaryCondition::Neumann);
  CHECK(std::abs(f.evaluate_G(0.0, 0.0)) < 1e-12);
  const auto s = f.find_eigenvalue(1e-3);
  CHECK(std::abs(s.mu) < 1.0);
  CHECK(s.value_mismatch <= f.options().glue_tol);
  CHECK(std::abs(left_solution(s.lambda_h, s.h, s.a, 0.0, s.bc).d1) <
        1e-9 * std::abs(s.lambda_h / s.h));
}


TEST_CASE("invalid indices are rejected")
{
  CHECK_THROWS_AS(Eigenfinder(CapSolver(1.0), 1.0, 0.5, BoundaryCondition::Dirichlet), ConfigError);
  CHECK_THROWS_AS(Eigenfinder(CapSolver(1.0), 1.0, 1.0, BoundaryCondition::Neumann), ConfigError);
  CHECK_THROWS_AS(Eigenfinder(CapSolver(1.0), -1.0, 1.0, BoundaryCondition::Dirichlet), Error);
}

TEST_CASE("too large h is refused")
{
  const auto& f = finder(1.0);
  const double h0 = f.admissible_h_max();
  CHECK(h0 == doctest::Approx(0.1586).epsilon(1e-3));
  CHECK_THROWS_AS(f.find_eigenvalue(0.3), Error);
  // bisecting toward smaller h recovers
  CHECK_NOTHROW(f.find_eigenvalue(0.3 / 8.0));
}

TEST_CASE("multistart finds the continuation root")
{
  const auto& f = finder(1.0);
  const auto roots = f.multistart_roots(1e-3);
  const auto s = f.find_eigenvalue(1e-3);
  REQUIRE(!roots.empty());
  bool found = false;
  for (const auto& r : roots) {
    CHECK(std::abs(r) < 1.0);
    found = found || std::abs(r - s.mu) < 1e-8;
  }
  CHECK(found);
  MESSAGE("distinct roots with |mu| < 1 at beta = 1, h = 1e-3: " << roots.size());
}
