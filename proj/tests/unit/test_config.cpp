#include "dampedwave/config.hpp"
#include "dampedwave/errors.hpp"

#include <doctest.h>

#include <string>

using namespace dampedwave;

namespace {

std::string message_of(const RunConfig& c)
{
  try {
    c.validate();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

bool contains(const std::string& text, const std::string& part)
{
  return text.find(part) != std::string::npos;
}

} // namespace

TEST_CASE("defaults are valid for the tested exponents")
{
  for (double beta : {0.0, 0.5, 1.0, 2.0, 3.0})
    CHECK(default_config(beta).violations().empty());
}

TEST_CASE("parse key = value with comments and lists")
{
  const auto c = parse_config("# strip\n"
                              "beta = 2   # exponent\n"
                              "a = 1.5\n"
                              "sigma=0.5\n"
                              "b = 5\n"
                              "bc = neumann\n"
                              "l = 0.5\n"
                              "m_list = 10, 20,40\n"
                              "join = smooth\n"
                              "evolve_h = 0.05\n"
                              "tail_b = 4\n");
  CHECK(c.beta == 2.0);
  CHECK(c.a == 1.5);
  CHECK(c.sigma == 0.5);
  CHECK(c.bc == BoundaryCondition::Neumann);
  CHECK(c.join == Join::SmoothBlend);
  REQUIRE(c.m_list.size() == 3);
  CHECK(c.m_list[2] == 40);
  REQUIRE(c.evolve_h.size() == 1);
  CHECK(c.violations().empty());
  const auto hs = c.h_values();
  REQUIRE(hs.size() == 3);
  CHECK(transverse_index(hs[1], c.b) == 20);
}

TEST_CASE("parse errors are collected")
{
  try {
    parse_config("beta = two\nnonsense\ncolour = red\nm_list = 1, 2.5\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(contains(msg, "beta"));
    CHECK(contains(msg, "line 2"));
    CHECK(contains(msg, "unknown key 'colour'"));
    CHECK(contains(msg, "'2.5' is not an integer"));
  }
}

TEST_CASE("a + sigma >= b names the damping constraint")
{
  RunConfig c;
  c.a = 2.0;
  c.sigma = 2.0;
  c.b = 4.0;
  const auto msg = message_of(c);
  CHECK(contains(msg, "damping profile requires a + sigma < b"));
}

TEST_CASE("Dirichlet with half-integer l is rejected")
{
  RunConfig c;
  c.bc = BoundaryCondition::Dirichlet;
  c.l = 1.5;
  CHECK(contains(message_of(c), "Dirichlet branch requires a nonzero integer l"));
  c.bc = BoundaryCondition::Neumann;
  CHECK(message_of(c).empty());
  c.l = 2.0;
  CHECK(contains(message_of(c), "Neumann branch requires a half-integer l"));
}

TEST_CASE("every violation is listed at once")
{
  RunConfig c;
  c.a = -1.0;
  c.delta = 0.0;
  c.l = 0.5;
  c.m_list = {0, 3};
  c.grid = 5;
  c.q_count = 2;
  const auto bad = c.violations();
  CHECK(bad.size() >= 6);
  const auto msg = message_of(c);
  CHECK(contains(msg, "a must be > 0"));
  CHECK(contains(msg, "delta must be > 0"));
  CHECK(contains(msg, "m_list entries must be >= 1"));
  CHECK(contains(msg, "grid must be >= 20"));
  CHECK(contains(msg, "q_count must be >= 3"));
  CHECK(contains(msg, std::to_string(bad.size()) + " problems"));
}

TEST_CASE("cutoff must clear the damped layer")
{
  RunConfig c;
  c.delta = 0.6; // a + sigma = 3 > b - 2 delta = 2.8
  CHECK(contains(message_of(c), "cutoff requires a + sigma < b - 2 delta"));
}

TEST_CASE("h values snap to integral transverse modes")
{
  const auto c = default_config(1.0);
  const auto hs = c.h_values();
  CHECK(hs.size() == c.h_count);
  for (double h : hs)
    CHECK_NOTHROW(transverse_index(h, c.b));
  CHECK(hs.front() == doctest::Approx(c.h_min).epsilon(1e-3));
  CHECK(hs.back() == doctest::Approx(c.h_max).epsilon(1e-3));
  for (double h : c.quasimode_h_values())
    CHECK(h <= c.quasimode_h_max * 1.001);
}

TEST_CASE("canonical text round-trips")
{
  auto c = default_config(2.0);
  c.m_list = {5, 6};
  c.bc = BoundaryCondition::Neumann;
  c.l = -0.5;
  const auto again = parse_config(c.canonical());
  CHECK(again.canonical() == c.canonical());
  CHECK(fnv1a_hex(again.canonical()) == fnv1a_hex(c.canonical()));
}

TEST_CASE("FNV-1a reference values")
{
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("tolerance file overrides")
{
  const auto t = parse_tolerances("imq_slope = 0.1\ncap_oracle=1e-7\n");
  CHECK(t.imq_slope == 0.1);
  CHECK(t.cap_oracle == 1e-7);
  CHECK(t.residual_slope == Tolerances{}.residual_slope);
  CHECK_THROWS_AS(parse_tolerances("imq_slope = -1\n"), ConfigError);
  CHECK_THROWS_AS(parse_tolerances("unknown = 1\n"), ConfigError);
  CHECK(t.as_map().at("imq_slope") == 0.1);
}
