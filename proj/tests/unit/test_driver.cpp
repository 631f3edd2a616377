#include "dampedwave/driver.hpp"
#include "dampedwave/errors.hpp"

#include <doctest.h>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace dampedwave;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
  const fs::path dir = fs::temp_directory_path() / ("dampedwave_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& path)
{
  std::ifstream in(path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

RunConfig small_config(double beta)
{
  RunConfig c = default_config(beta);
  c.h_count = 5;
  c.h_min = 1e-4;
  c.h_max = 1e-3;
  return c;
}

} // namespace

TEST_CASE("table round trip")
{
  const fs::path dir = scratch("table");
  fs::create_directories(dir);
  Table t({"x", "y"});
  t.add({0.1, 1.0 / 3.0});
  t.add({-2.5e-300, 12345678.9});
  t.write(dir / "t.csv");
  const auto back = Table::read(dir / "t.csv");
  CHECK(back.columns() == t.columns());
  CHECK(back.column("y")[0] == 1.0 / 3.0);
  CHECK(back.column("x")[1] == -2.5e-300);
  CHECK_THROWS_AS(back.column("z"), ConfigError);
  CHECK(format_number(0.1) == "0.10000000000000001");
  fs::remove_all(dir);
}

TEST_CASE("driver refuses an invalid configuration")
{
  RunConfig c = default_config(1.0);
  c.sigma = 10.0;
  c.l = 0.5;
  try {
    Driver d(c, Tolerances{}, scratch("invalid"));
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("a + sigma < b") != std::string::npos);
    CHECK(msg.find("nonzero integer l") != std::string::npos);
  }
}

TEST_CASE("stages write deterministic CSVs and a manifest")
{
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  for (const auto& dir : {a, b}) {
    Driver d(small_config(2.0), Tolerances{}, dir);
    CHECK(d.run("cap-solve") == 0);
    CHECK(d.run("eigen-sweep") != 3);
  }
  for (const char* file : {"cap_profile.csv", "cap_solve.csv", "eigen_sweep.csv"}) {
    REQUIRE(fs::exists(a / file));
    CHECK(slurp(a / file) == slurp(b / file));
  }
  const auto manifest = nlohmann::json::parse(slurp(a / "manifest.json"));
  CHECK(manifest["config_hash"].get<std::string>().size() == 16);
  CHECK(manifest["config_hash"] == fnv1a_hex(small_config(2.0).canonical()));
  CHECK(manifest["stages"].contains("eigen-sweep"));
  CHECK(manifest["module_versions"].size() == 7);
  CHECK(fs::exists(a / "summary.txt"));

  SUBCASE("fit refits what is on disk")
  {
    Driver d(small_config(2.0), Tolerances{}, a);
    CHECK(d.run("fit") != 3);
    const auto fits = Table::read(a / "fits.csv");
    REQUIRE(fits.rows() >= 1);
    CHECK(fits.row(0)[0] == "abs_offset_vs_h");
    CHECK(std::stod(fits.row(0)[1]) == doctest::Approx(1.5).epsilon(0.05));
  }
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("a failing stage leaves earlier outputs and records the error")
{
  const fs::path dir = scratch("partial");
  RunConfig c = small_config(1.0);
  c.grid = 20; // far too coarse for the resolvent scan
  Driver d(c, Tolerances{}, dir);
  CHECK(d.run("cap-solve") == 0);
  CHECK(d.run("resolvent-scan") == 3);
  CHECK(fs::exists(dir / "cap_solve.csv"));
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["stages"]["resolvent-scan"]["status"] == "error");
  CHECK(manifest["stages"]["resolvent-scan"]["error"].get<std::string>().find("points") !=
        std::string::npos);
  CHECK(d.reports().front().error.size() > 0);
  CHECK(d.run("no-such-stage") == 3);
  fs::remove_all(dir);
}

TEST_CASE("documented deviations do not fail a stage")
{
  StageReport r;
  r.checks.push_back({"s", "known", 1.0, "t", false, true});
  CHECK(!r.failed());
  r.checks.push_back({"s", "real", 1.0, "t", false, false});
  CHECK(r.failed());
  StageReport e;
  e.error = "boom";
  CHECK(e.failed());
}
