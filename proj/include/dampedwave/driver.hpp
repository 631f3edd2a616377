#pragma once

#include "dampedwave/config.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace dampedwave {

/// Column-named table written as CSV with round-trip precision.
class Table {
public:
  explicit Table(std::vector<std::string> columns);

  const std::vector<std::string>& columns() const { return columns_; }
  std::size_t rows() const { return rows_.size(); }
  const std::vector<std::string>& row(std::size_t i) const { return rows_[i]; }

  /// Cells are formatted with 17 significant digits.
  void add(const std::vector<double>& values);
  void add_text(std::vector<std::string> cells);

  /// Numeric column by name; throws ConfigError for an unknown column.
  std::vector<double> column(const std::string& name) const;

  void write(const std::filesystem::path& path) const;
  static Table read(const std::filesystem::path& path);

private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

std::string format_number(double value);

/// One pass/fail line of a summary. A documented deviation is reported but does not fail the run.
struct Check {
  std::string stage;
  std::string name;
  double value = 0.0;
  std::string target;
  bool pass = false;
  bool documented_deviation = false;
};

struct StageReport {
  std::string stage;
  std::vector<std::string> outputs;
  std::vector<Check> checks;
  double seconds = 0.0;
  /// what() of the exception that stopped the stage, empty on success
  std::string error;

  bool failed() const;
};

const std::vector<std::string>& subcommands();
std::map<std::string, std::string> module_versions();

/// Runs the experiment stages for one configuration and writes CSVs, manifest.json and
/// summary.txt into the output directory. Files of stages that finished stay in place when a
/// later stage fails.
class Driver {
public:
  Driver(RunConfig config, Tolerances tolerances, std::filesystem::path out_dir, int jobs = 1);

  /// 0 all checks pass, 1 a check failed, 3 a stage raised an error.
  int run(const std::string& subcommand);

  StageReport cap_solve() const;
  StageReport neumann() const;
  StageReport eigen_sweep() const;
  StageReport quasimode_sweep() const;
  StageReport resolvent_scan() const;
  StageReport evolve() const;
  /// Refits the slopes from the CSVs already present in the output directory.
  StageReport fit() const;

  const std::vector<StageReport>& reports() const { return reports_; }

private:
  StageReport run_stage(const std::string& name) const;
  void write_manifest() const;
  void write_summary() const;
  std::filesystem::path output(const std::string& file) const { return out_dir_ / file; }

  RunConfig config_;
  Tolerances tolerances_;
  std::filesystem::path out_dir_;
  int jobs_;
  std::vector<StageReport> reports_;
};

} // namespace dampedwave
