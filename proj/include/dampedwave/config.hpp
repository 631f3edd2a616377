#pragma once

#include "dampedwave/core_model.hpp"

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace dampedwave {

/// Parameters of one experiment, read from a "key = value" file ('#' starts a comment).
struct RunConfig {
  // geometry of the quasimode pipeline
  double beta = 1.0;
  double a = 1.0;
  double sigma = 2.0;
  double b = 4.0;
  double delta = 0.25;
  Join join = Join::ConstantLevel;

  BoundaryCondition bc = BoundaryCondition::Dirichlet;
  double l = 1.0;
  /// Transverse indices; h = sqrt(b / (2 pi m)). Empty: use the h range below.
  std::vector<long> m_list;
  double h_min = 1e-5;
  double h_max = 1e-3;
  std::size_t h_count = 9;
  /// upper end of the quasimode sweep, which starts at h_min
  double quasimode_h_max = 3e-4;

  // tail-mass sweep: a narrow damped layer so that the tail beyond a + sigma is still resolvable
  double tail_sigma = 0.25;
  double tail_b = 2.0;
  double tail_delta = 0.2;
  std::size_t tail_count = 12;
  /// the sweep ends at this fraction of the largest admissible h and spans a factor 30
  double tail_h_fraction = 0.5;

  // half-line solver
  double cap_length = 0.0;
  double cap_spacing = 2.5e-3;

  // eigenfinder
  double newton_tol = 1e-12;
  double glue_tol = 1e-8;

  // resolvent scan: its own strip, wide enough to reach the asymptotic regime at desk scale
  double resolvent_a = 10.0;
  double resolvent_sigma = 1.0;
  double resolvent_b = 11.5;
  std::size_t grid = 4000;
  double q_min = 50.0;
  double q_max = 2500.0;
  std::size_t q_count = 8;

  // time evolution
  std::vector<double> evolve_h;
  double evolve_qdt = 0.2;
  /// evolve until E has fallen by this fraction of an e-fold
  double evolve_efolds = 0.05;

  /// Every violated invariant, empty when the configuration is usable.
  std::vector<std::string> violations() const;
  /// Throws ConfigError listing all violations.
  void validate() const;

  DampingProfile profile() const;
  DampingProfile resolvent_profile() const;
  Cutoff cutoff() const;
  DampingProfile tail_profile() const;
  Cutoff tail_cutoff() const;
  /// h values of the sweep (from m_list or the log-spaced range), each with b/(2 pi h^2) integral.
  std::vector<double> h_values() const;
  /// log-spaced on [h_min, quasimode_h_max] with h_count points, or m_list when given
  std::vector<double> quasimode_h_values() const;

  /// Canonical "key = value" text, used for hashing and the manifest.
  std::string canonical() const;
};

/// Defaults tuned per beta (h ranges and evolution parameters).
RunConfig default_config(double beta);

RunConfig parse_config(const std::string& text, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});

/// Acceptance thresholds, overridable from a "key = value" file.
struct Tolerances {
  double cap_oracle = 1e-6;
  double cap_runtime = 1.0;
  double neumann_beta2 = 1e-5;
  double neumann_beta1 = 1e-4;
  double eigen_exponent = 0.05;
  double eigen_runtime = 60.0;
  double residual_slope = 0.1;
  double imq_slope = 0.05;
  double resolvent_band = 0.05;
  double resolvent_runtime = 300.0;
  double decay_rate = 0.05;
  double energy_conservation = 1e-8;
  double gcc_r2 = 0.999;
  double cross_validation = 1e-8;

  std::map<std::string, double> as_map() const;
};

Tolerances parse_tolerances(const std::string& text, Tolerances base = {});
Tolerances load_tolerances(const std::string& path, Tolerances base = {});

/// 64-bit FNV-1a of a string, printed as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

} // namespace dampedwave
