#pragma once

#include <string>
#include <vector>

namespace dampedwave {

/// How the damping continues past the polynomial region a+sigma < |x| < b.
enum class Join {
  ConstantLevel, ///< c = sigma^beta, continuous at a+sigma
  SmoothBlend    ///< C-infinity blend reaching (2 sigma)^beta by a+2 sigma
};

enum class BoundaryCondition { Dirichlet, Neumann };

std::string to_string(Join join);
std::string to_string(BoundaryCondition bc);

/// Value and first two derivatives of a scalar function at a point.
struct Jet {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

/// C-infinity step: 0 for s <= 0, 1 for s >= 1, strictly increasing in between,
/// built from the exp(-1/s) bump. All derivatives vanish at both ends.
Jet smooth_step(double s);

/// Even, y-invariant damping on the strip |x| <= b:
///   0 on |x| < a, (|x|-a)^beta on a < |x| <= a+sigma, c(|x|) >= c_floor beyond.
class DampingProfile {
public:
  DampingProfile(double beta, double a, double sigma, double b,
                 Join join = Join::ConstantLevel);

  double beta() const { return beta_; }
  double a() const { return a_; }
  double sigma() const { return sigma_; }
  double b() const { return b_; }
  Join join() const { return join_; }
  /// Lower bound of c on (a+sigma, b).
  double c_floor() const { return c_floor_; }
  /// Largest value W takes on [-b, b].
  double max_value() const;

  /// W(x); throws DomainError for |x| > b.
  double operator()(double x) const;

  /// W restricted to x >= 0 with the model tail (x-a)_+^beta extended past a+sigma.
  double model_potential(double x) const;

  /// Average of W over [x - dx/2, x + dx/2] clipped to [-b, b]; sampling rule for grids.
  double cell_average(double x, double dx) const;

  /// Checks every profile invariant and returns the list of violations.
  static std::vector<std::string> violations(double beta, double a, double sigma, double b);

private:
  double beta_;
  double a_;
  double sigma_;
  double b_;
  Join join_;
  double c_floor_;
  double blend_level_;
};

double damping_value(double x, const DampingProfile& profile);

/// Cutoff phi: 1 below b-2 delta, 0 above b-delta, smooth monotone transition.
class Cutoff {
public:
  Cutoff(double b, double delta);
  /// Also checks a + sigma < b - 2 delta against the profile.
  Cutoff(const DampingProfile& profile, double delta);

  double b() const { return b_; }
  double delta() const { return delta_; }
  double transition_start() const { return b_ - 2.0 * delta_; }
  double transition_end() const { return b_ - delta_; }

  double operator()(double x) const { return jet(x).value; }
  Jet jet(double x) const;
  /// max |phi'| over the transition.
  double max_slope() const;

private:
  double b_;
  double delta_;
};

double cutoff_value(double x, const Cutoff& cutoff);

/// Semiclassical parameter with b / (2 pi h^2) = m.
double select_h(long m, double b);
/// Inverse of select_h: nearest integer m for h, throws ConfigError if b/(2 pi h^2) is not integral.
long transverse_index(double h, double b, double rel_tol = 1e-9);

/// Dirichlet requires integer l, Neumann requires half-integer l.
bool longitudinal_index_valid(double l, BoundaryCondition bc);

} // namespace dampedwave
