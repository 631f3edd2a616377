#pragma once

#include <span>
#include <vector>

namespace dampedwave {

/// Weighted least-squares line y = intercept + slope x with a 95% confidence band on the slope.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double slope_stderr = 0.0;
  double slope_ci_low = 0.0;
  double slope_ci_high = 0.0;
  std::size_t points = 0;
};

LineFit fit_line(std::span<const double> x, std::span<const double> y);
LineFit fit_line(std::span<const double> x, std::span<const double> y,
                 std::span<const double> weights);

/// Slope of log|y| against log|x|.
LineFit fit_loglog(std::span<const double> x, std::span<const double> y);

/// Slopes of log y vs log x between consecutive samples.
std::vector<double> local_loglog_slopes(std::span<const double> x, std::span<const double> y);

/// Points spaced evenly in log between lo and hi (inclusive).
std::vector<double> log_space(double lo, double hi, std::size_t count);

} // namespace dampedwave
