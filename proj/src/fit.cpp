#include "dampedwave/fit.hpp"

#include "dampedwave/errors.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <cmath>

namespace dampedwave {

LineFit fit_line(std::span<const double> x, std::span<const double> y)
{
  std::vector<double> w(x.size(), 1.0);
  return fit_line(x, y, w);
}

LineFit fit_line(std::span<const double> x, std::span<const double> y,
                 std::span<const double> weights)
{
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n || weights.size() != n)
    throw DomainError("fit_line: need at least two points with matching sizes");

  double sw = 0.0, sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sw += weights[i];
    sx += weights[i] * x[i];
    sy += weights[i] * y[i];
  }
  const double mx = sx / sw;
  const double my = sy / sw;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += weights[i] * dx * dx;
    sxy += weights[i] * dx * dy;
    syy += weights[i] * dy * dy;
  }
  if (sxx <= 0.0)
    throw DomainError("fit_line: abscissae are all equal");

  LineFit fit;
  fit.points = n;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    sse += weights[i] * r * r;
  }
  fit.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  if (n > 2) {
    const double dof = static_cast<double>(n - 2);
    fit.slope_stderr = std::sqrt(sse / dof / sxx);
    const boost::math::students_t dist(dof);
    const double t = boost::math::quantile(boost::math::complement(dist, 0.025));
    fit.slope_ci_low = fit.slope - t * fit.slope_stderr;
    fit.slope_ci_high = fit.slope + t * fit.slope_stderr;
  } else {
    fit.slope_ci_low = fit.slope_ci_high = fit.slope;
  }
  return fit;
}

LineFit fit_loglog(std::span<const double> x, std::span<const double> y)
{
  std::vector<double> lx, ly;
  lx.reserve(x.size());
  ly.reserve(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(std::abs(x[i]) > 0.0) || !(std::abs(y[i]) > 0.0))
      throw DomainError("fit_loglog: zero or non-finite sample");
    lx.push_back(std::log(std::abs(x[i])));
    ly.push_back(std::log(std::abs(y[i])));
  }
  return fit_line(lx, ly);
}

std::vector<double> local_loglog_slopes(std::span<const double> x, std::span<const double> y)
{
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < x.size(); ++i)
    out.push_back((std::log(std::abs(y[i + 1])) - std::log(std::abs(y[i]))) /
                  (std::log(std::abs(x[i + 1])) - std::log(std::abs(x[i]))));
  return out;
}

std::vector<double> log_space(double lo, double hi, std::size_t count)
{
  if (count < 2 || !(lo > 0.0) || !(hi > 0.0))
    throw DomainError("log_space: need count >= 2 and positive bounds");
  std::vector<double> out(count);
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (std::size_t i = 0; i < count; ++i)
    out[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

} // namespace dampedwave
