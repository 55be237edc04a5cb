#pragma once

#include <cstddef>
#include <span>

#include "covert_fbl/errors.hpp"

namespace covert_fbl {

struct LinearFit {
  double slope;
  double intercept;
  double r_squared;
  double rss;
};

/// Ordinary least squares y = intercept + slope * x.
inline LinearFit ols(std::span<const double> x, std::span<const double> y) {
  const std::size_t m = x.size();
  if (m != y.size() || m < 2) throw FitError("ols: need at least two paired points");
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(m);
  my /= static_cast<double>(m);
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw FitError("ols: degenerate abscissae");
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = y[i] - (intercept + slope * x[i]);
    rss += r * r;
  }
  const double r2 = syy > 0.0 ? 1.0 - rss / syy : 1.0;
  return {slope, intercept, r2 < 0.0 ? 0.0 : (r2 > 1.0 ? 1.0 : r2), rss};
}

}  // namespace covert_fbl
