#pragma once
// Least-squares line fits used by every decay/growth regression.

#include <cmath>
#include <cstddef>
#include <vector>

#include "phaselab/core.hpp"

namespace phaselab {

struct FitReport {
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t npoints = 0;
  double residual = 0.0;  // RMS of fit residuals
};

inline FitReport fit_linear(const std::vector<double>& xs,
                            const std::vector<double>& ys) {
  if (xs.size() != ys.size())
    throw ConfigError("fit_linear: length mismatch");
  const std::size_t n = xs.size();
  if (n < 2) throw ConfigError("fit_linear: need at least 2 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) throw ConfigError("fit_linear: degenerate abscissae");
  FitReport r;
  r.slope = (n * sxy - sx * sy) / den;
  r.intercept = (sy - r.slope * sx) / n;
  r.npoints = n;
  double ss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = ys[i] - (r.slope * xs[i] + r.intercept);
    ss += e * e;
  }
  r.residual = std::sqrt(ss / n);
  return r;
}

inline FitReport fit_loglog(const std::vector<double>& xs,
                            const std::vector<double>& ys) {
  std::vector<double> lx, ly;
  lx.reserve(xs.size());
  ly.reserve(ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] > 0 && ys[i] > 0) {
      lx.push_back(std::log(xs[i]));
      ly.push_back(std::log(ys[i]));
    }
  }
  return fit_linear(lx, ly);
}

}  // namespace phaselab
