#pragma once
// Analysis windows for short-time Fourier transforms: a Gaussian of width
// sigma, g(x) = exp(-pi |x|^2 / sigma^2), and a compactly supported bump of
// radius rho, b(x) = exp(1 - 1/(1 - (|x|/rho)^2)) for |x| < rho.

#include <cmath>
#include <string>

#include "phaselab/core.hpp"
#include "phaselab/grid.hpp"

namespace phaselab {

struct Window {
  enum class Kind { Gaussian, Bump };
  Kind kind = Kind::Gaussian;
  double param = 1.0;  // sigma for Gaussian, rho for Bump

  void validate() const {
    if (!(param > 0.0) || !std::isfinite(param))
      throw ConfigError("window: width parameter must be positive and finite");
  }

  static Window gaussian(double sigma) { return Window{Kind::Gaussian, sigma}; }
  static Window bump(double rho) { return Window{Kind::Bump, rho}; }
};

// Window value from the squared Euclidean radius.
inline double window_eval_r2(const Window& w, double r2) {
  if (w.kind == Window::Kind::Gaussian) {
    return std::exp(-M_PI * r2 / (w.param * w.param));
  }
  const double s2 = r2 / (w.param * w.param);
  if (s2 >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - s2));
}

inline double window_eval_1d(const Window& w, double x) {
  return window_eval_r2(w, x * x);
}

// Radius beyond which the window is below `floor` (exactly zero for bumps).
inline double window_effective_radius(const Window& w, double floor = 1e-18) {
  if (w.kind == Window::Kind::Bump) return w.param;
  return w.param * std::sqrt(std::log(1.0 / floor) / M_PI);
}

inline SampledField sample_window(const GridSpec& grid, const Window& w) {
  w.validate();
  SampledField f = make_field(grid, Domain::Space);
  const std::size_t n = f.values.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = grid_point(grid, Domain::Space, i);
    double r2 = 0.0;
    for (int a = 0; a < grid.d; ++a) r2 += x[static_cast<std::size_t>(a)] * x[static_cast<std::size_t>(a)];
    f.values[i] = window_eval_r2(w, r2);
  }
  return f;
}

inline double window_l1(const GridSpec& grid, const Window& w) {
  return lp_norm(sample_window(grid, w), 1.0);
}

}  // namespace phaselab
