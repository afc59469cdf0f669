#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "phaselab/grid.hpp"
#include "phaselab/random.hpp"

namespace phaselab::testing {

// Centered Gaussian datum amp * exp(-pi |x - c|^2 / sigma^2) * e^{2 pi i k.x}.
inline SampledField gaussian_datum(const GridSpec& g, double sigma = 1.0, double amp = 1.0,
                                   double center = 0.0, double mod = 0.0) {
  SampledField f = make_field(g, Domain::Space);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto x = grid_point(g, Domain::Space, i);
    double r2 = 0, phase = 0;
    for (int a = 0; a < g.d; ++a) {
      const double c = x[static_cast<std::size_t>(a)] - center;
      r2 += c * c;
      phase += mod * x[static_cast<std::size_t>(a)];
    }
    f.values[i] = amp * std::exp(-M_PI * r2 / (sigma * sigma)) *
                  std::exp(cplx(0, 2 * M_PI * phase));
  }
  return f;
}

// Unit-modulus random-phase spectrum shaped by a slow envelope; the space-side
// datum is rough (flat spectrum up to the band edge), the canonical probe for
// the low-regularity mode.
inline SampledField random_phase_datum(const GridSpec& g, std::uint64_t seed,
                                       double band_fraction = 0.5) {
  SampledField fh = make_field(g, Domain::Frequency);
  SplitMix64 rng{seed};
  const double xi_cap = band_fraction * static_cast<double>(g.N) / (2.0 * g.L);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto xi = grid_point(g, Domain::Frequency, i);
    double r2 = 0;
    for (int a = 0; a < g.d; ++a)
      r2 += xi[static_cast<std::size_t>(a)] * xi[static_cast<std::size_t>(a)];
    const double phase = 2 * M_PI * rng.uniform();
    fh.values[i] = std::sqrt(r2) <= xi_cap ? std::exp(cplx(0, phase)) : cplx(0, 0);
  }
  inverse_fourier_inplace(fh);
  // normalize to unit sup so ball radii stay comparable across seeds
  double mx = 0;
  for (const auto& v : fh.values) mx = std::max(mx, std::abs(v));
  for (auto& v : fh.values) v /= mx;
  return fh;
}

inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

inline double max_abs_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double mx = 0;
  for (std::size_t i = 0; i < a.size(); ++i) mx = std::max(mx, std::abs(a[i] - b[i]));
  return mx;
}

}  // namespace phaselab::testing
