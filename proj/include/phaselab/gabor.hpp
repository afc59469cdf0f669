#pragma once
// Short-time Fourier analysis: phase-space portraits |V_g f(x_j, xi_k)|,
// mixed modulation / amalgam norms, the stationary-region partition and its
// decay regression, dilation and window-equivalence checks, and streaming
// slice scanners for grids too large to hold a dense portrait.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "phaselab/core.hpp"
#include "phaselab/fit.hpp"
#include "phaselab/grid.hpp"
#include "phaselab/symbols.hpp"
#include "phaselab/window.hpp"

namespace phaselab {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNoiseFloor = 1e-12;  // log-regressions ignore smaller magnitudes

struct PhaseSpacePortrait {
  GridSpec grid;   // source grid; the xi-lattice is its full frequency grid
  Window window;
  double window_l1 = 0.0;
  std::vector<std::size_t> slice_flat;  // flat indices of the x-lattice points
  double dx_cell = 0.0;                 // x-lattice cell volume
  std::vector<double> mags;             // n_slices x grid.size(), row-major

  std::size_t n_slices() const { return slice_flat.size(); }
  const double* slice(std::size_t j) const { return mags.data() + j * grid.size(); }
  Vec3 slice_pos(std::size_t j) const {
    return grid_point(grid, Domain::Space, slice_flat[j]);
  }
  double max_magnitude() const {
    double m = 0;
    for (double v : mags) m = std::max(m, v);
    return m;
  }
};

namespace detail {

// windowed[n] = f[n] * conj(g[(n - shift) mod N per axis]); the window sample
// array is centered at index N/2, so shift = center_index - N/2 per axis.
inline void windowed_product(const SampledField& f, const std::vector<cplx>& gsamples,
                             std::size_t center_flat, std::vector<cplx>& out) {
  const GridSpec& g = f.grid;
  const std::size_t n = f.values.size();
  out.resize(n);
  std::array<std::size_t, 3> cidx{0, 0, 0};
  decode_index(g, center_flat, cidx);
  if (g.d == 1) {
    const std::ptrdiff_t N = static_cast<std::ptrdiff_t>(g.N);
    const std::ptrdiff_t s = static_cast<std::ptrdiff_t>(cidx[0]) - N / 2;
    for (std::ptrdiff_t i = 0; i < N; ++i) {
      std::ptrdiff_t k = i - s;
      if (k < 0) k += N;
      if (k >= N) k -= N;
      out[static_cast<std::size_t>(i)] =
          f.values[static_cast<std::size_t>(i)] * std::conj(gsamples[static_cast<std::size_t>(k)]);
    }
    return;
  }
  std::array<std::size_t, 3> idx{0, 0, 0};
  for (std::size_t i = 0; i < n; ++i) {
    decode_index(g, i, idx);
    std::size_t k = 0;
    for (int a = 0; a < g.d; ++a) {
      const std::size_t na = idx[static_cast<std::size_t>(a)];
      const std::size_t ca = cidx[static_cast<std::size_t>(a)];
      // (na - (ca - N/2)) mod N
      std::size_t m = na + g.N / 2 + g.N - ca;
      while (m >= g.N) m -= g.N;
      k = k * g.N + m;
    }
    out[i] = f.values[i] * std::conj(gsamples[k]);
  }
}

inline void check_window(const SampledField& gs) {
  double mx = 0;
  for (const auto& v : gs.values) mx = std::max(mx, std::abs(v));
  if (mx == 0) throw ConfigError("stft: window samples are identically zero");
}

}  // namespace detail

// Dense portrait on the strided x-lattice (every axis index a multiple of
// x_stride) and the full frequency grid.
inline PhaseSpacePortrait stft(const SampledField& f, const Window& window, int x_stride) {
  f.validate();
  window.validate();
  if (f.domain != Domain::Space) throw ConfigError("stft: field must be in the space domain");
  if (x_stride < 1) throw ConfigError("stft: x_stride must be >= 1");
  if (f.grid.N % static_cast<std::size_t>(x_stride) != 0)
    throw ConfigError("stft: x_stride must divide N");

  PhaseSpacePortrait P;
  P.grid = f.grid;
  P.window = window;
  SampledField gs = sample_window(f.grid, window);
  detail::check_window(gs);
  P.window_l1 = lp_norm(gs, 1.0);
  P.dx_cell = std::pow(static_cast<double>(x_stride) * f.grid.h(), f.grid.d);

  const std::size_t per_axis = f.grid.N / static_cast<std::size_t>(x_stride);
  std::size_t n_slices = 1;
  for (int a = 0; a < f.grid.d; ++a) n_slices *= per_axis;
  P.slice_flat.reserve(n_slices);
  std::array<std::size_t, 3> sidx{0, 0, 0};
  for (std::size_t j = 0; j < n_slices; ++j) {
    std::size_t r = j;
    for (int a = f.grid.d - 1; a >= 0; --a) {
      sidx[static_cast<std::size_t>(a)] = (r % per_axis) * static_cast<std::size_t>(x_stride);
      r /= per_axis;
    }
    P.slice_flat.push_back(encode_index(f.grid, sidx));
  }

  P.mags.resize(n_slices * f.grid.size());
  SampledField work = make_field(f.grid, Domain::Space);
  for (std::size_t j = 0; j < n_slices; ++j) {
    detail::windowed_product(f, gs.values, P.slice_flat[j], work.values);
    work.domain = Domain::Space;
    forward_fourier_inplace(work);
    double* row = P.mags.data() + j * f.grid.size();
    for (std::size_t k = 0; k < f.grid.size(); ++k) row[k] = std::abs(work.values[k]);
  }
  return P;
}

// Portrait at an arbitrary list of x-lattice points (1-d interior slices etc).
inline PhaseSpacePortrait stft_at_positions(const SampledField& f, const Window& window,
                                            const std::vector<std::size_t>& centers,
                                            double dx_cell) {
  f.validate();
  window.validate();
  if (f.domain != Domain::Space) throw ConfigError("stft: field must be in the space domain");
  if (centers.empty()) throw ConfigError("stft: empty slice list");
  PhaseSpacePortrait P;
  P.grid = f.grid;
  P.window = window;
  SampledField gs = sample_window(f.grid, window);
  detail::check_window(gs);
  P.window_l1 = lp_norm(gs, 1.0);
  P.dx_cell = dx_cell;
  P.slice_flat = centers;
  P.mags.resize(centers.size() * f.grid.size());
  SampledField work = make_field(f.grid, Domain::Space);
  for (std::size_t j = 0; j < centers.size(); ++j) {
    detail::windowed_product(f, gs.values, centers[j], work.values);
    work.domain = Domain::Space;
    forward_fourier_inplace(work);
    double* row = P.mags.data() + j * f.grid.size();
    for (std::size_t k = 0; k < f.grid.size(); ++k) row[k] = std::abs(work.values[k]);
  }
  return P;
}

// O(N^2)-per-slice reference STFT used to validate the FFT path.  Uses the
// same periodized window convention (displacement wrapped into [-L/2, L/2)).
inline std::vector<cplx> stft_direct_oracle(const SampledField& f, const Window& window,
                                            std::size_t center_flat) {
  f.validate();
  const GridSpec& g = f.grid;
  const Vec3 xc = grid_point(g, Domain::Space, center_flat);
  std::vector<cplx> out(g.size());
  const double w = std::pow(g.h(), g.d);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Vec3 xi = grid_point(g, Domain::Frequency, k);
    cplx acc = 0;
    for (std::size_t n = 0; n < g.size(); ++n) {
      const Vec3 x = grid_point(g, Domain::Space, n);
      double r2 = 0, ph = 0;
      for (int a = 0; a < g.d; ++a) {
        double dxa = x[static_cast<std::size_t>(a)] - xc[static_cast<std::size_t>(a)];
        while (dxa < -g.L / 2) dxa += g.L;
        while (dxa >= g.L / 2) dxa -= g.L;
        r2 += dxa * dxa;
        ph += xi[static_cast<std::size_t>(a)] * x[static_cast<std::size_t>(a)];
      }
      const double gv = window_eval_r2(window, r2);
      acc += f.values[n] * gv * std::exp(cplx(0, -2 * M_PI * ph));
    }
    out[k] = w * acc;
  }
  return out;
}

namespace detail {

inline void check_pq(double p, double q) {
  auto ok = [](double v) { return std::isinf(v) || v >= 1.0; };
  if (!ok(p) || !ok(q))
    throw ConfigError("mixed norm: exponents must lie in [1, infinity]");
}

}  // namespace detail

// M^{p,q}: inner L^p over the x-lattice (weight dx_cell), outer L^q over the
// frequency grid (weight L^{-d}).
inline double modulation_norm(const PhaseSpacePortrait& P, double p, double q) {
  detail::check_pq(p, q);
  const std::size_t nx = P.n_slices(), nk = P.grid.size();
  const double dxi = std::pow(1.0 / P.grid.L, P.grid.d);
  std::vector<double> inner(nk, 0.0);
  if (std::isinf(p)) {
    for (std::size_t j = 0; j < nx; ++j) {
      const double* row = P.slice(j);
      for (std::size_t k = 0; k < nk; ++k) inner[k] = std::max(inner[k], row[k]);
    }
  } else {
    for (std::size_t j = 0; j < nx; ++j) {
      const double* row = P.slice(j);
      if (p == 1.0) {
        for (std::size_t k = 0; k < nk; ++k) inner[k] += row[k];
      } else if (p == 2.0) {
        for (std::size_t k = 0; k < nk; ++k) inner[k] += row[k] * row[k];
      } else {
        for (std::size_t k = 0; k < nk; ++k) inner[k] += std::pow(row[k], p);
      }
    }
    for (std::size_t k = 0; k < nk; ++k) inner[k] = std::pow(inner[k] * P.dx_cell, 1.0 / p);
  }
  if (std::isinf(q)) {
    double m = 0;
    for (double v : inner) m = std::max(m, v);
    return m;
  }
  long double acc = 0;
  for (double v : inner) acc += std::pow(v, q);
  return std::pow(static_cast<double>(acc) * dxi, 1.0 / q);
}

// W^{p,q}: inner L^p over frequency (weight L^{-d}), outer L^q over x.
inline double amalgam_norm(const PhaseSpacePortrait& P, double p, double q) {
  detail::check_pq(p, q);
  const std::size_t nx = P.n_slices(), nk = P.grid.size();
  const double dxi = std::pow(1.0 / P.grid.L, P.grid.d);
  std::vector<double> inner(nx, 0.0);
  for (std::size_t j = 0; j < nx; ++j) {
    const double* row = P.slice(j);
    if (std::isinf(p)) {
      double m = 0;
      for (std::size_t k = 0; k < nk; ++k) m = std::max(m, row[k]);
      inner[j] = m;
    } else {
      long double acc = 0;
      if (p == 1.0) {
        for (std::size_t k = 0; k < nk; ++k) acc += row[k];
      } else if (p == 2.0) {
        for (std::size_t k = 0; k < nk; ++k) acc += row[k] * row[k];
      } else {
        for (std::size_t k = 0; k < nk; ++k) acc += std::pow(row[k], p);
      }
      inner[j] = std::pow(static_cast<double>(acc) * dxi, 1.0 / p);
    }
  }
  if (std::isinf(q)) {
    double m = 0;
    for (double v : inner) m = std::max(m, v);
    return m;
  }
  long double acc = 0;
  for (double v : inner) acc += std::pow(v, q);
  return std::pow(static_cast<double>(acc) * P.dx_cell, 1.0 / q);
}

// ---------------------------------------------------------------------------
// Stationary-region partition Omega^1 = {(x, xi): |xi - grad mu~(x)| > A |x|^{m-2}}
// (true entries of the mask), with its complement Omega^2.

inline std::vector<std::uint8_t> region_partition(const PhaseSpacePortrait& P,
                                                  const SmoothedSymbol& sym, double A) {
  sym.validate();
  if (P.grid.d != sym.base.d)
    throw ConfigError("region_partition: portrait and symbol dimensions differ");
  if (!(A > 0)) throw ConfigError("region_partition: A must be positive");
  const std::size_t nx = P.n_slices(), nk = P.grid.size();
  std::vector<std::uint8_t> mask(nx * nk);
  for (std::size_t j = 0; j < nx; ++j) {
    const Vec3 x = P.slice_pos(j);
    const Vec3 g = sym.grad(x);
    const double thr = A * std::pow(vec_norm(x, P.grid.d), sym.base.m - 2.0);
    for (std::size_t k = 0; k < nk; ++k) {
      const Vec3 xi = grid_point(P.grid, Domain::Frequency, k);
      Vec3 dv{0, 0, 0};
      for (int a = 0; a < P.grid.d; ++a)
        dv[static_cast<std::size_t>(a)] = xi[static_cast<std::size_t>(a)] - g[static_cast<std::size_t>(a)];
      mask[j * nk + k] = vec_norm(dv, P.grid.d) > thr ? 1 : 0;
    }
  }
  return mask;
}

// Least-squares slope of log |V| against log <xi - grad mu~(x)> over the
// Omega^1 lattice points above the noise floor.
struct DecayFit {
  FitReport fit;
  std::size_t usable_points = 0;
};

inline DecayFit decay_exponent_fit(const PhaseSpacePortrait& P, const SmoothedSymbol& sym,
                                   double A, double floor = kNoiseFloor) {
  const std::vector<std::uint8_t> mask = region_partition(P, sym, A);
  const std::size_t nx = P.n_slices(), nk = P.grid.size();
  std::vector<double> ld, lv;
  for (std::size_t j = 0; j < nx; ++j) {
    const Vec3 x = P.slice_pos(j);
    const Vec3 g = sym.grad(x);
    const double* row = P.slice(j);
    for (std::size_t k = 0; k < nk; ++k) {
      if (!mask[j * nk + k] || row[k] <= floor) continue;
      const Vec3 xi = grid_point(P.grid, Domain::Frequency, k);
      double d2 = 0;
      for (int a = 0; a < P.grid.d; ++a) {
        const double dv = xi[static_cast<std::size_t>(a)] - g[static_cast<std::size_t>(a)];
        d2 += dv * dv;
      }
      ld.push_back(0.5 * std::log1p(d2));  // log <dist>
      lv.push_back(std::log(row[k]));
    }
  }
  if (ld.size() < 50)
    throw QualityError("decay_exponent_fit: fewer than 50 usable points (" +
                       std::to_string(ld.size()) + ")");
  DecayFit out;
  out.fit = fit_linear(ld, lv);
  out.usable_points = ld.size();
  return out;
}

// ---------------------------------------------------------------------------
// Dilation bound check (f_lambda(x) = f(lambda x)): ratio of the measured
// norm to C |lambda|^{-d(1/p-1/q+1)} (1+lambda^2)^{d/2} times the baseline,
// with C = 2^{1-d/2} so the lambda = 1 ratio is 1/2 by construction.

struct DilationRow {
  double lambda = 1.0;
  double norm = 0.0;
  double ratio = 0.0;
};

inline std::vector<DilationRow> dilation_scaling_check(
    const std::function<cplx(const Vec3&)>& generator, const GridSpec& grid,
    const Window& window, const std::vector<double>& lambdas, double p, double q,
    int x_stride) {
  detail::check_pq(p, q);
  grid.validate();
  auto sample = [&](double lam) {
    SampledField f = make_field(grid, Domain::Space);
    for (std::size_t i = 0; i < f.values.size(); ++i) {
      Vec3 x = grid_point(grid, Domain::Space, i);
      for (int a = 0; a < grid.d; ++a) x[static_cast<std::size_t>(a)] *= lam;
      f.values[i] = generator(x);
    }
    return f;
  };
  const double base = modulation_norm(stft(sample(1.0), window, x_stride), p, q);
  if (base == 0) throw ConfigError("dilation_scaling_check: baseline norm is zero");
  const double C = std::pow(2.0, 1.0 - grid.d / 2.0);
  const double ex = -grid.d * (1.0 / p - 1.0 / q + 1.0);
  std::vector<DilationRow> rows;
  for (double lam : lambdas) {
    if (lam == 0) throw ConfigError("dilation_scaling_check: lambda must be nonzero");
    DilationRow r;
    r.lambda = lam;
    r.norm = modulation_norm(stft(sample(lam), window, x_stride), p, q);
    const double bound = C * std::pow(std::abs(lam), ex) *
                         std::pow(1.0 + lam * lam, grid.d / 2.0) * base;
    r.ratio = r.norm / bound;
    rows.push_back(r);
  }
  return rows;
}

// Ratio of the two M^{p,q} estimates under a window swap.
inline double window_swap_equivalence(const SampledField& f, const Window& g1,
                                      const Window& g2, double p, double q, int x_stride) {
  const double n1 = modulation_norm(stft(f, g1, x_stride), p, q);
  const double n2 = modulation_norm(stft(f, g2, x_stride), p, q);
  if (n2 == 0) throw ConfigError("window_swap_equivalence: second norm is zero");
  return n1 / n2;
}

// ---------------------------------------------------------------------------
// Streaming 1-d slice scanner: one full-length FFT per slice, O(N) memory.
// Produces per-slice frequency integrals and sups plus M^{p,inf} estimates
// for a list of inner exponents, without materializing the portrait.

struct SliceScan1D {
  std::vector<double> xs;              // slice positions
  double dx = 0.0;                     // slice spacing
  double dxi = 0.0;                    // frequency spacing 1/L
  double window_l1 = 0.0;
  std::vector<double> slice_integral;  // per slice: sum_k |V| * dxi
  std::vector<double> slice_sup;       // per slice: max_k |V|
  std::vector<double> mpinf;           // per requested p: M^{p,inf} estimate

  double w1inf() const {  // W^{1,inf} = sup_x int |V(x,.)| dxi
    double m = 0;
    for (double v : slice_integral) m = std::max(m, v);
    return m;
  }
  double winf1() const {  // W^{inf,1} = int sup_xi |V(x,.)| dx
    double s = 0;
    for (double v : slice_sup) s += v;
    return s * dx;
  }
};

inline SliceScan1D scan_slices_1d(const SampledField& f, const Window& window,
                                  std::size_t n_slices,
                                  const std::vector<double>& inner_ps = {}) {
  f.validate();
  if (f.grid.d != 1) throw ConfigError("scan_slices_1d: field must be one-dimensional");
  if (f.domain != Domain::Space) throw ConfigError("scan_slices_1d: field must be in space domain");
  if (n_slices == 0 || f.grid.N % n_slices != 0)
    throw ConfigError("scan_slices_1d: n_slices must divide N");
  for (double p : inner_ps) {
    if (!std::isinf(p) && p < 1.0) throw ConfigError("scan_slices_1d: p must be >= 1");
  }
  const GridSpec& g = f.grid;
  const std::size_t N = g.N;
  const std::size_t stride = N / n_slices;

  SampledField gs = sample_window(g, window);
  detail::check_window(gs);

  SliceScan1D out;
  out.dx = g.L / static_cast<double>(n_slices);
  out.dxi = 1.0 / g.L;
  out.window_l1 = lp_norm(gs, 1.0);
  out.xs.resize(n_slices);
  out.slice_integral.resize(n_slices);
  out.slice_sup.resize(n_slices);

  std::vector<std::vector<double>> acc(inner_ps.size(), std::vector<double>(N, 0.0));
  std::vector<cplx> work(N);
  for (std::size_t j = 0; j < n_slices; ++j) {
    const std::size_t c = j * stride;
    out.xs[j] = axis_coord(g, Domain::Space, c);
    detail::windowed_product(f, gs.values, c, work);
    half_shift(g, work);
    detail::FftEngine::instance().execute(g, FFTW_FORWARD, work.data());
    half_shift(g, work);
    const double hscale = g.h();
    long double sum = 0;
    double sup = 0;
    for (std::size_t k = 0; k < N; ++k) {
      const double v = hscale * std::abs(work[k]);
      sum += v;
      sup = std::max(sup, v);
      for (std::size_t ip = 0; ip < inner_ps.size(); ++ip) {
        const double p = inner_ps[ip];
        if (std::isinf(p)) {
          acc[ip][k] = std::max(acc[ip][k], v);
        } else if (p == 1.0) {
          acc[ip][k] += v;
        } else if (p == 2.0) {
          acc[ip][k] += v * v;
        } else {
          acc[ip][k] += std::pow(v, p);
        }
      }
    }
    out.slice_integral[j] = static_cast<double>(sum) * out.dxi;
    out.slice_sup[j] = sup;
  }
  out.mpinf.resize(inner_ps.size());
  for (std::size_t ip = 0; ip < inner_ps.size(); ++ip) {
    double m = 0;
    if (std::isinf(inner_ps[ip])) {
      for (double v : acc[ip]) m = std::max(m, v);
    } else {
      for (double v : acc[ip]) m = std::max(m, std::pow(v * out.dx, 1.0 / inner_ps[ip]));
    }
    out.mpinf[ip] = m;
  }
  return out;
}

// W^{1,inf} of a 2-d field from ray slices (one axis ray and the diagonal),
// exploiting the radial symmetry of the fields this is used on.
inline double wnorm_1inf_rays_2d(const SampledField& f, const Window& window, int ray_step) {
  f.validate();
  if (f.grid.d != 2) throw ConfigError("wnorm_1inf_rays_2d: field must be two-dimensional");
  if (ray_step < 1) throw ConfigError("wnorm_1inf_rays_2d: ray_step must be >= 1");
  const GridSpec& g = f.grid;
  const std::size_t N = g.N;
  SampledField gs = sample_window(g, window);
  detail::check_window(gs);
  std::vector<std::size_t> centers;
  for (std::size_t i = 0; i < N; i += static_cast<std::size_t>(ray_step)) {
    centers.push_back(encode_index(g, {i, N / 2, 0}));  // axis ray
    centers.push_back(encode_index(g, {i, i, 0}));      // diagonal ray
  }
  const double dxi2 = 1.0 / (g.L * g.L);
  const double h2 = g.h() * g.h();
  std::vector<cplx> work;
  double best = 0;
  for (std::size_t c : centers) {
    detail::windowed_product(f, gs.values, c, work);
    half_shift(g, work);
    detail::FftEngine::instance().execute(g, FFTW_FORWARD, work.data());
    half_shift(g, work);
    long double sum = 0;
    for (const auto& v : work) sum += std::abs(v);
    best = std::max(best, static_cast<double>(sum) * h2 * dxi2);
  }
  return best;
}

// ---------------------------------------------------------------------------
// Alias-free ladder grids for Fresnel fields at t = 1: the Nyquist frequency
// N/(2L) must dominate max |grad mu| = m (L/2)^{m-1}; rounded up to 2^k or
// 3*2^k so the FFT stays fast and slice counts divide N.

inline std::size_t alias_free_N(double m, double L) {
  const double nmin = 2.0 * L * m * std::pow(L / 2.0, m - 1.0);
  std::size_t N = 4;
  while (static_cast<double>(N) < nmin) N *= 2;
  const std::size_t alt = (N / 4) * 3;
  if (static_cast<double>(alt) >= nmin && alt < N) return alt;
  return N;
}

// M^{1,inf} estimate and per-slice frequency integrals of F_mu (t=1) for
// RadialPower |x|^m on the alias-free grid for extent L.
struct LadderPoint {
  std::size_t N_used = 0;
  double m1inf = 0.0;
  std::vector<double> xs;
  std::vector<double> slice_integral;
};

inline LadderPoint ladder_point(double m, double L, const Window& window) {
  const std::size_t N = alias_free_N(m, L);
  GridSpec g{1, N, L};
  auto sym = HomogeneousSymbol::radial_power(1, m);
  FresnelResult fr = fresnel_field(sym, g, 1.0);
  std::size_t n_slices = static_cast<std::size_t>(2.0 * L);
  while (N % n_slices != 0) ++n_slices;
  SliceScan1D scan = scan_slices_1d(fr.field, window, n_slices, {1.0});
  LadderPoint out;
  out.N_used = N;
  out.m1inf = scan.mpinf[0];
  out.xs = std::move(scan.xs);
  out.slice_integral = std::move(scan.slice_integral);
  return out;
}

// Sup over xi of the x-measure of Omega^2_xi = {x: |xi - mu'(x)| <= A |x|^{m-2}}
// on a dense 1-d grid (geometry only; no portrait).
inline double omega2_sliced_measure_sup(double m, double L, std::size_t N, double A) {
  GridSpec g{1, N, L};
  g.validate();
  const double h = g.h();
  std::vector<double> gm(N), thr(N);
  for (std::size_t n = 0; n < N; ++n) {
    const double x = axis_coord(g, Domain::Space, n);
    const double sg = (x > 0) - (x < 0);
    gm[n] = m * sg * std::pow(std::abs(x), m - 1.0);
    thr[n] = A * std::pow(std::abs(x), m - 2.0);
  }
  std::size_t best = 0;
  for (std::size_t k = 0; k < N; ++k) {
    const double xi = axis_coord(g, Domain::Frequency, k);
    std::size_t cnt = 0;
    for (std::size_t n = 0; n < N; ++n)
      if (std::abs(xi - gm[n]) <= thr[n]) ++cnt;
    best = std::max(best, cnt);
  }
  return static_cast<double>(best) * h;
}

}  // namespace phaselab
