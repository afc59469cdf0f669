#pragma once
// Duhamel-Picard contraction solver for i u_t = mu(D) u + V G(u):
// local step-size from the contraction constants, interaction-picture time
// quadrature with exact oscillatory panel moments on a uniform mesh, Picard
// iteration with measured contraction ratios, linear global continuation,
// and the low-regularity (p, q) mode.
//
// Interaction picture: vhat(t, xi) = e^{-2 pi i t mu(xi)} uhat(t, xi), so
//   vhat(t) = fhat + 2 pi i * int_0^t e^{i omega s} what(s) ds,
// omega = -2 pi mu, what(s) = FT(V(s) G(u(s))).  The s-integrand is smooth
// on the Fourier side (the singular endpoint weight lives only in the
// operator-norm estimate that fixes T), so a uniform mesh with a per-mode
// product rule exact for e^{i omega s} against piecewise-linear values gives
// clean second-order self-convergence.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "phaselab/core.hpp"
#include "phaselab/gabor.hpp"
#include "phaselab/grid.hpp"
#include "phaselab/parallel.hpp"
#include "phaselab/potentials.hpp"
#include "phaselab/propagator.hpp"
#include "phaselab/random.hpp"
#include "phaselab/symbols.hpp"
#include "phaselab/window.hpp"

namespace phaselab {

// ---------------------------------------------------------------------------
// Nonlinearity G with G(0) = 0.

struct SeriesTerm {
  int j = 0, l = 0;  // u^j * conj(u)^l
  cplx c{0, 0};
};

struct Nonlinearity {
  enum class Kind { Linear, PowerAbs, Power, Series };
  Kind kind = Kind::Linear;
  cplx lambda{1, 0};
  int k = 1;
  std::vector<SeriesTerm> terms;

  void validate() const {
    switch (kind) {
      case Kind::Linear:
        break;
      case Kind::PowerAbs:
      case Kind::Power:
        if (k < 1) throw ConfigError("nonlinearity: power index k must be >= 1");
        break;
      case Kind::Series:
        for (const auto& t : terms)
          if (t.j == 0 && t.l == 0 && std::abs(t.c) != 0)
            throw ConfigError("nonlinearity: series constant term violates G(0) = 0");
        break;
    }
  }
  bool is_linear() const { return kind == Kind::Linear; }

  cplx eval(cplx z) const {
    switch (kind) {
      case Kind::Linear:
        return z;
      case Kind::PowerAbs: {
        const double a2 = std::norm(z);
        double p = 1;
        for (int i = 0; i < k; ++i) p *= a2;
        return lambda * p * z;
      }
      case Kind::Power: {
        cplx p = z;
        for (int i = 1; i < k; ++i) p *= z;
        return lambda * p;
      }
      case Kind::Series: {
        cplx acc = 0;
        for (const auto& t : terms) {
          cplx p{1, 0};
          for (int i = 0; i < t.j; ++i) p *= z;
          const cplx zc = std::conj(z);
          for (int i = 0; i < t.l; ++i) p *= zc;
          acc += t.c * p;
        }
        return acc;
      }
    }
    return z;
  }
  void apply_inplace(std::vector<cplx>& u) const {
    if (kind == Kind::Linear) return;
    for (auto& v : u) v = eval(v);
  }

  static Nonlinearity linear() { return Nonlinearity{}; }
  static Nonlinearity power_abs(cplx lam, int kk) {
    Nonlinearity n;
    n.kind = Kind::PowerAbs;
    n.lambda = lam;
    n.k = kk;
    n.validate();
    return n;
  }
  static Nonlinearity power(cplx lam, int kk) {
    Nonlinearity n;
    n.kind = Kind::Power;
    n.lambda = lam;
    n.k = kk;
    n.validate();
    return n;
  }
  static Nonlinearity series(std::vector<SeriesTerm> ts) {
    Nonlinearity n;
    n.kind = Kind::Series;
    n.terms = std::move(ts);
    n.validate();
    return n;
  }
};

// Lipschitz constant of G on the ball of radius R in the windowed algebra
// with product constant A_W.
inline double lipschitz_constant_C_R(const Nonlinearity& nl, double R, double A_W = 1.0) {
  nl.validate();
  if (!(R > 0)) throw ConfigError("lipschitz_constant_C_R: R must be positive");
  switch (nl.kind) {
    case Nonlinearity::Kind::Linear:
      return 1.0;
    case Nonlinearity::Kind::PowerAbs:
      return std::abs(nl.lambda) * (2 * nl.k + 1) * std::pow(A_W * R, 2 * nl.k);
    case Nonlinearity::Kind::Power:
      return std::abs(nl.lambda) * nl.k * std::pow(A_W * R, nl.k - 1);
    case Nonlinearity::Kind::Series: {
      double acc = 0;
      for (const auto& t : nl.terms) {
        const int deg = t.j + t.l;
        if (deg == 0) continue;
        acc += std::abs(t.c) * deg * std::pow(A_W * R, deg - 1);
      }
      return acc;
    }
  }
  return 1.0;
}

// ---------------------------------------------------------------------------
// Configuration and trajectory types.

struct RegularityMode {
  bool low = false;
  double p = kInf;  // only used when low = true
  double q = 1.0;
  static RegularityMode standard() { return RegularityMode{}; }
  static RegularityMode low_regularity(double pp, double qq) {
    return RegularityMode{true, pp, qq};
  }
  double p_conj() const {  // p' with 1/p + 1/p' = 1
    if (std::isinf(p)) return 1.0;
    if (p == 1.0) return kInf;
    return p / (p - 1.0);
  }
};

struct SolverConfig {
  GridSpec grid;
  HomogeneousSymbol symbol;
  Potential potential;
  Nonlinearity nonlinearity;
  SampledField f;
  double R = 1.0;  // datum ball radius in discrete FL^1
  RegularityMode mode = RegularityMode::standard();
  std::size_t quad_nodes = 16384;
  double tol = 1e-10;
  int max_picard = 50;
  double t_max = 0.0;  // 0: single window of the formula step
  Window window = Window::gaussian(1.0);
  int threads = 1;
  // calibration reuse across repeated solves (0 = compute internally)
  double c_prime_hint = 0.0;
  double a_w_hint = 0.0;
  double v_bound_hint = 0.0;

  void validate() const {
    grid.validate();
    symbol.validate();
    potential.validate();
    nonlinearity.validate();
    f.validate();
    if (!(f.grid == grid)) throw ConfigError("solver: datum grid mismatch");
    if (f.domain != Domain::Space) throw ConfigError("solver: datum must be in space domain");
    if (!(R > 0)) throw ConfigError("solver: ball radius R must be positive");
    if (quad_nodes < 8) throw ConfigError("solver: need at least 8 quadrature nodes");
    if (!(tol > 0)) throw ConfigError("solver: tolerance must be positive");
    const double m = symbol.m;
    const double d = static_cast<double>(grid.d);
    if (!mode.low) {
      if (!(m > 2 * d))
        throw ConfigError(
            "solver: standard mode requires m > 2d; use the low_regularity mode instead");
    } else {
      if (!(mode.p >= 1.0) && !std::isinf(mode.p))
        throw ConfigError("solver: low_regularity p must be in [1, inf]");
      if (!(mode.q >= 1.0)) throw ConfigError("solver: low_regularity q must be >= 1");
      const double pc = mode.p_conj();
      if (!(m > 2 * d / pc))
        throw ConfigError("solver: low_regularity requires m > 2d/p' (failed: m = " +
                          std::to_string(m) + ", 2d/p' = " + std::to_string(2 * d / pc) + ")");
      if (!(mode.q <= pc + 1e-12))
        throw ConfigError("solver: low_regularity requires q <= p' (failed: q = " +
                          std::to_string(mode.q) + ", p' = " + std::to_string(pc) + ")");
    }
  }
};

struct WindowDiagnostics {
  double t0 = 0;           // window start time
  double step_T = 0;       // accepted step
  std::size_t nodes = 0;   // quadrature panels per window
  int picard_iters = 0;
  std::vector<double> diff_norms;  // successive-difference C0 FL^1 norms
  std::vector<double> ratios;      // diff_norms[i+1] / diff_norms[i]
  double residual = 0;             // post-hoc fixed-point residual
  double w_norm_end = 0;           // discrete W^{1,inf} (or W^{q,inf}) at window end
  double fl1_end = 0;              // discrete FL^1 at window end
  double fl1_max = 0;              // C0 FL^1 over the window nodes
  double node_doubling_delta = 0;  // quadrature self-estimate
  int t_halvings = 0;              // step halvings before acceptance
};

struct SolutionTrajectory {
  std::vector<double> times;         // window boundaries, times[0] = 0
  std::vector<SampledField> fields;  // space-domain u at the boundaries
  std::vector<WindowDiagnostics> windows;
};

// ---------------------------------------------------------------------------
// Norms and calibrations.

inline double envelope_sup(const Envelope& e) { return std::abs(e.amplitude); }

inline double fl1_norm_of(const std::vector<cplx>& vhat, const GridSpec& g) {
  long double acc = 0;
  for (const auto& v : vhat) acc += std::abs(v);
  return static_cast<double>(acc) * std::pow(1.0 / g.L, g.d);
}

// Discrete W^{q,inf} norm: sup over an x-slice lattice (physical step
// step_x) of the inner L^q frequency norm of the windowed transform.
inline double w_qinf_norm(const SampledField& u, const Window& window, double q,
                          double step_x = 0.5) {
  u.validate();
  window.validate();
  if (u.domain != Domain::Space) throw ConfigError("w_qinf_norm: field must be in space domain");
  if (!(q >= 1.0) && !std::isinf(q)) throw ConfigError("w_qinf_norm: q must be in [1, inf]");
  const GridSpec& g = u.grid;
  const std::size_t stride =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(step_x / g.h())));
  SampledField gs = sample_window(g, window);
  detail::check_window(gs);
  SampledField work = make_field(g, Domain::Space);
  const double dxi_cell = std::pow(1.0 / g.L, g.d);
  const std::size_t per_axis = (g.N + stride - 1) / stride;
  std::size_t total = 1;
  for (int a = 0; a < g.d; ++a) total *= per_axis;
  double best = 0;
  std::array<std::size_t, 3> idx{0, 0, 0};
  for (std::size_t j = 0; j < total; ++j) {
    std::size_t r = j;
    bool ok = true;
    for (int a = g.d - 1; a >= 0; --a) {
      idx[static_cast<std::size_t>(a)] = (r % per_axis) * stride;
      r /= per_axis;
      if (idx[static_cast<std::size_t>(a)] >= g.N) ok = false;
    }
    if (!ok) continue;
    detail::windowed_product(u, gs.values, encode_index(g, idx), work.values);
    work.domain = Domain::Space;
    forward_fourier_inplace(work);
    double inner;
    if (std::isinf(q)) {
      double mx = 0;
      for (const auto& v : work.values) mx = std::max(mx, std::abs(v));
      inner = mx;
    } else {
      long double acc = 0;
      for (const auto& v : work.values) acc += std::pow(static_cast<long double>(std::abs(v)), q);
      inner = static_cast<double>(std::pow(acc * dxi_cell, 1.0L / q));
    }
    best = std::max(best, inner);
  }
  return best;
}

// Step-size formula for the standard mode.
inline double local_step_T(double m, int d, double c_prime, double c_R, double v_bound) {
  if (!(m > 2.0 * d))
    throw ConfigError("local_step_T: requires m > 2d; use the low_regularity mode instead");
  if (!(c_prime > 0) || !(c_R > 0) || !(v_bound > 0))
    throw ConfigError("local_step_T: constants must be positive");
  const double base = (m - 2.0 * d) / (2.0 * m * c_prime * c_R * v_bound);
  if (base >= 1.0) return 1.0;
  return std::pow(base, m / (m - 2.0 * d));
}

// C' estimate: 2 x max over t in [1e-2, 1] of ||E(t)||_{W^{1,inf}} t^{2d/m},
// measured on alias-free per-t scan grids.
inline double estimate_C_prime(const HomogeneousSymbol& sym, const GridSpec& grid,
                               const Window& window) {
  sym.validate();
  std::vector<double> ts;
  for (int j = 0; j < 16; ++j) ts.push_back(std::pow(10.0, -2.0 + 2.0 * j / 15.0));
  GridPolicy policy;
  if (grid.d == 1)
    policy = band_policy_1d(sym.m, ts.back(), std::max<std::size_t>(grid.N, 2048));
  else if (grid.d == 2)
    policy = band_policy_2d(sym.m, ts.back(), std::max<std::size_t>(grid.N, 512));
  else
    throw ConfigError("estimate_C_prime: supported for d in {1,2}");
  DecayScanResult scan = dispersive_decay_scan(sym, window, ts, policy);
  if (scan.any_alias())
    throw QualityError("estimate_C_prime: dispersive scan aliased; refine the scan grid");
  const double a = 2.0 * grid.d / sym.m;
  double best = 0;
  for (std::size_t i = 0; i < ts.size(); ++i)
    best = std::max(best, scan.rows[i].norm * std::pow(ts[i], a));
  return 2.0 * best;
}

// Low-regularity analog: 2 x max over t of M^{p',inf}(E(t)) t^{2d/(m p')} on
// the solver grid itself (the discrete fixed point lives there; the wrapped
// kernel is the one the iteration actually applies).
inline double estimate_C_dprime(const HomogeneousSymbol& sym, const GridSpec& grid,
                                const Window& window, double p_conj) {
  sym.validate();
  grid.validate();
  const double a = 2.0 * grid.d / (sym.m * p_conj);
  const double step_x = grid.d == 3 ? 1.0 : 0.5;
  const int stride =
      std::max(1, static_cast<int>(std::floor(step_x / grid.h())));
  double best = 0;
  for (int j = 0; j < 16; ++j) {
    const double t = std::pow(10.0, -2.0 + 2.0 * j / 15.0);
    KernelResult E = fundamental_solution(sym, t, grid);
    PhaseSpacePortrait P = stft(E.field, window, stride);
    best = std::max(best, modulation_norm(P, p_conj, kInf) * std::pow(t, a));
  }
  return 2.0 * best;
}

// Algebra constant of the discrete W^{1,inf} product, maximized over seeded
// random smooth pairs (quarter-band random spectra).
inline double calibrate_A_W(const GridSpec& grid, const Window& window, std::uint64_t seed = 2026,
                            int pairs = 100) {
  grid.validate();
  SplitMix64 root(seed);
  const double band = static_cast<double>(grid.N) / (8.0 * grid.L);
  auto random_smooth = [&](SplitMix64& rng) {
    SampledField fh = make_field(grid, Domain::Frequency);
    for (std::size_t k = 0; k < fh.values.size(); ++k) {
      const Vec3 xi = grid_point(grid, Domain::Frequency, k);
      double r2 = 0;
      for (int a = 0; a < grid.d; ++a)
        r2 += xi[static_cast<std::size_t>(a)] * xi[static_cast<std::size_t>(a)];
      fh.values[k] = rng.cnormal() * std::exp(-r2 / (band * band));
    }
    inverse_fourier_inplace(fh);
    return fh;
  };
  double best = 0;
  for (int i = 0; i < pairs; ++i) {
    SplitMix64 rng = root.fork(static_cast<std::uint64_t>(i));
    SampledField u = random_smooth(rng);
    SampledField v = random_smooth(rng);
    SampledField uv = u;
    for (std::size_t k = 0; k < uv.values.size(); ++k) uv.values[k] *= v.values[k];
    const double nu = w_qinf_norm(u, window, 1.0);
    const double nv = w_qinf_norm(v, window, 1.0);
    const double nuv = w_qinf_norm(uv, window, 1.0);
    if (nu > 0 && nv > 0) best = std::max(best, nuv / (nu * nv));
  }
  if (!(best > 0)) throw QualityError("calibrate_A_W: degenerate samples");
  return best;
}

// ---------------------------------------------------------------------------
// Duhamel machinery.

namespace detail {

inline std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3e", x);
  return buf;
}

struct DuhamelContext {
  GridSpec grid;
  const Potential* pot = nullptr;
  const Nonlinearity* nl = nullptr;
  double t0 = 0;  // window start (envelope evaluation uses absolute time)
  double T = 0;   // window length
  std::size_t M = 0;  // panels; nodes 0..M
  int threads = 1;
  std::vector<double> mu;          // mu(xi_k)
  std::vector<cplx> wA, wB;        // product-rule weights on [0, dt]
  std::vector<cplx> osc;           // e^{+2 pi i t_i mu_k}, row-major (M+1) x size
  std::shared_ptr<const SampledField> vsp;  // periodized potential in space

  double node_time(std::size_t i) const { return t0 + T * static_cast<double>(i) / M; }

  void build(const GridSpec& g, const HomogeneousSymbol& sym, const Potential& p,
             const Nonlinearity& n, double start, double step, std::size_t panels, int thr) {
    grid = g;
    pot = &p;
    nl = &n;
    t0 = start;
    T = step;
    M = panels;
    threads = thr;
    const std::size_t sz = g.size();
    mu.resize(sz);
    for (std::size_t k = 0; k < sz; ++k) {
      const Vec3 xi = grid_point(g, Domain::Frequency, k);
      // homogeneous symbols vanish at the origin
      mu[k] = vec_norm(xi, g.d) > 0 ? eval_mu(sym, xi) : 0.0;
    }
    const double dt = T / static_cast<double>(M);
    wA.resize(sz);
    wB.resize(sz);
    for (std::size_t k = 0; k < sz; ++k) {
      const double om = -2.0 * M_PI * mu[k];
      const double th = om * dt;
      cplx M0, M1;
      if (std::abs(th) < 1e-3) {
        // series for int_0^dt s^p e^{i om s} ds
        M0 = dt * cplx(1.0 - th * th / 6.0 + th * th * th * th / 120.0,
                       th / 2.0 - th * th * th / 24.0);
        M1 = dt * dt *
             cplx(0.5 - th * th / 8.0 + th * th * th * th / 144.0,
                  th / 3.0 - th * th * th / 30.0);
      } else {
        const cplx io(0, om);
        const cplx e1 = std::exp(io * dt);
        M0 = (e1 - 1.0) / io;
        M1 = (dt * e1) / io - M0 / io;
      }
      wA[k] = M0 - M1 / dt;
      wB[k] = M1 / dt;
    }
    osc.resize((M + 1) * sz);
    parallel_for(M + 1, threads, [&](std::size_t i) {
      const double t = T * static_cast<double>(i) / M;  // phases use window-local time
      cplx* row = osc.data() + i * sz;
      for (std::size_t k = 0; k < sz; ++k)
        row[k] = std::exp(cplx(0, 2.0 * M_PI * t * mu[k]));
    });
    vsp = p.space_samples(g);
  }

  // what_i = FT(V(t_i) G(u(t_i))) from the interaction-picture node value.
  void source_at_node(std::size_t i, const std::vector<cplx>& v_i, SampledField& scratch,
                      std::vector<cplx>& out) const {
    const std::size_t sz = grid.size();
    const cplx* o = osc.data() + i * sz;
    scratch.values.resize(sz);
    for (std::size_t k = 0; k < sz; ++k) scratch.values[k] = o[k] * v_i[k];
    scratch.domain = Domain::Frequency;
    inverse_fourier_inplace(scratch);
    nl->apply_inplace(scratch.values);
    const cplx a = pot->envelope.at(node_time(i));
    for (std::size_t k = 0; k < sz; ++k) scratch.values[k] *= a * vsp->values[k];
    forward_fourier_inplace(scratch);
    out = scratch.values;
  }

  // One application of the Duhamel map: out_i = fhat + 2 pi i P_i with the
  // panel rule P_{i+1} = P_i + e^{i om t_i} (wA what_i + wB what_{i+1}).
  void apply_map(const std::vector<cplx>& fhat, const std::vector<std::vector<cplx>>& v,
                 std::vector<std::vector<cplx>>& out) const {
    const std::size_t sz = grid.size();
    std::vector<std::vector<cplx>> what(M + 1);
    parallel_for(M + 1, threads, [&](std::size_t i) {
      SampledField scratch = make_field(grid, Domain::Space);
      source_at_node(i, v[i], scratch, what[i]);
    });
    out.assign(M + 1, std::vector<cplx>());
    out[0] = fhat;
    std::vector<cplx> P(sz, cplx(0, 0));
    const cplx tpi(0, 2.0 * M_PI);
    for (std::size_t i = 0; i < M; ++i) {
      const cplx* o = osc.data() + i * sz;  // conj(osc) = e^{i om t_i}
      const std::vector<cplx>& w0 = what[i];
      const std::vector<cplx>& w1 = what[i + 1];
      out[i + 1].resize(sz);
      for (std::size_t k = 0; k < sz; ++k) {
        P[k] += std::conj(o[k]) * (wA[k] * w0[k] + wB[k] * w1[k]);
        out[i + 1][k] = fhat[k] + tpi * P[k];
      }
    }
  }
};

}  // namespace detail

// Public single application on an explicit trajectory window (interaction
// picture node values).
struct TrajectoryWindow {
  double t0 = 0;
  double T = 0;
  std::vector<cplx> fhat;                // window datum, frequency samples
  std::vector<std::vector<cplx>> vhat;   // node values, (M+1) rows
};

inline TrajectoryWindow duhamel_apply(const TrajectoryWindow& win, const SolverConfig& cfg) {
  cfg.validate();
  if (win.vhat.size() < 2) throw ConfigError("duhamel_apply: need at least 2 nodes");
  if (!(win.T > 0)) throw ConfigError("duhamel_apply: window length must be positive");
  const std::size_t M = win.vhat.size() - 1;
  detail::DuhamelContext C;
  C.build(cfg.grid, cfg.symbol, cfg.potential, cfg.nonlinearity, win.t0, win.T, M, cfg.threads);
  TrajectoryWindow out = win;
  C.apply_map(win.fhat, win.vhat, out.vhat);

  // quadrature self-estimate: first correction at M vs 2M panels
  detail::DuhamelContext C2;
  C2.build(cfg.grid, cfg.symbol, cfg.potential, cfg.nonlinearity, win.t0, win.T, 2 * M,
           cfg.threads);
  std::vector<std::vector<cplx>> free1(M + 1, win.fhat), free2(2 * M + 1, win.fhat);
  std::vector<std::vector<cplx>> corr1, corr2;
  C.apply_map(win.fhat, free1, corr1);
  C2.apply_map(win.fhat, free2, corr2);
  std::vector<cplx> diff(cfg.grid.size());
  for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = corr1[M][k] - corr2[2 * M][k];
  const double delta = fl1_norm_of(diff, cfg.grid);
  if (delta > 0.1 * cfg.tol)
    throw QualityError("duhamel_apply: node-doubling delta " + detail::sci(delta) +
                       " exceeds 0.1 x tolerance; increase quadrature nodes");
  return out;
}

// ---------------------------------------------------------------------------
// Picard iteration (one window), with step halving until the measured
// contraction is <= 0.6.

namespace detail {

enum class AttemptStatus { Converged, NonContraction, MaxIterations };

struct AttemptResult {
  AttemptStatus status = AttemptStatus::MaxIterations;
  std::vector<double> diff_norms, ratios;
  int iters = 0;
  double residual = 0;
  double fl1_max = 0;
  std::vector<std::vector<cplx>> v;  // converged node values (interaction picture)
};

inline AttemptResult picard_attempt(const DuhamelContext& C, const std::vector<cplx>& fhat,
                                    double tol, int max_iters) {
  AttemptResult res;
  const std::size_t M = C.M;
  std::vector<std::vector<cplx>> v(M + 1, fhat), next;
  std::vector<cplx> diff(C.grid.size());
  int consecutive_bad = 0;
  for (int it = 1; it <= max_iters; ++it) {
    C.apply_map(fhat, v, next);
    double d = 0;
    for (std::size_t i = 0; i <= M; ++i) {
      for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = next[i][k] - v[i][k];
      d = std::max(d, fl1_norm_of(diff, C.grid));
    }
    res.diff_norms.push_back(d);
    const std::size_t nd = res.diff_norms.size();
    if (nd >= 2 && res.diff_norms[nd - 2] > 0) {
      const double r = d / res.diff_norms[nd - 2];
      res.ratios.push_back(r);
      if (r > 0.9) {
        if (++consecutive_bad >= 2) {
          res.status = AttemptStatus::NonContraction;
          res.iters = it;
          v.swap(next);
          res.v = std::move(v);
          return res;
        }
      } else {
        consecutive_bad = 0;
      }
    }
    v.swap(next);
    if (d <= tol) {
      res.status = AttemptStatus::Converged;
      res.iters = it;
      break;
    }
    res.iters = it;
  }
  // post-hoc residual by one extra application
  if (res.status == AttemptStatus::Converged) {
    C.apply_map(fhat, v, next);
    double r = 0;
    for (std::size_t i = 0; i <= M; ++i) {
      for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = next[i][k] - v[i][k];
      r = std::max(r, fl1_norm_of(diff, C.grid));
    }
    res.residual = r;
  }
  for (std::size_t i = 0; i <= M; ++i)
    res.fl1_max = std::max(res.fl1_max, fl1_norm_of(v[i], C.grid));
  res.v = std::move(v);
  return res;
}

inline double worst_late_ratio(const std::vector<double>& ratios) {
  double w = 0;
  for (std::size_t i = 1; i < ratios.size(); ++i) w = std::max(w, ratios[i]);
  return w;
}

// Shared window driver: runs Picard on [t0, t0+T_target] with halving; the
// datum enters as exact frequency samples.
inline std::pair<std::vector<cplx>, WindowDiagnostics> solve_window(
    const SolverConfig& cfg, const std::vector<cplx>& fhat, double t0, double T_target,
    double w_diag_q) {
  WindowDiagnostics diag;
  diag.t0 = t0;
  double T = T_target;
  for (int halvings = 0; halvings <= 12; ++halvings) {
    DuhamelContext C;
    C.build(cfg.grid, cfg.symbol, cfg.potential, cfg.nonlinearity, t0, T, cfg.quad_nodes,
            cfg.threads);
    // quadrature self-estimate at this step
    {
      DuhamelContext C2;
      C2.build(cfg.grid, cfg.symbol, cfg.potential, cfg.nonlinearity, t0, T, 2 * cfg.quad_nodes,
               cfg.threads);
      std::vector<std::vector<cplx>> f1(cfg.quad_nodes + 1, fhat),
          f2(2 * cfg.quad_nodes + 1, fhat), c1, c2;
      C.apply_map(fhat, f1, c1);
      C2.apply_map(fhat, f2, c2);
      std::vector<cplx> diffv(cfg.grid.size());
      for (std::size_t k = 0; k < diffv.size(); ++k)
        diffv[k] = c1[cfg.quad_nodes][k] - c2[2 * cfg.quad_nodes][k];
      diag.node_doubling_delta = fl1_norm_of(diffv, cfg.grid);
      if (diag.node_doubling_delta > 0.1 * cfg.tol)
        throw QualityError("solver: node-doubling delta " + sci(diag.node_doubling_delta) +
                           " exceeds 0.1 x tolerance at window t0 = " + sci(t0) +
                           ", T = " + sci(T) + "; increase quadrature nodes");
    }
    AttemptResult att = picard_attempt(C, fhat, cfg.tol, cfg.max_picard);
    const double worst = worst_late_ratio(att.ratios);
    if (att.status == AttemptStatus::Converged && worst <= 0.6) {
      diag.step_T = T;
      diag.nodes = cfg.quad_nodes;
      diag.picard_iters = att.iters;
      diag.diff_norms = att.diff_norms;
      diag.ratios = att.ratios;
      diag.residual = att.residual;
      diag.fl1_max = att.fl1_max;
      diag.t_halvings = halvings;
      std::vector<cplx> vT = att.v.back();
      // back to the physical picture at the window end
      const std::size_t sz = cfg.grid.size();
      const cplx* o = C.osc.data() + C.M * sz;
      for (std::size_t k = 0; k < sz; ++k) vT[k] *= o[k];
      diag.fl1_end = fl1_norm_of(vT, cfg.grid);
      SampledField uT = make_field(cfg.grid, Domain::Frequency);
      uT.values = vT;
      inverse_fourier_inplace(uT);
      diag.w_norm_end = w_qinf_norm(uT, cfg.window, w_diag_q);
      return {std::move(vT), std::move(diag)};
    }
    T /= 2;
  }
  throw ContractionError(
      "solver: contraction not achieved after 12 step halvings; the window refuses to contract"
      " (try a smaller tolerance ball or a weaker potential)");
}

}  // namespace detail

// Contraction constants needed to size the window; exposed so repeated
// solves can reuse them.
struct ContractionConstants {
  double a_w = 1.0;
  double c_R = 1.0;
  double c_prime = 0.0;
  double v_bound = 0.0;
  double T_formula = 0.0;
};

inline ContractionConstants contraction_constants(const SolverConfig& cfg) {
  ContractionConstants out;
  out.a_w = cfg.nonlinearity.is_linear()
                ? 1.0
                : (cfg.a_w_hint > 0 ? cfg.a_w_hint : calibrate_A_W(cfg.grid, cfg.window));
  out.c_R = lipschitz_constant_C_R(cfg.nonlinearity, cfg.R, out.a_w);
  out.c_prime = cfg.c_prime_hint > 0 ? cfg.c_prime_hint
                                     : estimate_C_prime(cfg.symbol, cfg.grid, cfg.window);
  out.v_bound = cfg.v_bound_hint > 0
                    ? cfg.v_bound_hint
                    : envelope_sup(cfg.potential.envelope) *
                          amalgam_W_p1_estimate(cfg.potential, cfg.grid, cfg.window, kInf).norm;
  // a vanishing potential leaves the free equation: any step works
  out.T_formula = out.v_bound > 0
                      ? local_step_T(cfg.symbol.m, cfg.grid.d, out.c_prime, out.c_R, out.v_bound)
                      : 1.0;
  return out;
}

// One window [0, T] with the formula step (capped by t_max when set).
inline SolutionTrajectory picard_solve(const SolverConfig& cfg) {
  cfg.validate();
  SampledField fh = cfg.f;
  forward_fourier_inplace(fh);
  const double fl1_f = fl1_norm_of(fh.values, cfg.grid);
  if (fl1_f > cfg.R / 2 + 1e-12)
    throw ConfigError("picard_solve: datum lies outside the ball B_{R/2} in discrete FL^1");
  ContractionConstants cc = contraction_constants(cfg);
  double T = cc.T_formula;
  if (cfg.t_max > 0) T = std::min(T, cfg.t_max);
  auto [vT, diag] = detail::solve_window(cfg, fh.values, 0.0, T, 1.0);
  SolutionTrajectory traj;
  traj.times = {0.0, diag.step_T};
  traj.fields.push_back(cfg.f);
  SampledField uT = make_field(cfg.grid, Domain::Frequency);
  uT.values = vT;
  inverse_fourier_inplace(uT);
  traj.fields.push_back(std::move(uT));
  traj.windows.push_back(std::move(diag));
  return traj;
}

// Global continuation for the linear equation: windows of the formula step
// concatenated to t_max, each restarted from the previous endpoint.
inline SolutionTrajectory global_solve(const SolverConfig& cfg) {
  cfg.validate();
  if (!cfg.nonlinearity.is_linear())
    throw ConfigError(
        "global_solve: global continuation is only available for the linear equation; "
        "use picard_solve for one local window");
  if (!(cfg.t_max > 0)) throw ConfigError("global_solve: t_max must be positive");
  SampledField fh = cfg.f;
  forward_fourier_inplace(fh);
  ContractionConstants cc = contraction_constants(cfg);

  SolutionTrajectory traj;
  traj.times = {0.0};
  traj.fields.push_back(cfg.f);
  std::vector<cplx> cur = fh.values;
  double t0 = 0.0;
  double T_window = cc.T_formula;
  while (t0 < cfg.t_max - 1e-14) {
    const double T_target = std::min(T_window, cfg.t_max - t0);
    auto [vT, diag] = detail::solve_window(cfg, cur, t0, T_target, 1.0);
    T_window = std::min(T_window, diag.step_T >= T_target ? T_window : diag.step_T);
    t0 += diag.step_T;
    traj.times.push_back(t0);
    SampledField uT = make_field(cfg.grid, Domain::Frequency);
    uT.values = vT;
    inverse_fourier_inplace(uT);
    traj.fields.push_back(uT);
    traj.windows.push_back(std::move(diag));
    cur = vT;
    if (traj.windows.size() > 100000)
      throw QualityError("global_solve: window count exploded; step collapsed");
  }
  return traj;
}

// Low-regularity mode: step sized by the windowed bound
//   int_0^T s^{-2d/(m p')} ds * C'' * ||V||_{W^{p,1}} <= 1/2,
// trajectory tracked in discrete W^{q,inf}.  (p, q) = (inf, 1) degenerates
// to the standard mode and shares its code path verbatim.
inline SolutionTrajectory low_regularity_solve(const SolverConfig& cfg) {
  cfg.validate();
  if (!cfg.mode.low)
    throw ConfigError("low_regularity_solve: config is not in low_regularity mode");
  if (std::isinf(cfg.mode.p) && cfg.mode.q == 1.0) {
    SolverConfig std_cfg = cfg;
    std_cfg.mode = RegularityMode::standard();
    return cfg.t_max > 0 ? global_solve(std_cfg) : picard_solve(std_cfg);
  }
  if (!cfg.nonlinearity.is_linear())
    throw ConfigError("low_regularity_solve: the low-regularity theory covers the linear equation");
  const double pc = cfg.mode.p_conj();
  const double a = 2.0 * cfg.grid.d / (cfg.symbol.m * pc);
  if (!(a < 1.0))
    throw ConfigError("low_regularity_solve: requires m > 2d/p' (failed: exponent 2d/(m p') = " +
                      std::to_string(a) + " >= 1)");
  const double c_dd = cfg.c_prime_hint > 0
                          ? cfg.c_prime_hint
                          : estimate_C_dprime(cfg.symbol, cfg.grid, cfg.window, pc);
  const double v_b = cfg.v_bound_hint > 0
                         ? cfg.v_bound_hint
                         : envelope_sup(cfg.potential.envelope) *
                               amalgam_W_p1_estimate(cfg.potential, cfg.grid, cfg.window,
                                                     cfg.mode.p)
                                   .norm;
  // T^(1-a)/(1-a) * C'' * ||V|| <= 1/2
  double T_window = std::pow((1.0 - a) / (2.0 * c_dd * v_b), 1.0 / (1.0 - a));
  T_window = std::min(T_window, 1.0);

  SampledField fh = cfg.f;
  forward_fourier_inplace(fh);
  SolutionTrajectory traj;
  traj.times = {0.0};
  traj.fields.push_back(cfg.f);
  std::vector<cplx> cur = fh.values;
  double t0 = 0.0;
  const double horizon = cfg.t_max > 0 ? cfg.t_max : T_window;
  while (t0 < horizon - 1e-14) {
    const double T_target = std::min(T_window, horizon - t0);
    auto [vT, diag] = detail::solve_window(cfg, cur, t0, T_target, cfg.mode.q);
    t0 += diag.step_T;
    traj.times.push_back(t0);
    SampledField uT = make_field(cfg.grid, Domain::Frequency);
    uT.values = vT;
    inverse_fourier_inplace(uT);
    traj.fields.push_back(uT);
    traj.windows.push_back(std::move(diag));
    cur = vT;
    if (traj.windows.size() > 100000)
      throw QualityError("low_regularity_solve: window count exploded; step collapsed");
  }
  return traj;
}

}  // namespace phaselab
