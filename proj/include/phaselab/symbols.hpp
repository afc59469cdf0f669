#pragma once
// Dispersion symbols: evaluation and derivatives of homogeneous symbols of
// degree m, near-origin smoothing, homogeneity / non-degeneracy / cone
// diagnostics, and Fresnel field synthesis e^{2 pi i t mu(x)}.

#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "phaselab/core.hpp"
#include "phaselab/grid.hpp"
#include "phaselab/random.hpp"

namespace phaselab {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<double, 9>;  // row-major d x d block, d <= 3

inline double vec_norm(const Vec3& v, int d) {
  double s = 0;
  for (int a = 0; a < d; ++a) s += v[static_cast<std::size_t>(a)] * v[static_cast<std::size_t>(a)];
  return std::sqrt(s);
}

inline double vec_dot(const Vec3& u, const Vec3& v, int d) {
  double s = 0;
  for (int a = 0; a < d; ++a) s += u[static_cast<std::size_t>(a)] * v[static_cast<std::size_t>(a)];
  return s;
}

// Largest |eigenvalue| of a symmetric d x d matrix via cyclic Jacobi sweeps.
inline double sym_spectral_norm(Mat3 H, int d) {
  if (d == 1) return std::abs(H[0]);
  for (int sweep = 0; sweep < 30; ++sweep) {
    double off = 0;
    for (int p = 0; p < d; ++p)
      for (int q = p + 1; q < d; ++q) off += std::abs(H[static_cast<std::size_t>(p * 3 + q)]);
    if (off < 1e-14) break;
    for (int p = 0; p < d; ++p) {
      for (int q = p + 1; q < d; ++q) {
        const double apq = H[static_cast<std::size_t>(p * 3 + q)];
        if (std::abs(apq) < 1e-300) continue;
        const double app = H[static_cast<std::size_t>(p * 3 + p)];
        const double aqq = H[static_cast<std::size_t>(q * 3 + q)];
        const double theta = 0.5 * std::atan2(2 * apq, aqq - app);
        const double c = std::cos(theta), s = std::sin(theta);
        for (int k = 0; k < d; ++k) {
          const double hkp = H[static_cast<std::size_t>(k * 3 + p)];
          const double hkq = H[static_cast<std::size_t>(k * 3 + q)];
          H[static_cast<std::size_t>(k * 3 + p)] = c * hkp - s * hkq;
          H[static_cast<std::size_t>(k * 3 + q)] = s * hkp + c * hkq;
        }
        for (int k = 0; k < d; ++k) {
          const double hpk = H[static_cast<std::size_t>(p * 3 + k)];
          const double hqk = H[static_cast<std::size_t>(q * 3 + k)];
          H[static_cast<std::size_t>(p * 3 + k)] = c * hpk - s * hqk;
          H[static_cast<std::size_t>(q * 3 + k)] = s * hpk + c * hqk;
        }
      }
    }
  }
  double m = 0;
  for (int k = 0; k < d; ++k) m = std::max(m, std::abs(H[static_cast<std::size_t>(k * 3 + k)]));
  return m;
}

inline double sym_det(const Mat3& H, int d) {
  if (d == 1) return H[0];
  if (d == 2) return H[0] * H[4] - H[1] * H[3];
  return H[0] * (H[4] * H[8] - H[5] * H[7]) - H[1] * (H[3] * H[8] - H[5] * H[6]) +
         H[2] * (H[3] * H[7] - H[4] * H[6]);
}

struct HomogeneousSymbol {
  enum class Kind { RadialPower, QuadraticForm, AnisotropicPower, Custom };

  Kind kind = Kind::RadialPower;
  int d = 1;
  double m = 2.0;
  Mat3 Q{0, 0, 0, 0, 0, 0, 0, 0, 0};          // QuadraticForm: mu = (1/2) Qx.x
  std::array<int, 3> signs{1, 1, 1};           // AnisotropicPower: eps_j
  std::function<double(const Vec3&)> profile;  // Custom: value on the unit sphere

  void validate() const {
    if (d < 1 || d > 3) throw ConfigError("symbol: dimension must be 1, 2 or 3");
    if (!(m > 0.0) || !std::isfinite(m))
      throw ConfigError("symbol: degree m must be positive (m >= 2 for solver use)");
    if (kind == Kind::QuadraticForm) {
      if (m != 2.0) throw ConfigError("symbol: QuadraticForm has degree m = 2");
      for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j)
          if (std::abs(Q[static_cast<std::size_t>(i * 3 + j)] - Q[static_cast<std::size_t>(j * 3 + i)]) > 1e-12)
            throw ConfigError("symbol: QuadraticForm matrix must be symmetric");
      Mat3 qq = Q;
      if (std::abs(sym_det(qq, d)) < 1e-12)
        throw ConfigError("symbol: QuadraticForm matrix must be invertible");
    }
    if (kind == Kind::AnisotropicPower) {
      if (std::abs(m - 2.0 * std::round(m / 2.0)) > 1e-12)
        throw ConfigError("symbol: AnisotropicPower requires even degree m");
      for (int a = 0; a < d; ++a)
        if (signs[static_cast<std::size_t>(a)] != 1 && signs[static_cast<std::size_t>(a)] != -1)
          throw ConfigError("symbol: AnisotropicPower signs must be +1 or -1");
    }
    if (kind == Kind::Custom && !profile)
      throw ConfigError("symbol: Custom kind requires a unit-sphere profile");
  }

  static HomogeneousSymbol radial_power(int d, double m) {
    HomogeneousSymbol s;
    s.kind = Kind::RadialPower;
    s.d = d;
    s.m = m;
    s.validate();
    return s;
  }
  static HomogeneousSymbol quadratic_form(int d, const Mat3& Q) {
    HomogeneousSymbol s;
    s.kind = Kind::QuadraticForm;
    s.d = d;
    s.m = 2.0;
    s.Q = Q;
    s.validate();
    return s;
  }
  static HomogeneousSymbol anisotropic_power(int d, double m, std::array<int, 3> signs) {
    HomogeneousSymbol s;
    s.kind = Kind::AnisotropicPower;
    s.d = d;
    s.m = m;
    s.signs = signs;
    s.validate();
    return s;
  }
  static HomogeneousSymbol custom(int d, double m, std::function<double(const Vec3&)> profile) {
    HomogeneousSymbol s;
    s.kind = Kind::Custom;
    s.d = d;
    s.m = m;
    s.profile = std::move(profile);
    s.validate();
    return s;
  }
};

namespace detail {

inline void require_nonzero(const HomogeneousSymbol& s, const Vec3& x) {
  if (vec_norm(x, s.d) == 0.0)
    throw ConfigError("symbol: homogeneous evaluation at x = 0 is undefined (use smoothing)");
}

inline double eval_custom(const HomogeneousSymbol& s, const Vec3& x) {
  const double r = vec_norm(x, s.d);
  Vec3 u{0, 0, 0};
  for (int a = 0; a < s.d; ++a) u[static_cast<std::size_t>(a)] = x[static_cast<std::size_t>(a)] / r;
  return std::pow(r, s.m) * s.profile(u);
}

}  // namespace detail

inline double eval_mu(const HomogeneousSymbol& s, const Vec3& x) {
  detail::require_nonzero(s, x);
  switch (s.kind) {
    case HomogeneousSymbol::Kind::RadialPower:
      return std::pow(vec_norm(x, s.d), s.m);
    case HomogeneousSymbol::Kind::QuadraticForm: {
      double acc = 0;
      for (int i = 0; i < s.d; ++i)
        for (int j = 0; j < s.d; ++j)
          acc += x[static_cast<std::size_t>(i)] * s.Q[static_cast<std::size_t>(i * 3 + j)] * x[static_cast<std::size_t>(j)];
      return 0.5 * acc;
    }
    case HomogeneousSymbol::Kind::AnisotropicPower: {
      double acc = 0;
      for (int a = 0; a < s.d; ++a)
        acc += s.signs[static_cast<std::size_t>(a)] * std::pow(std::abs(x[static_cast<std::size_t>(a)]), s.m);
      return acc;
    }
    case HomogeneousSymbol::Kind::Custom:
      return detail::eval_custom(s, x);
  }
  throw ConfigError("symbol: unknown kind");
}

inline Vec3 eval_grad(const HomogeneousSymbol& s, const Vec3& x) {
  detail::require_nonzero(s, x);
  Vec3 g{0, 0, 0};
  switch (s.kind) {
    case HomogeneousSymbol::Kind::RadialPower: {
      const double r = vec_norm(x, s.d);
      const double c = s.m * std::pow(r, s.m - 2.0);
      for (int a = 0; a < s.d; ++a) g[static_cast<std::size_t>(a)] = c * x[static_cast<std::size_t>(a)];
      return g;
    }
    case HomogeneousSymbol::Kind::QuadraticForm: {
      for (int i = 0; i < s.d; ++i) {
        double acc = 0;
        for (int j = 0; j < s.d; ++j) acc += s.Q[static_cast<std::size_t>(i * 3 + j)] * x[static_cast<std::size_t>(j)];
        g[static_cast<std::size_t>(i)] = acc;
      }
      return g;
    }
    case HomogeneousSymbol::Kind::AnisotropicPower: {
      for (int a = 0; a < s.d; ++a) {
        const double xa = x[static_cast<std::size_t>(a)];
        const double sg = (xa > 0) - (xa < 0);
        g[static_cast<std::size_t>(a)] =
            s.signs[static_cast<std::size_t>(a)] * s.m * sg * std::pow(std::abs(xa), s.m - 1.0);
      }
      return g;
    }
    case HomogeneousSymbol::Kind::Custom: {
      // Central differences with one Richardson step: (4 D(e/2) - D(e)) / 3.
      const double e = 1e-5 * std::max(1.0, vec_norm(x, s.d));
      for (int a = 0; a < s.d; ++a) {
        Vec3 xp = x, xm = x;
        auto diff = [&](double step) {
          xp[static_cast<std::size_t>(a)] = x[static_cast<std::size_t>(a)] + step;
          xm[static_cast<std::size_t>(a)] = x[static_cast<std::size_t>(a)] - step;
          return (detail::eval_custom(s, xp) - detail::eval_custom(s, xm)) / (2 * step);
        };
        const double d1 = diff(e), d2 = diff(e / 2);
        g[static_cast<std::size_t>(a)] = (4 * d2 - d1) / 3;
      }
      return g;
    }
  }
  throw ConfigError("symbol: unknown kind");
}

inline Mat3 eval_hess(const HomogeneousSymbol& s, const Vec3& x) {
  detail::require_nonzero(s, x);
  Mat3 H{0, 0, 0, 0, 0, 0, 0, 0, 0};
  switch (s.kind) {
    case HomogeneousSymbol::Kind::RadialPower: {
      const double r = vec_norm(x, s.d);
      const double c1 = s.m * std::pow(r, s.m - 2.0);
      const double c2 = s.m * (s.m - 2.0) * std::pow(r, s.m - 4.0);
      for (int i = 0; i < s.d; ++i)
        for (int j = 0; j < s.d; ++j)
          H[static_cast<std::size_t>(i * 3 + j)] =
              (i == j ? c1 : 0.0) + c2 * x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(j)];
      return H;
    }
    case HomogeneousSymbol::Kind::QuadraticForm:
      return s.Q;
    case HomogeneousSymbol::Kind::AnisotropicPower: {
      for (int a = 0; a < s.d; ++a) {
        const double xa = x[static_cast<std::size_t>(a)];
        H[static_cast<std::size_t>(a * 3 + a)] =
            s.signs[static_cast<std::size_t>(a)] * s.m * (s.m - 1.0) * std::pow(std::abs(xa), s.m - 2.0);
      }
      return H;
    }
    case HomogeneousSymbol::Kind::Custom: {
      const double e = 1e-4 * std::max(1.0, vec_norm(x, s.d));
      auto f = [&](const Vec3& p) { return detail::eval_custom(s, p); };
      for (int i = 0; i < s.d; ++i) {
        Vec3 xp = x, xm = x;
        xp[static_cast<std::size_t>(i)] += e;
        xm[static_cast<std::size_t>(i)] -= e;
        H[static_cast<std::size_t>(i * 3 + i)] = (f(xp) - 2 * f(x) + f(xm)) / (e * e);
        for (int j = i + 1; j < s.d; ++j) {
          Vec3 pp = x, pm = x, mp = x, mm = x;
          pp[static_cast<std::size_t>(i)] += e; pp[static_cast<std::size_t>(j)] += e;
          pm[static_cast<std::size_t>(i)] += e; pm[static_cast<std::size_t>(j)] -= e;
          mp[static_cast<std::size_t>(i)] -= e; mp[static_cast<std::size_t>(j)] += e;
          mm[static_cast<std::size_t>(i)] -= e; mm[static_cast<std::size_t>(j)] -= e;
          const double v = (f(pp) - f(pm) - f(mp) + f(mm)) / (4 * e * e);
          H[static_cast<std::size_t>(i * 3 + j)] = v;
          H[static_cast<std::size_t>(j * 3 + i)] = v;
        }
      }
      return H;
    }
  }
  throw ConfigError("symbol: unknown kind");
}

// max_x |Hess(x) x - (m-1) grad(x)| / |grad(x)| over the sample set.
inline double check_euler_identity(const HomogeneousSymbol& s, const std::vector<Vec3>& samples) {
  if (samples.empty()) throw ConfigError("check_euler_identity: empty sample set");
  double worst = 0;
  for (const auto& x : samples) {
    const Mat3 H = eval_hess(s, x);
    const Vec3 g = eval_grad(s, x);
    Vec3 r{0, 0, 0};
    for (int i = 0; i < s.d; ++i) {
      double acc = 0;
      for (int j = 0; j < s.d; ++j) acc += H[static_cast<std::size_t>(i * 3 + j)] * x[static_cast<std::size_t>(j)];
      r[static_cast<std::size_t>(i)] = acc - (s.m - 1.0) * g[static_cast<std::size_t>(i)];
    }
    const double gn = vec_norm(g, s.d);
    if (gn > 0) worst = std::max(worst, vec_norm(r, s.d) / gn);
  }
  return worst;
}

// min_x |grad(x)| / |x|^{m-1} over the sample set.
inline double check_gradient_lower_bound(const HomogeneousSymbol& s, const std::vector<Vec3>& samples) {
  if (samples.empty()) throw ConfigError("check_gradient_lower_bound: empty sample set");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& x : samples) {
    const double r = vec_norm(x, s.d);
    best = std::min(best, vec_norm(eval_grad(s, x), s.d) / std::pow(r, s.m - 1.0));
  }
  return best;
}

// min |det Hess| over the sample set (non-degeneracy diagnostic).
inline double check_nondegeneracy(const HomogeneousSymbol& s, const std::vector<Vec3>& samples) {
  if (samples.empty()) throw ConfigError("check_nondegeneracy: empty sample set");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& x : samples) {
    Mat3 H = eval_hess(s, x);
    best = std::min(best, std::abs(sym_det(H, s.d)));
  }
  return best;
}

inline std::vector<Vec3> random_unit_vectors(int d, std::size_t count, SplitMix64& rng) {
  std::vector<Vec3> out;
  out.reserve(count);
  while (out.size() < count) {
    Vec3 v{0, 0, 0};
    double n2 = 0;
    for (int a = 0; a < d; ++a) {
      v[static_cast<std::size_t>(a)] = rng.normal();
      n2 += v[static_cast<std::size_t>(a)] * v[static_cast<std::size_t>(a)];
    }
    if (n2 < 1e-12) continue;
    const double n = std::sqrt(n2);
    for (int a = 0; a < d; ++a) v[static_cast<std::size_t>(a)] /= n;
    out.push_back(v);
  }
  return out;
}

struct ConeSampling {
  double r_min = 1e-2;
  double r_max = 1e2;
  bool merged_opposite = false;  // sample both the cone and its antipode
};

// min over sampled pairs x, y in the cone of
//   |grad(x) - grad(y)| / (|x-y| (|x|^{m-2} + |y|^{m-2})).
inline double cone_separation_ratio(const HomogeneousSymbol& s, const Vec3& cone_axis,
                                    double half_angle, std::size_t pair_samples,
                                    std::uint64_t seed = 1,
                                    const ConeSampling& opt = ConeSampling{}) {
  s.validate();
  if (!(half_angle > 0) || half_angle >= M_PI / 2)
    throw ConfigError("cone_separation_ratio: half_angle must lie in (0, pi/2)");
  const double an = vec_norm(cone_axis, s.d);
  if (an == 0) throw ConfigError("cone_separation_ratio: zero cone axis");
  Vec3 e{0, 0, 0};
  for (int a = 0; a < s.d; ++a) e[static_cast<std::size_t>(a)] = cone_axis[static_cast<std::size_t>(a)] / an;

  // Orthonormal frame completing the axis (d <= 3).
  Vec3 u1{0, 0, 0}, u2{0, 0, 0};
  if (s.d >= 2) {
    Vec3 t{1, 0, 0};
    if (std::abs(e[0]) > 0.9) t = Vec3{0, 1, 0};
    // u1 = normalize(t - (t.e) e)
    const double te = vec_dot(t, e, s.d);
    double n2 = 0;
    for (int a = 0; a < s.d; ++a) {
      u1[static_cast<std::size_t>(a)] = t[static_cast<std::size_t>(a)] - te * e[static_cast<std::size_t>(a)];
      n2 += u1[static_cast<std::size_t>(a)] * u1[static_cast<std::size_t>(a)];
    }
    for (int a = 0; a < s.d; ++a) u1[static_cast<std::size_t>(a)] /= std::sqrt(n2);
  }
  if (s.d == 3) {
    u2[0] = e[1] * u1[2] - e[2] * u1[1];
    u2[1] = e[2] * u1[0] - e[0] * u1[2];
    u2[2] = e[0] * u1[1] - e[1] * u1[0];
  }

  SplitMix64 rng(seed);
  auto draw_point = [&]() {
    // Direction uniform in the spherical cap of half-angle around the axis.
    double ca = 1.0;
    double phi = 0.0;
    if (s.d == 2) {
      ca = std::cos(half_angle * (2 * rng.uniform() - 1));
      phi = (rng.uniform() < 0.5) ? 0.0 : M_PI;  // which side of the axis
    } else if (s.d == 3) {
      ca = 1 - rng.uniform() * (1 - std::cos(half_angle));
      phi = 2 * M_PI * rng.uniform();
    }
    const double sa = std::sqrt(std::max(0.0, 1 - ca * ca));
    const double r = opt.r_min * std::pow(opt.r_max / opt.r_min, rng.uniform());
    const double flip = (opt.merged_opposite && rng.uniform() < 0.5) ? -1.0 : 1.0;
    Vec3 x{0, 0, 0};
    for (int a = 0; a < s.d; ++a) {
      double dir = ca * e[static_cast<std::size_t>(a)];
      if (s.d >= 2) dir += sa * std::cos(phi) * u1[static_cast<std::size_t>(a)];
      if (s.d == 3) dir += sa * std::sin(phi) * u2[static_cast<std::size_t>(a)];
      x[static_cast<std::size_t>(a)] = flip * r * dir;
    }
    return x;
  };

  double best = std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  for (std::size_t i = 0; i < pair_samples; ++i) {
    const Vec3 x = draw_point();
    const Vec3 y = draw_point();
    Vec3 dxy{0, 0, 0};
    for (int a = 0; a < s.d; ++a)
      dxy[static_cast<std::size_t>(a)] = x[static_cast<std::size_t>(a)] - y[static_cast<std::size_t>(a)];
    const double sep = vec_norm(dxy, s.d);
    const double rx = vec_norm(x, s.d), ry = vec_norm(y, s.d);
    if (sep < 1e-12 * (rx + ry)) continue;  // degenerate pair
    const Vec3 gx = eval_grad(s, x), gy = eval_grad(s, y);
    Vec3 dg{0, 0, 0};
    for (int a = 0; a < s.d; ++a)
      dg[static_cast<std::size_t>(a)] = gx[static_cast<std::size_t>(a)] - gy[static_cast<std::size_t>(a)];
    const double den = sep * (std::pow(rx, s.m - 2.0) + std::pow(ry, s.m - 2.0));
    if (den == 0) continue;
    best = std::min(best, vec_norm(dg, s.d) / den);
    ++used;
  }
  if (used == 0) throw ConfigError("cone_separation_ratio: all sampled pairs degenerate");
  return best;
}

// ---------------------------------------------------------------------------
// Near-origin smoothing: mu~ = chi q + (1 - chi) mu with q(x) = c_mu |x|^2,
// c_mu the sphere average of mu, and chi(x) = B(2|x|/rho) where B is the
// plateau-glued bump: B(s) = 1 for s <= 1, exp(1 - 1/(1-(s-1)^2)) on (1,2),
// 0 for s >= 2.  Then mu~ = mu exactly on |x| >= rho (rho <= 1).

namespace detail {

inline double bump_B(double s) {
  if (s <= 1.0) return 1.0;
  if (s >= 2.0) return 0.0;
  const double w = (s - 1.0) * (s - 1.0);
  return std::exp(1.0 - 1.0 / (1.0 - w));
}

inline double bump_B1(double s) {  // dB/ds
  if (s <= 1.0 || s >= 2.0) return 0.0;
  const double u = s - 1.0;
  const double w = u * u;
  const double g1 = -2.0 * u / ((1.0 - w) * (1.0 - w));
  return bump_B(s) * g1;
}

inline double bump_B2(double s) {  // d2B/ds2
  if (s <= 1.0 || s >= 2.0) return 0.0;
  const double u = s - 1.0;
  const double w = u * u;
  const double iw = 1.0 / (1.0 - w);
  const double g1 = -2.0 * u * iw * iw;
  const double g2 = -2.0 * iw * iw - 8.0 * w * iw * iw * iw;
  return bump_B(s) * (g2 + g1 * g1);
}

}  // namespace detail

struct SmoothedSymbol {
  HomogeneousSymbol base;
  double cutoff_radius = 1.0;  // rho in (0, 1]
  double c_mu = 1.0;           // sphere average of mu (coefficient of q)

  void validate() const {
    base.validate();
    if (!(cutoff_radius > 0.0) || cutoff_radius > 1.0)
      throw ConfigError("smoothed symbol: cutoff radius must lie in (0, 1]");
  }

  static SmoothedSymbol make(const HomogeneousSymbol& base, double rho = 1.0) {
    SmoothedSymbol s;
    s.base = base;
    s.cutoff_radius = rho;
    s.validate();
    // Sphere average of mu: exact endpoints for d=1, uniform quadrature else.
    if (base.d == 1) {
      s.c_mu = 0.5 * (eval_mu(base, Vec3{1, 0, 0}) + eval_mu(base, Vec3{-1, 0, 0}));
    } else if (base.d == 2) {
      const int n = 720;
      double acc = 0;
      for (int i = 0; i < n; ++i) {
        const double th = 2 * M_PI * (i + 0.5) / n;
        acc += eval_mu(base, Vec3{std::cos(th), std::sin(th), 0});
      }
      s.c_mu = acc / n;
    } else {
      // Uniform-in-(cos(theta), phi) product rule on S^2.
      const int nt = 180, np = 360;
      double acc = 0;
      for (int i = 0; i < nt; ++i) {
        const double ct = -1.0 + 2.0 * (i + 0.5) / nt;
        const double st = std::sqrt(std::max(0.0, 1 - ct * ct));
        for (int j = 0; j < np; ++j) {
          const double ph = 2 * M_PI * (j + 0.5) / np;
          acc += eval_mu(base, Vec3{st * std::cos(ph), st * std::sin(ph), ct});
        }
      }
      s.c_mu = acc / (nt * np);
    }
    return s;
  }

  double chi(double r) const { return detail::bump_B(2.0 * r / cutoff_radius); }

  double mu(const Vec3& x) const {
    const double r = vec_norm(x, base.d);
    if (r >= cutoff_radius) return eval_mu(base, x);
    const double c = chi(r);
    const double q = c_mu * r * r;
    if (c >= 1.0) return q;  // plateau region includes the origin
    return c * q + (1.0 - c) * eval_mu(base, x);
  }

  Vec3 grad(const Vec3& x) const {
    const double r = vec_norm(x, base.d);
    if (r >= cutoff_radius) return eval_grad(base, x);
    Vec3 g{0, 0, 0};
    const double s = 2.0 * r / cutoff_radius;
    const double c = detail::bump_B(s);
    if (c >= 1.0) {
      for (int a = 0; a < base.d; ++a) g[static_cast<std::size_t>(a)] = 2.0 * c_mu * x[static_cast<std::size_t>(a)];
      return g;
    }
    const double q = c_mu * r * r;
    const double muv = eval_mu(base, x);
    const Vec3 gm = eval_grad(base, x);
    const double B1 = detail::bump_B1(s) * (2.0 / cutoff_radius);  // d chi / d r
    for (int a = 0; a < base.d; ++a) {
      const double xa = x[static_cast<std::size_t>(a)];
      g[static_cast<std::size_t>(a)] = c * 2.0 * c_mu * xa + (1.0 - c) * gm[static_cast<std::size_t>(a)] +
                                       B1 * (xa / r) * (q - muv);
    }
    return g;
  }

  Mat3 hess(const Vec3& x) const {
    const double r = vec_norm(x, base.d);
    if (r >= cutoff_radius) return eval_hess(base, x);
    Mat3 H{0, 0, 0, 0, 0, 0, 0, 0, 0};
    const double s = 2.0 * r / cutoff_radius;
    const double c = detail::bump_B(s);
    if (c >= 1.0) {
      for (int a = 0; a < base.d; ++a) H[static_cast<std::size_t>(a * 3 + a)] = 2.0 * c_mu;
      return H;
    }
    const double q = c_mu * r * r;
    const double muv = eval_mu(base, x);
    const Vec3 gm = eval_grad(base, x);
    const Mat3 Hm = eval_hess(base, x);
    const double k = 2.0 / cutoff_radius;
    const double B1 = detail::bump_B1(s) * k;        // d chi / d r
    const double B2 = detail::bump_B2(s) * k * k;    // d2 chi / d r2
    for (int i = 0; i < base.d; ++i) {
      const double xi = x[static_cast<std::size_t>(i)];
      for (int j = 0; j < base.d; ++j) {
        const double xj = x[static_cast<std::size_t>(j)];
        const double del = (i == j) ? 1.0 : 0.0;
        const double dq_i = 2.0 * c_mu * xi, dq_j = 2.0 * c_mu * xj;
        const double dm_i = gm[static_cast<std::size_t>(i)], dm_j = gm[static_cast<std::size_t>(j)];
        // chi'' term (radial):
        const double chi_ij = B2 * (xi * xj) / (r * r) + B1 * (del / r - xi * xj / (r * r * r));
        double v = chi_ij * (q - muv);
        v += B1 * (xi / r) * (dq_j - dm_j) + B1 * (xj / r) * (dq_i - dm_i);
        v += c * 2.0 * c_mu * del + (1.0 - c) * Hm[static_cast<std::size_t>(i * 3 + j)];
        H[static_cast<std::size_t>(i * 3 + j)] = v;
      }
    }
    return H;
  }
};

// sup over samples of <x>^{|alpha|-m} |d^alpha mu~(x)|, |alpha| <= 2.
inline double a_m_seminorm(const SmoothedSymbol& s, const std::array<int, 3>& alpha,
                           const std::vector<Vec3>& samples) {
  s.validate();
  if (samples.empty()) throw ConfigError("a_m_seminorm: empty sample set");
  int order = 0;
  for (int a = 0; a < 3; ++a) {
    if (alpha[static_cast<std::size_t>(a)] < 0)
      throw ConfigError("a_m_seminorm: multi-index entries must be nonnegative");
    if (a >= s.base.d && alpha[static_cast<std::size_t>(a)] != 0)
      throw ConfigError("a_m_seminorm: multi-index exceeds symbol dimension");
    order += alpha[static_cast<std::size_t>(a)];
  }
  if (order > 2)
    throw ConfigError("a_m_seminorm: only |alpha| <= 2 supported");
  double sup = 0;
  for (const auto& x : samples) {
    const double r = vec_norm(x, s.base.d);
    const double jap = std::pow(1.0 + r * r, 0.5 * (order - s.base.m));
    double val = 0;
    if (order == 0) {
      val = s.mu(x);
    } else if (order == 1) {
      const Vec3 g = s.grad(x);
      for (int a = 0; a < 3; ++a)
        if (alpha[static_cast<std::size_t>(a)] == 1) val = g[static_cast<std::size_t>(a)];
    } else {
      const Mat3 H = s.hess(x);
      int i = -1, j = -1;
      for (int a = 0; a < 3; ++a) {
        if (alpha[static_cast<std::size_t>(a)] == 2) { i = a; j = a; }
        if (alpha[static_cast<std::size_t>(a)] == 1) { (i < 0 ? i : j) = a; }
      }
      val = H[static_cast<std::size_t>(i * 3 + j)];
    }
    sup = std::max(sup, jap * std::abs(val));
  }
  return sup;
}

// Region-constant calibration A = 2 max_{|x|=1, |z|<=1} ||Hess mu~(x+z)||.
inline double calibrate_A(const SmoothedSymbol& s, std::size_t samples = 4000,
                          std::uint64_t seed = 7) {
  SplitMix64 rng(seed);
  double worst = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    Vec3 x{0, 0, 0};
    if (s.base.d == 1) {
      x[0] = (rng.uniform() < 0.5) ? 1.0 : -1.0;
    } else {
      auto u = random_unit_vectors(s.base.d, 1, rng);
      x = u[0];
    }
    // z uniform in the unit ball
    Vec3 z{0, 0, 0};
    do {
      double n2 = 0;
      for (int a = 0; a < s.base.d; ++a) {
        z[static_cast<std::size_t>(a)] = 2 * rng.uniform() - 1;
        n2 += z[static_cast<std::size_t>(a)] * z[static_cast<std::size_t>(a)];
      }
      if (n2 <= 1.0) break;
    } while (true);
    Vec3 p{0, 0, 0};
    for (int a = 0; a < s.base.d; ++a)
      p[static_cast<std::size_t>(a)] = x[static_cast<std::size_t>(a)] + z[static_cast<std::size_t>(a)];
    Mat3 H = s.hess(p);
    worst = std::max(worst, sym_spectral_norm(H, s.base.d));
  }
  return 2.0 * worst;
}

// ---------------------------------------------------------------------------
// Fresnel fields e^{2 pi i t mu(x)} with a Nyquist aliasing diagnostic.

struct FresnelResult {
  SampledField field;
  double aliased_fraction = 0.0;  // share of grid points with |t grad mu| > N/(2L)
  bool alias_flag = false;        // true when that share exceeds 1%
};

namespace detail {

template <typename MuFn, typename GradFn>
FresnelResult fresnel_field_impl(const GridSpec& grid, double t, MuFn&& mu, GradFn&& grad) {
  if (!(t > 0)) throw ConfigError("fresnel_field: t must be positive");
  FresnelResult out;
  out.field = make_field(grid, Domain::Space);
  const double nyquist = static_cast<double>(grid.N) / (2.0 * grid.L);
  std::size_t aliased = 0;
  const std::size_t n = out.field.values.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 x = grid_point(grid, Domain::Space, i);
    const double r = vec_norm(x, grid.d);
    if (r == 0.0) {
      out.field.values[i] = 1.0;  // mu homogeneous: mu(0)=0 in the limit
      continue;
    }
    const double phase = 2.0 * M_PI * t * mu(x);
    out.field.values[i] = cplx(std::cos(phase), std::sin(phase));
    if (t * vec_norm(grad(x), grid.d) > nyquist) ++aliased;
  }
  out.aliased_fraction = static_cast<double>(aliased) / static_cast<double>(n);
  out.alias_flag = out.aliased_fraction > 0.01;
  return out;
}

}  // namespace detail

inline FresnelResult fresnel_field(const HomogeneousSymbol& s, const GridSpec& grid, double t) {
  s.validate();
  grid.validate();
  if (grid.d != s.d) throw ConfigError("fresnel_field: grid and symbol dimensions differ");
  return detail::fresnel_field_impl(
      grid, t, [&](const Vec3& x) { return eval_mu(s, x); },
      [&](const Vec3& x) { return eval_grad(s, x); });
}

inline FresnelResult fresnel_field(const SmoothedSymbol& s, const GridSpec& grid, double t) {
  s.validate();
  grid.validate();
  if (grid.d != s.base.d) throw ConfigError("fresnel_field: grid and symbol dimensions differ");
  return detail::fresnel_field_impl(
      grid, t, [&](const Vec3& x) { return s.mu(x); },
      [&](const Vec3& x) { return s.grad(x); });
}

}  // namespace phaselab
