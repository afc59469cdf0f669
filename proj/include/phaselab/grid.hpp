#pragma once
// Centered hypercubic grids, FFTW-backed centered Fourier transforms, and
// domain-weighted discrete Lebesgue norms.
//
// Conventions (d <= 3, N even, side length L, mesh h = L/N):
//   space nodes      x_n = (n - N/2) h        for n = 0..N-1 per axis
//   frequency nodes  xi_k = (k - N/2) / L     for k = 0..N-1 per axis
//   forward  : w = h^d      * shift(FFT(shift(u)))   ~  int e^{-2 pi i xi.x} u dx
//   inverse  : u = L^{-d}   * shift(BFFT(shift(w)))  ~  int e^{+2 pi i x.xi} w dxi
// where shift rotates every axis by N/2 (its own inverse for even N) and BFFT
// is the unnormalised backward DFT.

#include <fftw3.h>

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <map>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

#include "phaselab/core.hpp"

namespace phaselab {

using cplx = std::complex<double>;

enum class Domain { Space, Frequency };

inline const char* domain_name(Domain d) {
  return d == Domain::Space ? "space" : "frequency";
}

struct GridSpec {
  int d = 1;           // dimension, 1..3
  std::size_t N = 0;   // samples per axis, even
  double L = 0.0;      // physical side length, centered on the origin

  void validate() const {
    if (d < 1 || d > 3)
      throw ConfigError("grid: dimension must be 1, 2 or 3, got " +
                        std::to_string(d));
    if (N < 2 || (N % 2) != 0)
      throw ConfigError("grid: N must be even and >= 2, got " +
                        std::to_string(N));
    if (!(L > 0.0) || !std::isfinite(L))
      throw ConfigError("grid: L must be positive and finite");
  }

  double h() const { return L / static_cast<double>(N); }

  std::size_t size() const {
    std::size_t s = 1;
    for (int a = 0; a < d; ++a) s *= N;
    return s;
  }

  // Row-major strides, axis 0 slowest (matches FFTW's layout).
  std::size_t stride(int axis) const {
    std::size_t s = 1;
    for (int a = axis + 1; a < d; ++a) s *= N;
    return s;
  }

  bool operator==(const GridSpec& o) const {
    return d == o.d && N == o.N && L == o.L;
  }
  bool operator!=(const GridSpec& o) const { return !(*this == o); }
};

struct SampledField {
  GridSpec grid;
  Domain domain = Domain::Space;
  std::vector<cplx> values;

  void validate() const {
    grid.validate();
    if (values.size() != grid.size())
      throw ConfigError("field: value count " + std::to_string(values.size()) +
                        " does not match grid size " +
                        std::to_string(grid.size()));
  }
};

inline SampledField make_field(const GridSpec& grid, Domain domain) {
  grid.validate();
  SampledField f;
  f.grid = grid;
  f.domain = domain;
  f.values.assign(grid.size(), cplx(0.0, 0.0));
  return f;
}

inline void decode_index(const GridSpec& g, std::size_t flat,
                         std::array<std::size_t, 3>& idx) {
  for (int a = g.d - 1; a >= 0; --a) {
    idx[static_cast<std::size_t>(a)] = flat % g.N;
    flat /= g.N;
  }
}

inline std::size_t encode_index(const GridSpec& g,
                                const std::array<std::size_t, 3>& idx) {
  std::size_t flat = 0;
  for (int a = 0; a < g.d; ++a) flat = flat * g.N + idx[static_cast<std::size_t>(a)];
  return flat;
}

// Physical coordinates of a flat index; entries beyond g.d are zero.
inline std::array<double, 3> grid_point(const GridSpec& g, Domain domain,
                                        std::size_t flat) {
  std::array<std::size_t, 3> idx{0, 0, 0};
  decode_index(g, flat, idx);
  std::array<double, 3> x{0.0, 0.0, 0.0};
  const double half = static_cast<double>(g.N) / 2.0;
  for (int a = 0; a < g.d; ++a) {
    const double c = static_cast<double>(idx[static_cast<std::size_t>(a)]) - half;
    x[static_cast<std::size_t>(a)] =
        (domain == Domain::Space) ? c * g.h() : c / g.L;
  }
  return x;
}

inline double axis_coord(const GridSpec& g, Domain domain, std::size_t k) {
  const double c = static_cast<double>(k) - static_cast<double>(g.N) / 2.0;
  return (domain == Domain::Space) ? c * g.h() : c / g.L;
}

// Rotate every axis by N/2 in place.  For even N the map is an involution
// whose orbits are index pairs, so a single swap pass suffices.
inline void half_shift(const GridSpec& g, std::vector<cplx>& v) {
  const std::size_t half = g.N / 2;
  std::array<std::size_t, 3> idx{0, 0, 0};
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    decode_index(g, i, idx);
    std::size_t j = 0;
    for (int a = 0; a < g.d; ++a) {
      std::size_t m = idx[static_cast<std::size_t>(a)] + half;
      if (m >= g.N) m -= g.N;
      j = j * g.N + m;
    }
    if (i < j) std::swap(v[i], v[j]);
  }
}

namespace detail {

// Process-lifetime FFTW plan cache.  Plans are created in place with
// FFTW_ESTIMATE | FFTW_UNALIGNED so they are deterministic, reusable on any
// caller buffer via fftw_execute_dft, and independent of allocator alignment.
class FftEngine {
 public:
  static FftEngine& instance() {
    static FftEngine eng;
    return eng;
  }

  void execute(const GridSpec& g, int sign, cplx* data) {
    fftw_plan plan = acquire(g, sign);
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(data),
                     reinterpret_cast<fftw_complex*>(data));
  }

 private:
  fftw_plan acquire(const GridSpec& g, int sign) {
    const Key key{g.d, g.N, sign};
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    int dims[3] = {0, 0, 0};
    for (int a = 0; a < g.d; ++a) dims[a] = static_cast<int>(g.N);
    fftw_complex* scratch = static_cast<fftw_complex*>(
        fftw_malloc(sizeof(fftw_complex) * g.size()));
    if (scratch == nullptr) throw QualityError("fft: plan scratch allocation failed");
    fftw_plan plan = fftw_plan_dft(g.d, dims, scratch, scratch, sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(scratch);
    if (plan == nullptr) throw QualityError("fft: plan creation failed");
    plans_.emplace(key, plan);
    return plan;
  }

  using Key = std::tuple<int, std::size_t, int>;
  std::mutex mutex_;
  std::map<Key, fftw_plan> plans_;
};

}  // namespace detail

inline void forward_fourier_inplace(SampledField& f) {
  f.validate();
  if (f.domain != Domain::Space)
    throw ConfigError("forward_fourier: field is already in the frequency domain");
  half_shift(f.grid, f.values);
  detail::FftEngine::instance().execute(f.grid, FFTW_FORWARD, f.values.data());
  half_shift(f.grid, f.values);
  const double scale = std::pow(f.grid.h(), f.grid.d);
  for (auto& v : f.values) v *= scale;
  f.domain = Domain::Frequency;
}

inline void inverse_fourier_inplace(SampledField& f) {
  f.validate();
  if (f.domain != Domain::Frequency)
    throw ConfigError("inverse_fourier: field is already in the space domain");
  half_shift(f.grid, f.values);
  detail::FftEngine::instance().execute(f.grid, FFTW_BACKWARD, f.values.data());
  half_shift(f.grid, f.values);
  const double scale = std::pow(1.0 / f.grid.L, f.grid.d);
  for (auto& v : f.values) v *= scale;
  f.domain = Domain::Space;
}

inline SampledField forward_fourier(const SampledField& f) {
  SampledField out = f;
  forward_fourier_inplace(out);
  return out;
}

inline SampledField inverse_fourier(const SampledField& f) {
  SampledField out = f;
  inverse_fourier_inplace(out);
  return out;
}

// Discrete L^p norm with the quadrature weight of the field's domain:
// h^d in space, L^{-d} in frequency.  p = infinity gives the plain sup.
inline double lp_norm(const SampledField& f, double p) {
  f.validate();
  if (std::isinf(p)) {
    double m = 0.0;
    for (const auto& v : f.values) m = std::max(m, std::abs(v));
    return m;
  }
  if (!(p >= 1.0))
    throw ConfigError("lp_norm: p must satisfy p >= 1 or be infinite");
  const double w = (f.domain == Domain::Space)
                       ? std::pow(f.grid.h(), f.grid.d)
                       : std::pow(1.0 / f.grid.L, f.grid.d);
  long double acc = 0.0L;
  if (p == 1.0) {
    for (const auto& v : f.values) acc += std::abs(v);
  } else if (p == 2.0) {
    for (const auto& v : f.values) acc += static_cast<long double>(std::norm(v));
  } else {
    for (const auto& v : f.values) acc += std::pow(std::abs(v), p);
  }
  return std::pow(static_cast<double>(acc) * w, 1.0 / p);
}

inline double sup_norm(const SampledField& f) {
  return lp_norm(f, std::numeric_limits<double>::infinity());
}

}  // namespace phaselab
