#pragma once
// Seeded, platform-independent random streams. splitmix64 supplies uniform
// 64-bit words; normals come from Box-Muller so that byte-level determinism
// does not depend on the standard library's distribution internals.

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

namespace phaselab {

struct SplitMix64 {
  std::uint64_t state;
  explicit SplitMix64(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  // uniform in [0, 1)
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  // uniform in (0, 1] (safe for log)
  double uniform_pos() { return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53; }
  double normal() {
    const double u = uniform_pos();
    const double v = uniform();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * M_PI * v);
  }
  std::complex<double> cnormal() {
    const double u = uniform_pos();
    const double v = uniform();
    const double r = std::sqrt(-std::log(u));
    return {r * std::cos(2.0 * M_PI * v), r * std::sin(2.0 * M_PI * v)};
  }
  // derive an independent stream for a labelled subtask
  SplitMix64 fork(std::uint64_t label) {
    SplitMix64 s(state ^ (0x632be59bd9b4e019ull * (label + 1)));
    s.next();
    return s;
  }
};

}  // namespace phaselab
