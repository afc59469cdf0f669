#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "phaselab/grid.hpp"
#include "support/common.hpp"

using namespace phaselab;
using phaselab::testing::gaussian_datum;

TEST_CASE("grid spec validation and geometry", "[grid]") {
  GridSpec g{1, 64, 8.0};
  REQUIRE_NOTHROW(g.validate());
  REQUIRE(g.h() == Catch::Approx(0.125));
  REQUIRE(g.size() == 64);

  CHECK_THROWS_AS((GridSpec{1, 63, 8.0}.validate()), ConfigError);
  CHECK_THROWS_AS((GridSpec{0, 64, 8.0}.validate()), ConfigError);
  CHECK_THROWS_AS((GridSpec{1, 64, -1.0}.validate()), ConfigError);

  // the lattice is centered: first point -L/2, frequency step 1/L
  CHECK(grid_point(g, Domain::Space, 0)[0] == Catch::Approx(-4.0));
  CHECK(grid_point(g, Domain::Space, g.N / 2)[0] == Catch::Approx(0.0));
  CHECK(grid_point(g, Domain::Frequency, 0)[0] == Catch::Approx(-4.0));
  CHECK(grid_point(g, Domain::Frequency, 1)[0] -
            grid_point(g, Domain::Frequency, 0)[0] ==
        Catch::Approx(1.0 / g.L));

  GridSpec g2{2, 16, 4.0};
  std::array<std::size_t, 3> idx{3, 7, 0};
  CHECK(encode_index(g2, idx) == 3 * 16 + 7);
  std::array<std::size_t, 3> back{0, 0, 0};
  decode_index(g2, 3 * 16 + 7, back);
  CHECK(back[0] == 3);
  CHECK(back[1] == 7);
}

TEST_CASE("forward transform matches the direct exponential sum", "[grid]") {
  GridSpec g{1, 16, 4.0};
  SampledField f = make_field(g, Domain::Space);
  SplitMix64 rng{7};
  for (auto& v : f.values) v = rng.cnormal();

  SampledField F = forward_fourier(f);
  REQUIRE(F.domain == Domain::Frequency);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double xi = grid_point(g, Domain::Frequency, k)[0];
    cplx acc = 0;
    for (std::size_t n = 0; n < g.size(); ++n) {
      const double x = grid_point(g, Domain::Space, n)[0];
      acc += f.values[n] * std::exp(cplx(0, -2 * M_PI * xi * x));
    }
    acc *= g.h();
    CHECK(std::abs(F.values[k] - acc) < 1e-12);
  }
}

TEST_CASE("transform roundtrip is the identity", "[grid]") {
  for (int d : {1, 2}) {
    GridSpec g{d, 32, 6.0};
    SampledField f = make_field(g, Domain::Space);
    SplitMix64 rng{11};
    for (auto& v : f.values) v = rng.cnormal();
    SampledField back = inverse_fourier(forward_fourier(f));
    double mx = 0;
    for (std::size_t i = 0; i < g.size(); ++i)
      mx = std::max(mx, std::abs(back.values[i] - f.values[i]));
    CHECK(mx < 1e-13);
  }
}

TEST_CASE("standard gaussian is its own transform", "[grid]") {
  GridSpec g{1, 256, 16.0};
  SampledField f = gaussian_datum(g);  // exp(-pi x^2)
  SampledField F = forward_fourier(f);
  double mx = 0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double xi = grid_point(g, Domain::Frequency, k)[0];
    mx = std::max(mx, std::abs(F.values[k] - std::exp(-M_PI * xi * xi)));
  }
  CHECK(mx < 1e-14);

  GridSpec g2{2, 64, 12.0};
  SampledField f2 = gaussian_datum(g2);
  SampledField F2 = forward_fourier(f2);
  mx = 0;
  for (std::size_t k = 0; k < g2.size(); ++k) {
    const Vec3 xi = grid_point(g2, Domain::Frequency, k);
    mx = std::max(mx, std::abs(F2.values[k] - std::exp(-M_PI * (xi[0] * xi[0] + xi[1] * xi[1]))));
  }
  CHECK(mx < 1e-13);
}

TEST_CASE("parseval identity ties the norm weights together", "[grid]") {
  GridSpec g{2, 32, 5.0};
  SampledField f = make_field(g, Domain::Space);
  SplitMix64 rng{3};
  for (auto& v : f.values) v = rng.cnormal();
  SampledField F = forward_fourier(f);
  const double a = lp_norm(f, 2.0);
  const double b = lp_norm(F, 2.0);
  CHECK(a == Catch::Approx(b).epsilon(1e-12));
}

TEST_CASE("translation turns into modulation on the lattice", "[grid]") {
  GridSpec g{1, 128, 8.0};
  SampledField f = gaussian_datum(g, 0.7);
  // shift by 8 lattice cells = 0.5 physical
  const std::size_t s = 8;
  SampledField fs = make_field(g, Domain::Space);
  for (std::size_t n = 0; n < g.N; ++n) fs.values[(n + s) % g.N] = f.values[n];
  SampledField A = forward_fourier(fs);
  SampledField B = forward_fourier(f);
  const double a = static_cast<double>(s) * g.h();
  double mx = 0;
  for (std::size_t k = 0; k < g.N; ++k) {
    const double xi = grid_point(g, Domain::Frequency, k)[0];
    mx = std::max(mx, std::abs(A.values[k] - B.values[k] * std::exp(cplx(0, -2 * M_PI * a * xi))));
  }
  CHECK(mx < 1e-13);
}

TEST_CASE("lp norms carry the cell weights", "[grid]") {
  GridSpec g{1, 64, 4.0};
  SampledField f = make_field(g, Domain::Space);
  for (auto& v : f.values) v = cplx(1.0, 0.0);
  CHECK(lp_norm(f, 1.0) == Catch::Approx(4.0));              // h * N = L
  CHECK(lp_norm(f, 2.0) == Catch::Approx(2.0));              // sqrt(L)
  CHECK(sup_norm(f) == Catch::Approx(1.0));
  SampledField F = make_field(g, Domain::Frequency);
  for (auto& v : F.values) v = cplx(1.0, 0.0);
  CHECK(lp_norm(F, 1.0) == Catch::Approx(64.0 / 4.0));       // N / L
}
