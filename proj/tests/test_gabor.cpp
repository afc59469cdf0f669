#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "phaselab/gabor.hpp"
#include "phaselab/symbols.hpp"
#include "support/common.hpp"

using namespace phaselab;
using phaselab::testing::gaussian_datum;

TEST_CASE("fft slices reproduce the direct windowed sums", "[gabor]") {
  GridSpec g{1, 128, 8.0};
  SampledField f = make_field(g, Domain::Space);
  SplitMix64 rng{21};
  for (auto& v : f.values) v = rng.cnormal();
  const Window win = Window::gaussian(0.8);

  PhaseSpacePortrait P = stft(f, win, 16);
  REQUIRE(P.n_slices() == 8);
  for (std::size_t j = 0; j < P.n_slices(); j += 3) {
    std::vector<cplx> direct = stft_direct_oracle(f, win, P.slice_flat[j]);
    const double* row = P.slice(j);
    double mx = 0;
    for (std::size_t k = 0; k < g.size(); ++k)
      mx = std::max(mx, std::abs(row[k] - std::abs(direct[k])));
    CHECK(mx < 1e-12);
  }
}

TEST_CASE("position-list portraits agree with the stride lattice", "[gabor]") {
  GridSpec g{1, 256, 8.0};
  SampledField f = gaussian_datum(g, 1.0, 1.0, 0.5, 2.0);
  const Window win = Window::gaussian(1.0);
  PhaseSpacePortrait A = stft(f, win, 32);
  PhaseSpacePortrait B = stft_at_positions(f, win, A.slice_flat, A.dx_cell);
  REQUIRE(A.n_slices() == B.n_slices());
  double mx = 0;
  for (std::size_t i = 0; i < A.mags.size(); ++i)
    mx = std::max(mx, std::abs(A.mags[i] - B.mags[i]));
  CHECK(mx == 0.0);
  CHECK(modulation_norm(A, 1.0, kInf) == Catch::Approx(modulation_norm(B, 1.0, kInf)));
}

TEST_CASE("mixed norms integrate in the stated order", "[gabor]") {
  // two slices with disjoint single-bin spectra: hand-computable norms
  GridSpec g{1, 4, 2.0};
  PhaseSpacePortrait P;
  P.grid = g;
  P.window = Window::gaussian(1.0);
  P.window_l1 = 1.0;
  P.slice_flat = {0, 2};
  P.dx_cell = 1.0;                      // two cells of length 1
  P.mags = {3, 0, 0, 0, 0, 1, 0, 0};    // slice 0: one bin 3; slice 1: one bin 1
  const double dxi = 1.0 / g.L;         // 0.5

  // M^{1,inf}: sup over x of the xi-integral -> max(3, 1) * dxi
  CHECK(modulation_norm(P, 1.0, kInf) == Catch::Approx(3 * dxi));
  // W^{1,inf} swaps the order: xi-sup of the x-integral of per-cell values
  CHECK(amalgam_norm(P, 1.0, kInf) == Catch::Approx((3 + 1) * dxi));
  // p = q: both orders coincide
  CHECK(modulation_norm(P, 2.0, 2.0) == Catch::Approx(amalgam_norm(P, 2.0, 2.0)));
  CHECK_THROWS_AS(modulation_norm(P, 0.5, 1.0), ConfigError);
}

TEST_CASE("window swap changes the portrait by a bounded factor", "[gabor]") {
  GridSpec g{1, 256, 8.0};
  SampledField f = gaussian_datum(g, 0.9);
  const double r =
      window_swap_equivalence(f, Window::gaussian(1.0), Window::gaussian(0.5), 1.0, kInf, 32);
  CHECK(r > 0.1);
  CHECK(r < 10.0);
}

TEST_CASE("slice scan exposes the chirp ridge geometry", "[gabor]") {
  // F_mu for m = 2: instantaneous frequency 2x, slice integrals x-flat
  auto sym = HomogeneousSymbol::radial_power(1, 2.0);
  GridSpec g{1, 1024, 8.0};
  FresnelResult F = fresnel_field(sym, g, 1.0);
  REQUIRE_FALSE(F.alias_flag);
  SliceScan1D sc = scan_slices_1d(F.field, Window::bump(1.0), 16, {1.0});
  REQUIRE(sc.xs.size() == 16);
  // ridge position: per-slice sup should sit near xi = 2 x for interior slices
  double worst = 0;
  for (std::size_t j = 0; j < sc.xs.size(); ++j) {
    if (std::abs(sc.xs[j]) > 2.0) continue;  // keep the window clear of the wrap seam
    worst = std::max(worst, std::abs(sc.slice_integral[j] / sc.slice_integral[8] - 1.0));
  }
  CHECK(worst < 0.1);
  CHECK(sc.w1inf() > 0.0);
  CHECK(sc.winf1() > sc.w1inf());  // box-growing vs bounded norm on the chirp
  CHECK(sc.mpinf.size() == 1);
}

TEST_CASE("alias-free ladders keep the modulation estimate stable", "[gabor]") {
  const Window win = Window::bump(1.0);
  LadderPoint a = ladder_point(2.0, 8.0, win);
  LadderPoint b = ladder_point(2.0, 16.0, win);
  CHECK(a.N_used >= alias_free_N(2.0, 8.0));
  CHECK(std::abs(b.m1inf - a.m1inf) / a.m1inf < 0.05);

  LadderPoint c = ladder_point(3.0, 8.0, win);
  LadderPoint d = ladder_point(3.0, 16.0, win);
  CHECK(std::abs(d.m1inf - c.m1inf) / c.m1inf < 0.05);

  // cubic ridge: slice integrals grow towards the box edge
  double lo = 0, hi = 0;
  for (std::size_t j = 0; j < d.xs.size(); ++j) {
    if (std::abs(d.xs[j] - 1.0) < 0.3) lo = d.slice_integral[j];
    if (std::abs(d.xs[j] - 5.0) < 0.3) hi = d.slice_integral[j];
  }
  CHECK(hi > 1.3 * lo);
}

TEST_CASE("off-ridge decay fit recovers a steep exponent for m = 2", "[gabor]") {
  auto sym = HomogeneousSymbol::radial_power(1, 2.0);
  SmoothedSymbol sm = SmoothedSymbol::make(sym, 1.0);
  GridSpec g{1, 8192, 16.0};
  FresnelResult F = fresnel_field(sm, g, 1.0);
  REQUIRE_FALSE(F.alias_flag);
  // interior slice centers, clear of the wrap seam where the instantaneous
  // frequency flips sign
  std::vector<std::size_t> centers;
  const std::size_t stride = 128;
  for (std::size_t i = 0; i < g.N; i += stride) {
    const double x = grid_point(g, Domain::Space, i)[0];
    if (std::abs(x) <= 5.5) centers.push_back(i);
  }
  PhaseSpacePortrait P =
      stft_at_positions(F.field, Window::bump(1.0), centers, static_cast<double>(stride) * g.h());
  DecayFit fit = decay_exponent_fit(P, sm, 4.0);
  CHECK(fit.usable_points > 1000);
  CHECK(fit.fit.slope < -6.0);
  CHECK(fit.fit.slope == Catch::Approx(-7.98).margin(0.35));
}

TEST_CASE("decay fit refuses starved regions", "[gabor]") {
  auto sym = HomogeneousSymbol::radial_power(1, 2.0);
  SmoothedSymbol sm = SmoothedSymbol::make(sym, 1.0);
  GridSpec g{1, 64, 4.0};
  SampledField f = make_field(g, Domain::Space);  // zero field: nothing above the floor
  PhaseSpacePortrait P = stft(f, Window::gaussian(1.0), 16);
  CHECK_THROWS_AS(decay_exponent_fit(P, sm, 4.0), QualityError);
}

TEST_CASE("sliced region measure stays bounded under extent doubling", "[gabor]") {
  const double a = omega2_sliced_measure_sup(2.0, 16.0, 8192, 4.0);
  const double b = omega2_sliced_measure_sup(2.0, 32.0, 16384, 4.0);
  CHECK(a > 0.0);
  CHECK(std::abs(b - a) / a < 0.05);
}
