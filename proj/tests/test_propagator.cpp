#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "phaselab/propagator.hpp"
#include "support/common.hpp"

using namespace phaselab;
using phaselab::testing::gaussian_datum;

TEST_CASE("free evolution conserves the l2 mass", "[propagator]") {
  for (double m : {2.0, 3.0}) {
    GridSpec g{1, 1024, 32.0};
    auto sym = HomogeneousSymbol::radial_power(1, m);
    auto U = MultiplierPropagator::make(sym, g);
    SampledField f = gaussian_datum(g, 1.3);
    const double n0 = lp_norm(f, 2.0);
    for (double t : {0.05, 0.2, 0.5}) {
      bool alias = false;
      SampledField u = U.apply(t, f, &alias);
      REQUIRE_FALSE(alias);
      CHECK(std::abs(lp_norm(u, 2.0) - n0) < 1e-12);
    }
  }
}

TEST_CASE("group law and time reversal invert the flow", "[propagator]") {
  GridSpec g{1, 1024, 32.0};
  auto sym = HomogeneousSymbol::radial_power(1, 2.0);
  auto U = MultiplierPropagator::make(sym, g);
  SampledField f = gaussian_datum(g);
  SampledField fwd = U.apply(0.4, f, nullptr);
  SampledField back = U.apply(-0.4, fwd, nullptr);
  CHECK(phaselab::testing::max_abs_diff(back.values, f.values) < 1e-12);
  // U(s) U(t) = U(s + t)
  SampledField ab = U.apply(0.15, U.apply(0.25, f, nullptr), nullptr);
  CHECK(phaselab::testing::max_abs_diff(ab.values, fwd.values) < 1e-12);
}

TEST_CASE("quadratic flow reproduces the closed-form gaussian", "[propagator]") {
  // f = exp(-pi x^2): u(t, x) = (1 - 2 i t)^{-1/2} exp(-pi x^2 / (1 - 2 i t))
  GridSpec g{1, 2048, 32.0};
  auto sym = HomogeneousSymbol::radial_power(1, 2.0);
  auto U = MultiplierPropagator::make(sym, g);
  SampledField f = gaussian_datum(g);
  for (double t : {0.1, 0.3}) {
    bool alias = false;
    SampledField u = U.apply(t, f, &alias);
    REQUIRE_FALSE(alias);
    const cplx den(1.0, -2.0 * t);
    const cplx pref = std::pow(den, -0.5);
    double mx = 0;
    for (std::size_t n = 0; n < g.N; ++n) {
      const double x = grid_point(g, Domain::Space, n)[0];
      const cplx exact = pref * std::exp(-M_PI * x * x / den);
      mx = std::max(mx, std::abs(u.values[n] - exact));
    }
    CHECK(mx < 1e-8);
  }
}

TEST_CASE("group displacement audit flags outrunning modes", "[propagator]") {
  GridSpec g{1, 256, 8.0};
  auto sym = HomogeneousSymbol::radial_power(1, 2.0);
  auto U = MultiplierPropagator::make(sym, g);
  SampledField f = gaussian_datum(g);
  bool alias = false;
  U.apply(2.0, f, &alias);  // 2 t xi_max = 64 >> L/2
  CHECK(alias);
}

TEST_CASE("fundamental solution approaches the delta profile as t -> 0", "[propagator]") {
  auto sym = HomogeneousSymbol::radial_power(1, 2.0);
  CHECK(delta_limit_relative_error(sym, 1e-3, GridSpec{1, 8192, 16.0}) < 0.05);
}

TEST_CASE("kernel self-similarity holds on the central domain", "[propagator]") {
  for (double m : {2.0, 4.0}) {
    auto sym = HomogeneousSymbol::radial_power(1, m);
    const double t = 0.5;
    GridSpec g{1, 16384, 32.0};
    SelfSimilarityReport r = self_similarity_check(sym, t, g);
    INFO("m = " << m << " rel l2 " << r.rel_l2_central);
    CHECK_FALSE(r.alias_flag_t);
    CHECK(r.rel_l2_central < 0.01);
  }
}

TEST_CASE("decay scans fit the small-time slope for the quadratic symbol", "[propagator]") {
  auto sym = HomogeneousSymbol::radial_power(1, 2.0);
  std::vector<double> ts;
  for (int i = 0; i < 6; ++i) ts.push_back(0.01 * std::pow(10.0, i / 5.0));
  DecayScanResult scan =
      dispersive_decay_scan(sym, Window::gaussian(1.0), ts, band_policy_1d(2.0, 0.1, 8192));
  for (const auto& row : scan.rows) CHECK_FALSE(row.alias_flag);
  FitReport fit = decay_scan_slope(scan);
  CHECK(fit.slope == Catch::Approx(-1.0).margin(0.1));
}

TEST_CASE("large-time decay halves the rate", "[propagator]") {
  auto sym = HomogeneousSymbol::radial_power(1, 2.0);
  std::vector<double> ts;
  for (int i = 0; i < 6; ++i) ts.push_back(10.0 * std::pow(10.0, i / 5.0));
  DecayScanResult scan =
      dispersive_decay_scan(sym, Window::gaussian(1.0), ts, band_policy_1d(2.0, 100.0, 8192));
  FitReport fit = decay_scan_slope(scan);
  CHECK(fit.slope == Catch::Approx(-0.5).margin(0.1));
}

TEST_CASE("interpolated multiplier slopes follow the exponent ladder", "[propagator]") {
  auto sym = HomogeneousSymbol::radial_power(1, 2.0);
  std::vector<double> ts;
  for (int i = 0; i < 5; ++i) ts.push_back(0.01 * std::pow(10.0, i / 4.0));
  MultiplierNormResult r2 = interpolated_multiplier_bound_check(sym, 2.0, ts, 16384, 64);
  CHECK(r2.slope.slope == Catch::Approx(-0.5).margin(0.1));
  MultiplierNormResult ri = interpolated_multiplier_bound_check(sym, kInf, ts, 16384, 64);
  CHECK(ri.slope.slope == Catch::Approx(0.0).margin(0.1));
}

TEST_CASE("operator norm transfer stays within a stable band", "[propagator]") {
  auto sym = HomogeneousSymbol::radial_power(1, 2.0);
  std::vector<double> ts{0.02, 0.05, 0.1};
  OperatorNormResult r = operator_norm_check(sym, Window::gaussian(1.0), ts, 4096);
  REQUIRE(r.rows.size() == 3);
  for (const auto& row : r.rows) CHECK(row.max_ratio > 0.0);
  CHECK(r.drift < 3.0);
}
