#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "phaselab/propagator.hpp"
#include "phaselab/solver.hpp"
#include "support/common.hpp"
#include "support/volterra_oracle.hpp"

using namespace phaselab;
using phaselab::testing::gaussian_datum;

namespace {

// The reference configuration: d = 1, quartic symbol, unit point mass at the
// origin, linear coupling, gaussian datum.
SolverConfig delta_config(std::size_t quad_nodes = 16384) {
  SolverConfig cfg;
  cfg.grid = GridSpec{1, 64, 8.0};
  cfg.symbol = HomogeneousSymbol::radial_power(1, 4.0);
  cfg.potential = Potential::dirac_comb(1, {Vec3{0, 0, 0}}, {cplx(1, 0)});
  cfg.nonlinearity = Nonlinearity::linear();
  cfg.f = gaussian_datum(cfg.grid);
  cfg.R = 4.0;
  cfg.quad_nodes = quad_nodes;
  cfg.tol = 1e-10;
  return cfg;
}

double fl1_diff_at_end(const SolutionTrajectory& a, const SolutionTrajectory& b) {
  const SampledField& ua = a.fields.back();
  const SampledField& ub = b.fields.back();
  SampledField da = forward_fourier(ua), db = forward_fourier(ub);
  double acc = 0;
  for (std::size_t k = 0; k < da.values.size(); ++k) acc += std::abs(da.values[k] - db.values[k]);
  return acc / da.grid.L;
}

}  // namespace

TEST_CASE("window formula and lipschitz constants evaluate as stated", "[solver]") {
  CHECK(local_step_T(4, 1, 1, 1, 1) == Catch::Approx(0.0625));
  CHECK(local_step_T(4, 1, 0.1, 0.1, 0.1) == Catch::Approx(1.0));  // clamped at 1

  CHECK(lipschitz_constant_C_R(Nonlinearity::linear(), 2.0) == Catch::Approx(1.0));
  CHECK(lipschitz_constant_C_R(Nonlinearity::power(1.0, 2), 1.0) == Catch::Approx(2.0));
  CHECK(lipschitz_constant_C_R(Nonlinearity::power_abs(1.0, 1), 0.5) == Catch::Approx(0.75));
}

TEST_CASE("calibration constants stay pinned", "[solver]") {
  GridSpec g{1, 64, 8.0};
  auto m4 = HomogeneousSymbol::radial_power(1, 4.0);
  auto m2 = HomogeneousSymbol::radial_power(1, 2.0);
  const Window win = Window::gaussian(1.0);
  CHECK(estimate_C_prime(m4, g, win) == Catch::Approx(2.3728).margin(0.01));
  CHECK(estimate_C_prime(m2, g, win) == Catch::Approx(1.6834).margin(0.01));
  CHECK(calibrate_A_W(g, win, 2026, 100) == Catch::Approx(0.9140).margin(0.005));
}

TEST_CASE("picard iteration contracts on the reference window", "[solver]") {
  SolverConfig cfg = delta_config();
  SolutionTrajectory traj = picard_solve(cfg);
  REQUIRE(traj.windows.size() == 1);
  const WindowDiagnostics& w = traj.windows[0];

  CHECK(w.step_T == Catch::Approx(0.011100490140413).epsilon(1e-9));
  CHECK(w.picard_iters == 11);
  CHECK(w.residual < 1e-10);
  CHECK(w.node_doubling_delta < 1e-11);
  for (double r : w.ratios) CHECK(r <= 0.6);
  CHECK(w.fl1_max <= cfg.R + 1e-12);
  CHECK(std::isfinite(w.w_norm_end));
  // the first ratio is about (2 pi)^2 T^2 ... well inside the contraction zone
  CHECK(w.ratios.front() == Catch::Approx(0.1947).margin(0.01));
}

TEST_CASE("fixed point satisfies the integral equation when re-applied", "[solver]") {
  // the solver itself re-applies the Duhamel map once and reports the defect;
  // converged runs keep it within twice the tolerance
  SolverConfig cfg = delta_config();
  SolutionTrajectory traj = picard_solve(cfg);
  CHECK(traj.windows[0].residual <= 2.0 * cfg.tol);
}

TEST_CASE("independent dense collocation confirms the endpoint", "[solver]") {
  SolverConfig cfg = delta_config(4096);
  SolutionTrajectory traj = picard_solve(cfg);
  const double T = traj.windows[0].step_T;

  SampledField fh = cfg.f;
  forward_fourier_inplace(fh);
  auto oracle = phaselab::testing::volterra_delta_oracle(cfg.grid, 4.0, T, 4 * 4096, fh.values);

  SampledField uh = forward_fourier(traj.fields.back());
  double num = 0, den = 0;
  for (std::size_t k = 0; k < cfg.grid.size(); ++k) {
    const double xi = grid_point(cfg.grid, Domain::Frequency, k)[0];
    const cplx ph = std::exp(cplx(0, 2 * M_PI * T * std::pow(std::abs(xi), 4.0)));
    num += std::abs(uh.values[k] - ph * oracle[k]);
    den += std::abs(oracle[k]);
  }
  CHECK(num / den < 1e-6);
}

TEST_CASE("zero potential reduces to the free propagator", "[solver]") {
  SolverConfig cfg = delta_config(256);
  cfg.potential = Potential::dirac_comb(1, {Vec3{0, 0, 0}}, {cplx(0, 0)});
  SolutionTrajectory traj = picard_solve(cfg);
  REQUIRE(traj.windows[0].picard_iters <= 2);

  auto U = MultiplierPropagator::make(cfg.symbol, cfg.grid);
  SampledField free_u = U.apply(traj.windows[0].step_T, cfg.f, nullptr);
  CHECK(phaselab::testing::max_abs_diff(traj.fields.back().values, free_u.values) < 1e-10);
}

TEST_CASE("solution depends lipschitz-continuously on the datum", "[solver]") {
  SolverConfig base = delta_config(2048);
  ContractionConstants cc = contraction_constants(base);
  base.c_prime_hint = cc.c_prime;
  base.a_w_hint = cc.a_w;
  base.v_bound_hint = cc.v_bound;

  SplitMix64 rng{2026};
  for (int pair = 0; pair < 20; ++pair) {
    SolverConfig c1 = base, c2 = base;
    const double s1 = 0.7 + 0.6 * rng.uniform(), s2 = 0.7 + 0.6 * rng.uniform();
    const double a1 = 0.5 + 0.5 * rng.uniform(), a2 = 0.5 + 0.5 * rng.uniform();
    c1.f = gaussian_datum(base.grid, s1, a1);
    c2.f = gaussian_datum(base.grid, s2, a2);
    SolutionTrajectory t1 = picard_solve(c1);
    SolutionTrajectory t2 = picard_solve(c2);

    SampledField f1 = forward_fourier(c1.f), f2 = forward_fourier(c2.f);
    double dfl = 0;
    for (std::size_t k = 0; k < base.grid.size(); ++k)
      dfl += std::abs(f1.values[k] - f2.values[k]);
    dfl /= base.grid.L;

    const double dsol = fl1_diff_at_end(t1, t2);
    CHECK(dsol <= 2.0 * dfl + 4.0 * base.tol);
  }
}

TEST_CASE("global continuation hands windows over continuously", "[solver]") {
  SolverConfig cfg = delta_config();
  cfg.quad_nodes = 65536;
  cfg.t_max = 5.0 * 0.0111;
  SolutionTrajectory traj = global_solve(cfg);
  REQUIRE(traj.windows.size() == 5);
  REQUIRE(traj.times.size() == 6);
  CHECK(traj.times.back() == Catch::Approx(cfg.t_max).epsilon(1e-12));
  for (const auto& w : traj.windows) {
    CHECK(w.residual <= 2.0 * cfg.tol);
    for (double r : w.ratios) CHECK(r <= 0.6);
  }
  // each stored field is the next window's datum: gaps vanish by construction,
  // so probe instead that the trajectory is causal: fl1 never jumps wildly
  for (std::size_t i = 0; i + 1 < traj.windows.size(); ++i) {
    const double a = traj.windows[i].fl1_end;
    const double b = traj.windows[i + 1].fl1_end;
    CHECK(std::abs(b - a) < 0.5);
  }
}

TEST_CASE("free global evolution matches the multiplier propagator", "[solver]") {
  SolverConfig cfg = delta_config(256);
  cfg.potential = Potential::dirac_comb(1, {Vec3{0, 0, 0}}, {cplx(0, 0)});
  cfg.t_max = 10.0;
  SolutionTrajectory traj = global_solve(cfg);
  auto U = MultiplierPropagator::make(cfg.symbol, cfg.grid);
  SampledField ref = U.apply(10.0, cfg.f, nullptr);
  CHECK(phaselab::testing::max_abs_diff(traj.fields.back().values, ref.values) < 1e-10);
}

TEST_CASE("perturbed flow is not reversed by conjugate free dynamics", "[solver]") {
  // free case: evolving forward and back returns the datum to 1e-10; with the
  // point interaction the same recipe leaves a visible defect.
  SolverConfig cfg = delta_config(4096);
  SolutionTrajectory traj = picard_solve(cfg);
  const double T = traj.windows[0].step_T;
  auto U = MultiplierPropagator::make(cfg.symbol, cfg.grid);

  SampledField back = U.apply(-T, traj.fields.back(), nullptr);
  double defect = 0;
  for (std::size_t i = 0; i < cfg.grid.size(); ++i)
    defect = std::max(defect, std::abs(back.values[i] - cfg.f.values[i]));
  CHECK(defect > 1e-4);  // the interaction is not undone

  SampledField free_back = U.apply(-T, U.apply(T, cfg.f, nullptr), nullptr);
  double free_defect = 0;
  for (std::size_t i = 0; i < cfg.grid.size(); ++i)
    free_defect = std::max(free_defect, std::abs(free_back.values[i] - cfg.f.values[i]));
  CHECK(free_defect < 1e-10);
}

TEST_CASE("nonlinear local windows contract too", "[solver]") {
  SolverConfig cfg = delta_config(2048);
  cfg.nonlinearity = Nonlinearity::power_abs(0.5, 1);  // 0.5 |u|^2 u
  SolutionTrajectory traj = picard_solve(cfg);
  const WindowDiagnostics& w = traj.windows[0];
  CHECK(w.residual <= 2.0 * cfg.tol);
  for (double r : w.ratios) CHECK(r <= 0.6);
  // nonlinear global continuation is out of contract
  cfg.t_max = 1.0;
  CHECK_THROWS_AS(global_solve(cfg), ConfigError);
}

TEST_CASE("iteration caps surface as non-contraction", "[solver]") {
  SolverConfig cfg = delta_config(256);
  cfg.max_picard = 1;
  CHECK_THROWS_AS(picard_solve(cfg), ContractionError);
}

TEST_CASE("starved quadrature is refused rather than absorbed", "[solver]") {
  SolverConfig cfg = delta_config(8);  // far below any resolvable node count
  CHECK_THROWS_AS(picard_solve(cfg), QualityError);
}

TEST_CASE("low-regularity mode delegates its degenerate corner", "[solver]") {
  SolverConfig cfg = delta_config(2048);
  SolutionTrajectory std_traj = picard_solve(cfg);
  cfg.mode = RegularityMode::low_regularity(kInf, 1.0);
  SolutionTrajectory low_traj = low_regularity_solve(cfg);
  CHECK(phaselab::testing::max_abs_diff(std_traj.fields.back().values,
                                        low_traj.fields.back().values) == 0.0);
}

TEST_CASE("low-regularity window handles a rough datum on the shell", "[solver]") {
  SolverConfig cfg;
  cfg.grid = GridSpec{3, 16, 8.0};
  cfg.symbol = HomogeneousSymbol::radial_power(3, 4.0);
  cfg.potential = Potential::sphere_shell(3, 1.0, 1.0);
  cfg.nonlinearity = Nonlinearity::linear();
  cfg.mode = RegularityMode::low_regularity(2.0, 2.0);
  cfg.f = phaselab::testing::random_phase_datum(cfg.grid, 2026);
  cfg.R = 16.0;
  cfg.quad_nodes = 64;
  cfg.window = Window::bump(1.0);
  SolutionTrajectory traj = low_regularity_solve(cfg);
  REQUIRE(traj.windows.size() >= 1);
  const WindowDiagnostics& w = traj.windows[0];
  CHECK(w.residual <= 2.0 * cfg.tol);
  for (double r : w.ratios) CHECK(r <= 0.6);
  CHECK(std::isfinite(w.w_norm_end));
  CHECK(w.w_norm_end > 0.0);
}

TEST_CASE("low-regularity window handles the planar coulomb potential", "[solver]") {
  SolverConfig cfg;
  cfg.grid = GridSpec{2, 32, 8.0};
  cfg.symbol = HomogeneousSymbol::radial_power(2, 3.0);
  cfg.potential = Potential::cropped_coulomb(2, 1.0, 1.0);
  cfg.nonlinearity = Nonlinearity::linear();
  cfg.mode = RegularityMode::low_regularity(1.5, 3.0);  // q <= p' = 3, m = 3 > 2d/p' = 4/3
  cfg.f = gaussian_datum(cfg.grid);
  cfg.R = 4.0;
  cfg.quad_nodes = 64;
  cfg.window = Window::bump(1.0);
  SolutionTrajectory traj = low_regularity_solve(cfg);
  const WindowDiagnostics& w = traj.windows[0];
  CHECK(w.residual <= 2.0 * cfg.tol);
  for (double r : w.ratios) CHECK(r <= 0.6);
  CHECK(std::isfinite(w.w_norm_end));
}

TEST_CASE("standard mode rejects symbols at the regularity boundary", "[solver]") {
  SolverConfig cfg = delta_config(256);
  cfg.symbol = HomogeneousSymbol::radial_power(1, 2.0);  // m = 2 = 2d: out of scope
  CHECK_THROWS_AS(picard_solve(cfg), ConfigError);
  cfg.mode = RegularityMode::low_regularity(2.0, 1.0);  // m > 2d/p' = 1: admissible again
  REQUIRE_NOTHROW(low_regularity_solve(cfg));
}
