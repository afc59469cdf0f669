// Command-line driver: every verification and solve runs from a JSON config
// and emits CSV/JSON artifacts plus a manifest with input/output digests.
//
// Subcommands: fresnel-portrait, norms, decay-scan, cone-check, potential-ft,
//              solve, propagate.
// Exit codes:  0 success, 2 configuration error, 3 numeric-quality refusal
//              (aliasing / quadrature), 4 non-contraction.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "phaselab/config.hpp"
#include "phaselab/gabor.hpp"
#include "phaselab/propagator.hpp"

namespace {

using namespace phaselab;
using clock_type = std::chrono::steady_clock;

struct CommonOpts {
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 2026;
  int threads = 1;
};

void add_common(CLI::App* sub, CommonOpts& o) {
  sub->add_option("--config", o.config_path, "JSON run configuration")->required();
  sub->add_option("--out-dir", o.out_dir, "output directory (created if missing)");
  sub->add_option("--seed", o.seed, "seed for sampled checks");
  sub->add_option("--threads", o.threads, "worker threads for per-node stages");
}

std::string join_path(const std::string& dir, const std::string& name) {
  return dir.empty() || dir == "." ? name : dir + "/" + name;
}

// Every command computes first and writes only afterwards, so a refused or
// misconfigured run leaves no partial outputs.
struct RunContext {
  CommonOpts opts;
  json config;
  RunManifest manifest;
  clock_type::time_point start = clock_type::now();

  explicit RunContext(const CommonOpts& o, const std::string& subcommand) : opts(o) {
    config = load_config(o.config_path);
    manifest.subcommand = subcommand;
    manifest.resolved_config = config;
    manifest.note_input(o.config_path);
  }

  std::string out_path(const std::string& name) const { return join_path(opts.out_dir, name); }

  void finish() {
    manifest.wall_seconds =
        std::chrono::duration<double>(clock_type::now() - start).count();
    write_manifest(out_path("manifest.json"), manifest);
  }

  void write_json_report(const std::string& name, const json& body) {
    ensure_dir(opts.out_dir);
    const std::string path = out_path(name);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("report: cannot open " + path);
    const std::string text = body.dump(2) + "\n";
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    manifest.note_output(path);
  }

  void commit_csv(CsvWriter& csv) {
    ensure_dir(opts.out_dir);
    csv.commit();
    manifest.note_output(csv.path());
  }

  void write_snapshot(const std::string& name, const SampledField& f) {
    ensure_dir(opts.out_dir);
    const std::string path = out_path(name);
    write_field(path, f);
    manifest.note_output(path);
  }
};

json fit_to_json(const FitReport& fr) {
  return json{{"slope", fr.slope},
              {"intercept", fr.intercept},
              {"npoints", fr.npoints},
              {"residual", fr.residual}};
}

// ---------------------------------------------------------------------------
// fresnel-portrait: phase-space portrait of e^{2 pi i mu(x)} with mixed-norm
// estimates, truncation drift, and the off-ridge decay slope.

int cmd_fresnel_portrait(const CommonOpts& opts) {
  RunContext ctx(opts, "fresnel-portrait");
  const json& root = ctx.config;
  const GridSpec grid = grid_from(root);
  const HomogeneousSymbol sym = symbol_from(root, grid.d);
  const Window window = window_from(root);
  const json& psec = root.contains("portrait") ? root["portrait"] : json::object();
  const double t = num_or(psec, "/portrait", "t", 1.0);
  const double rho = num_or(psec, "/portrait", "smoothing_rho", 1.0);
  const double A = num_or(psec, "/portrait", "A", 4.0);
  const int x_stride = static_cast<int>(
      int_or(psec, "/portrait", "x_stride", std::max<std::int64_t>(1, grid.N / 64)));

  const SmoothedSymbol smoothed = SmoothedSymbol::make(sym, rho);
  FresnelResult F = fresnel_field(smoothed, grid, t);
  if (F.alias_flag)
    throw QualityError("fresnel-portrait: " + std::to_string(100 * F.aliased_fraction) +
                       "% of grid points alias; enlarge N or shrink t");

  // Slice centers on the stride lattice, kept away from the wrap boundary:
  // the chirp's instantaneous frequency flips sign across the box edge, and a
  // window straddling it reads a kink whose broad spectrum would pollute the
  // off-ridge decay fit.
  const double x_keep = num_or(psec, "/portrait", "x_max", 0.4 * grid.L);
  std::vector<std::size_t> centers;
  {
    std::vector<std::size_t> axis_idx;
    for (std::size_t i = 0; i < grid.N; i += static_cast<std::size_t>(x_stride)) {
      const double xc = (static_cast<double>(i) - static_cast<double>(grid.N) / 2.0) * grid.h();
      if (std::abs(xc) <= x_keep) axis_idx.push_back(i);
    }
    if (axis_idx.empty()) throw ConfigError("fresnel-portrait: no slice centers; raise x_max");
    if (grid.d == 1) {
      centers = axis_idx;
    } else {
      for (std::size_t a : axis_idx)
        for (std::size_t b : axis_idx) centers.push_back(a * grid.N + b);
    }
  }
  const double cell = std::pow(static_cast<double>(x_stride) * grid.h(), grid.d);
  PhaseSpacePortrait P = stft_at_positions(F.field, window, centers, cell);
  const double m_norm = modulation_norm(P, 1.0, kInf);
  const double w_norm = amalgam_norm(P, 1.0, kInf);

  DecayFit df = decay_exponent_fit(P, smoothed, A);

  json report{{"m_norm_1inf", m_norm},
              {"w_norm_1inf", w_norm},
              {"decay_slope", df.fit.slope},
              {"decay_fit", fit_to_json(df.fit)},
              {"aliased_fraction", F.aliased_fraction}};

  const double x_lo = num_or(psec, "/portrait", "growth_x_min", 1.0);
  const double x_hi = num_or(psec, "/portrait", "growth_x_max", 0.4 * grid.L);
  if (grid.d == 1 && sym.kind == HomogeneousSymbol::Kind::RadialPower) {
    // truncation drift on the alias-free ladder (N grows ~ L^m with the box,
    // so fixed-h doubling would alias for m > 2)
    LadderPoint lp1 = ladder_point(sym.m, grid.L, window);
    LadderPoint lp2 = ladder_point(sym.m, 2.0 * grid.L, window);
    report["m_norm_ladder"] = lp1.m1inf;
    report["m_norm_ladder_Ldoubled"] = lp2.m1inf;
    report["m_drift"] = std::abs(lp2.m1inf - lp1.m1inf) / std::max(lp1.m1inf, 1e-300);

    // per-slice frequency-integral growth exponent against |x|
    std::vector<double> lx, lv;
    for (std::size_t j = 0; j < lp1.xs.size(); ++j) {
      const double ax = std::abs(lp1.xs[j]);
      if (ax < x_lo || ax > x_hi || lp1.slice_integral[j] <= 0) continue;
      lx.push_back(std::log(ax));
      lv.push_back(std::log(lp1.slice_integral[j]));
    }
    if (lx.size() >= 4) {
      FitReport gf = fit_linear(lx, lv);
      report["slice_growth_exponent"] = gf.slope;
      report["slice_growth_fit"] = fit_to_json(gf);
    }
    // x-flatness of the slice integral (relative spread on the fit band)
    double mn = 1e300, mx = 0;
    for (std::size_t j = 0; j < lp1.xs.size(); ++j) {
      const double ax = std::abs(lp1.xs[j]);
      if (ax < x_lo || ax > x_hi) continue;
      mn = std::min(mn, lp1.slice_integral[j]);
      mx = std::max(mx, lp1.slice_integral[j]);
    }
    if (mx > 0) report["slice_flatness_spread"] = (mx - mn) / mx;
  } else {
    // generic drift: L doubles at fixed h on the portrait itself
    GridSpec g2{grid.d, grid.N * 2, grid.L * 2};
    FresnelResult F2 = fresnel_field(smoothed, g2, t);
    if (F2.alias_flag)
      throw QualityError("fresnel-portrait: the L-doubled drift grid aliases; enlarge N");
    PhaseSpacePortrait P2 = stft(F2.field, window, x_stride * 2);
    const double m_norm_2L = modulation_norm(P2, 1.0, kInf);
    report["m_norm_Ldoubled"] = m_norm_2L;
    report["m_drift"] = std::abs(m_norm_2L - m_norm) / std::max(m_norm, 1e-300);
  }

  // artifacts
  CsvWriter csv(ctx.out_path("portrait.csv"),
                grid.d == 1 ? std::initializer_list<std::string>{"x", "xi", "magnitude"}
                            : std::initializer_list<std::string>{"x1", "x2", "xi1", "xi2",
                                                                 "magnitude"});
  for (std::size_t j = 0; j < P.n_slices(); ++j) {
    const Vec3 x = P.slice_pos(j);
    const double* row = P.slice(j);
    for (std::size_t k = 0; k < P.grid.size(); ++k) {
      const Vec3 xi = grid_point(P.grid, Domain::Frequency, k);
      if (grid.d == 1)
        csv.row({x[0], xi[0], row[k]});
      else
        csv.row({x[0], x[1], xi[0], xi[1], row[k]});
    }
  }
  ctx.commit_csv(csv);
  ctx.write_json_report("report.json", report);
  ctx.finish();
  return 0;
}

// ---------------------------------------------------------------------------
// norms: mixed-norm estimates of a Fresnel function or a field snapshot.

int cmd_norms(const CommonOpts& opts) {
  RunContext ctx(opts, "norms");
  const json& root = ctx.config;
  const GridSpec grid = grid_from(root);
  const Window window = window_from(root);
  const double p = [&] {
    const json& v = member(root, "", "p");
    if (v.is_string() && v.get<std::string>() == "inf") return kInf;
    return v.get<double>();
  }();
  const double q = [&] {
    const json& v = member(root, "", "q");
    if (v.is_string() && v.get<std::string>() == "inf") return kInf;
    return v.get<double>();
  }();

  const json& tsec = member(root, "", "target");
  const std::string kind = str_at(tsec, "/target", "kind");
  const int x_stride = static_cast<int>(
      int_or(root, "", "x_stride", std::max<std::int64_t>(1, grid.N / 64)));

  auto render = [&](const GridSpec& g, int stride) {
    SampledField f = make_field(g, Domain::Space);
    if (kind == "fresnel") {
      const HomogeneousSymbol sym = symbol_from(root, g.d);
      const double t = num_or(tsec, "/target", "t", 1.0);
      FresnelResult F = fresnel_field(sym, g, t);
      if (F.alias_flag) throw QualityError("norms: fresnel target aliases on the grid");
      f = F.field;
    } else if (kind == "file") {
      f = read_field(str_at(tsec, "/target", "path"));
      if (f.grid.d != g.d || f.grid.N != g.N || f.grid.L != g.L)
        throw ConfigError("config /target/path: snapshot grid does not match /grid");
    } else {
      throw ConfigError("config /target/kind: unknown target '" + kind + "'");
    }
    PhaseSpacePortrait P = stft(f, window, stride);
    return std::pair<double, double>{modulation_norm(P, p, q), amalgam_norm(P, p, q)};
  };

  auto [mn, wn] = render(grid, x_stride);
  json report{{"p", std::isinf(p) ? json("inf") : json(p)},
              {"q", std::isinf(q) ? json("inf") : json(q)},
              {"m_norm", mn},
              {"w_norm", wn}};
  if (kind == "fresnel") {
    GridSpec g2{grid.d, grid.N * 2, grid.L * 2};
    auto [mn2, wn2] = render(g2, x_stride * 2);
    report["m_norm_Ldoubled"] = mn2;
    report["w_norm_Ldoubled"] = wn2;
    report["m_drift"] = std::abs(mn2 - mn) / std::max(mn, 1e-300);
    report["w_drift"] = std::abs(wn2 - wn) / std::max(wn, 1e-300);
  }
  ctx.write_json_report("report.json", report);
  ctx.finish();
  return 0;
}

// ---------------------------------------------------------------------------
// decay-scan: ||E(t,.)||_{W^{1,inf}} over a time list with log-log slopes.

int cmd_decay_scan(const CommonOpts& opts) {
  RunContext ctx(opts, "decay-scan");
  const json& root = ctx.config;
  const json& ssec = member(root, "", "symbol");
  const int d = static_cast<int>(int_or(ssec, "/symbol", "d", 1));
  const HomogeneousSymbol sym = symbol_from(root, d);
  const Window window = window_from(root);
  const std::vector<double> ts = times_from(root, "times");
  if (ts.empty()) throw ConfigError("config /times: empty time list");

  const json& scs = root.contains("scan") ? root["scan"] : json::object();
  const std::size_t N = static_cast<std::size_t>(
      int_or(scs, "/scan", "N", d == 1 ? 16384 : 512));
  const std::string policy_kind = str_or(scs, "/scan", "policy", "band");
  double t_max = 0;
  for (double t : ts) t_max = std::max(t_max, t);
  GridPolicy policy;
  if (policy_kind == "band") {
    policy = d == 1 ? band_policy_1d(sym.m, t_max, N) : band_policy_2d(sym.m, t_max, N);
  } else if (policy_kind == "small_t") {
    if (d != 2) throw ConfigError("config /scan/policy: small_t is a d=2 policy");
    policy = small_t_policy_2d(sym.m, N);
  } else if (policy_kind == "fixed") {
    GridSpec g{d, N, num_at(scs, "/scan", "L")};
    policy = [g](double) { return g; };
  } else {
    throw ConfigError("config /scan/policy: unknown policy '" + policy_kind + "'");
  }

  DecayScanResult scan = dispersive_decay_scan(sym, window, ts, policy);
  if (scan.any_alias())
    throw QualityError("decay-scan: at least one time aliases on the scan grid; "
                       "increase /scan/N or reduce the time range");

  json report{{"n_times", ts.size()}};
  if (ts.size() >= 2) {
    report["fit"] = fit_to_json(decay_scan_slope(scan));
    report["slope"] = report["fit"]["slope"];
  } else {
    report["warning"] = "single time point; norms reported without a slope";
  }

  CsvWriter csv(ctx.out_path("decay.csv"),
                {"t", "N", "L", "w1inf_norm", "aliased_fraction"});
  for (const auto& r : scan.rows)
    csv.row({r.t, static_cast<double>(r.N), r.L, r.norm, r.aliased_fraction});
  ctx.commit_csv(csv);
  ctx.write_json_report("report.json", report);
  ctx.finish();
  return 0;
}

// ---------------------------------------------------------------------------
// cone-check: gradient-separation lower bound on a cone, with sample-doubling
// stability.

int cmd_cone_check(const CommonOpts& opts) {
  RunContext ctx(opts, "cone-check");
  const json& root = ctx.config;
  const json& ssec = member(root, "", "symbol");
  const int d = static_cast<int>(int_or(ssec, "/symbol", "d", 2));
  const HomogeneousSymbol sym = symbol_from(root, d);
  const json& csec = member(root, "", "cone");
  const Vec3 axis = vec_from(member(csec, "/cone", "axis"), "/cone/axis", d);
  const double half_angle = num_at(csec, "/cone", "half_angle");
  const std::size_t pairs =
      static_cast<std::size_t>(int_or(csec, "/cone", "pair_samples", 10000));
  ConeSampling opt;
  opt.r_min = num_or(csec, "/cone", "r_min", 1e-2);
  opt.r_max = num_or(csec, "/cone", "r_max", 1e2);
  opt.merged_opposite = csec.contains("merged_opposite") && csec["merged_opposite"].is_boolean()
                            ? csec["merged_opposite"].get<bool>()
                            : false;

  const double r1 = cone_separation_ratio(sym, axis, half_angle, pairs, opts.seed, opt);
  const double r2 = cone_separation_ratio(sym, axis, half_angle, 2 * pairs, opts.seed + 1, opt);
  json report{{"min_ratio", r1},
              {"min_ratio_doubled", r2},
              {"rel_change", std::abs(r2 - r1) / std::max(std::abs(r1), 1e-300)},
              {"pair_samples", pairs},
              {"merged_opposite", opt.merged_opposite}};
  ctx.write_json_report("report.json", report);
  ctx.finish();
  return 0;
}

// ---------------------------------------------------------------------------
// potential-ft: exact frequency samples of a measure potential plus the
// W^{p,1} membership dichotomy and (for shells) the asymptotic envelope.

int cmd_potential_ft(const CommonOpts& opts) {
  RunContext ctx(opts, "potential-ft");
  const json& root = ctx.config;
  const GridSpec grid = grid_from(root);
  const Window window = window_from(root);
  Potential pot = potential_from(root, grid);
  const json& rsec = root.contains("report") ? root["report"] : json::object();

  const SampledField vhat = to_frequency(pot, grid);

  json report{{"kind", str_at(member(root, "", "potential"), "/potential", "kind")}};
  json thresholds = json::array();
  if (rsec.contains("p_values")) {
    const json& ps = rsec["p_values"];
    if (!ps.is_array()) throw ConfigError("config /report/p_values: expected an array");
    for (std::size_t i = 0; i < ps.size(); ++i) {
      const double p = ps[i].get<double>();
      WAmalgamReport w = amalgam_W_p1_estimate(pot, grid, window, p);
      std::string verdict = "inconclusive";
      if (!w.inconclusive) verdict = w.drift < 0.05 ? "member" : (w.drift > 0.20 ? "non-member" : "inconclusive");
      thresholds.push_back(json{{"p", p},
                                {"norm", w.norm},
                                {"norm_refined", w.norm_refined},
                                {"drift", w.drift},
                                {"threshold_p", w.threshold_p},
                                {"verdict", verdict}});
    }
  }
  if (!thresholds.empty()) report["w_p1_thresholds"] = thresholds;

  if (pot.kind == Potential::Kind::SphereShell && rsec.contains("asymptotic")) {
    const json& as = rsec["asymptotic"];
    SphereAsymptoticReport ar = sphere_ft_asymptotic_check(
        pot, num_or(as, "/report/asymptotic", "rho_min", 5.0),
        num_or(as, "/report/asymptotic", "rho_max", 20.0));
    report["asymptotic"] = json{{"max_scaled_residual", ar.max_scaled},
                                {"min_scaled_residual", ar.min_scaled},
                                {"band_ratio", ar.band_ratio}};
  }
  if (rsec.contains("decay_fit")) {
    const json& dfw = rsec["decay_fit"];
    FitReport fr = potential_ft_decay_fit(pot, num_or(dfw, "/report/decay_fit", "rho_min", 2.0),
                                          num_or(dfw, "/report/decay_fit", "rho_max", 40.0));
    report["envelope_decay"] = fit_to_json(fr);
  }

  // first-axis frequency slice (other axes at the zero-frequency index)
  CsvWriter csv(ctx.out_path("potential_ft.csv"), {"xi", "re", "im"});
  const std::size_t half = grid.N / 2;
  for (std::size_t k = 0; k < grid.N; ++k) {
    std::size_t flat = k;
    if (grid.d == 2) flat = k * grid.N + half;
    if (grid.d == 3) flat = (k * grid.N + half) * grid.N + half;
    const Vec3 xi = grid_point(grid, Domain::Frequency, flat);
    csv.row({xi[0], vhat.values[flat].real(), vhat.values[flat].imag()});
  }
  ctx.commit_csv(csv);
  ctx.write_json_report("report.json", report);
  ctx.finish();
  return 0;
}

// ---------------------------------------------------------------------------
// solve: Duhamel-Picard contraction solve, standard or low-regularity mode.

int cmd_solve(const CommonOpts& opts) {
  RunContext ctx(opts, "solve");
  SolverConfig cfg = solver_config_from(ctx.config);
  cfg.threads = opts.threads;

  SolutionTrajectory traj;
  if (cfg.mode.low)
    traj = low_regularity_solve(cfg);
  else if (cfg.t_max > 0)
    traj = global_solve(cfg);
  else
    traj = picard_solve(cfg);

  json jt{{"times", traj.times}};
  json wins = json::array();
  for (const auto& w : traj.windows) {
    wins.push_back(json{{"t0", w.t0},
                        {"step_T", w.step_T},
                        {"nodes", w.nodes},
                        {"picard_iters", w.picard_iters},
                        {"t_halvings", w.t_halvings},
                        {"residual", w.residual},
                        {"node_doubling_delta", w.node_doubling_delta},
                        {"w_norm_end", w.w_norm_end},
                        {"fl1_end", w.fl1_end},
                        {"fl1_max", w.fl1_max},
                        {"diff_norms", w.diff_norms},
                        {"ratios", w.ratios}});
  }
  jt["windows"] = wins;

  CsvWriter csv(ctx.out_path("diagnostics.csv"),
                {"window", "t0", "step_T", "picard_iters", "t_halvings", "residual",
                 "node_doubling_delta", "w_norm_end", "fl1_end"});
  for (std::size_t i = 0; i < traj.windows.size(); ++i) {
    const auto& w = traj.windows[i];
    csv.row({static_cast<double>(i), w.t0, w.step_T, static_cast<double>(w.picard_iters),
             static_cast<double>(w.t_halvings), w.residual, w.node_doubling_delta, w.w_norm_end,
             w.fl1_end});
  }
  ctx.commit_csv(csv);
  for (std::size_t i = 0; i < traj.fields.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "field_%04zu.bin", i);
    ctx.write_snapshot(name, traj.fields[i]);
  }
  ctx.write_json_report("trajectory.json", jt);
  ctx.finish();
  return 0;
}

// ---------------------------------------------------------------------------
// propagate: free evolution snapshots at the requested times.

int cmd_propagate(const CommonOpts& opts) {
  RunContext ctx(opts, "propagate");
  const json& root = ctx.config;
  const GridSpec grid = grid_from(root);
  const HomogeneousSymbol sym = symbol_from(root, grid.d);
  SampledField f = datum_from(root, grid);
  const std::vector<double> ts = times_from(root, "times");
  if (ts.empty()) throw ConfigError("config /times: empty time list");
  for (double t : ts)
    if (t < 0) throw ConfigError("config /times: times must be nonnegative");

  MultiplierPropagator prop = MultiplierPropagator::make(sym, grid);
  std::vector<SampledField> outs;
  std::vector<double> l2s, sups;
  for (double t : ts) {
    bool alias = false;
    SampledField u = prop.apply(t, f, &alias);
    if (alias)
      throw QualityError("propagate: group displacement leaves the box at t = " + csv_num(t) +
                         "; enlarge L or reduce t");
    double s = 0;
    for (const cplx& z : u.values) s = std::max(s, std::abs(z));
    l2s.push_back(lp_norm(u, 2.0));
    sups.push_back(s);
    outs.push_back(std::move(u));
  }

  CsvWriter csv(ctx.out_path("propagate.csv"), {"t", "l2_norm", "sup_abs"});
  for (std::size_t i = 0; i < ts.size(); ++i) csv.row({ts[i], l2s[i], sups[i]});
  ctx.commit_csv(csv);
  for (std::size_t i = 0; i < outs.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "field_%04zu.bin", i);
    ctx.write_snapshot(name, outs[i]);
  }
  ctx.write_json_report("report.json", json{{"times", ts}});
  ctx.finish();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"phaselab: phase-space verification runs and dispersive solves"};
  app.require_subcommand(1);

  struct SubDef {
    const char* name;
    const char* help;
    int (*fn)(const CommonOpts&);
  };
  const SubDef defs[] = {
      {"fresnel-portrait", "phase-space portrait of a Fresnel function", cmd_fresnel_portrait},
      {"norms", "mixed-norm estimates of a field", cmd_norms},
      {"decay-scan", "dispersive decay norms over a time list", cmd_decay_scan},
      {"cone-check", "gradient-separation cone inequality", cmd_cone_check},
      {"potential-ft", "frequency samples and thresholds of a measure potential",
       cmd_potential_ft},
      {"solve", "Duhamel-Picard contraction solve", cmd_solve},
      {"propagate", "free-propagator snapshots", cmd_propagate},
  };

  std::vector<CommonOpts> opt_store(std::size(defs));
  std::vector<std::function<int()>> actions(std::size(defs));
  for (std::size_t i = 0; i < std::size(defs); ++i) {
    CLI::App* sub = app.add_subcommand(defs[i].name, defs[i].help);
    add_common(sub, opt_store[i]);
    const auto fn = defs[i].fn;
    const CommonOpts* o = &opt_store[i];
    sub->callback([fn, o] {
      int rc = fn(*o);
      if (rc != 0) throw CLI::RuntimeError(rc);
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return ConfigError::exit_code;
  } catch (const QualityError& e) {
    std::fprintf(stderr, "quality refusal: %s\n", e.what());
    return QualityError::exit_code;
  } catch (const ContractionError& e) {
    std::fprintf(stderr, "non-contraction: %s\n", e.what());
    return ContractionError::exit_code;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
