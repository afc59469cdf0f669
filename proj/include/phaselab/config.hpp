#pragma once
// JSON run-configuration parsing.  One document drives every subcommand:
//   {grid, symbol, window, potential, nonlinearity, mode, f, t_max, tolerances, ...}
// Parse errors carry line:column positions; schema errors carry the JSON
// pointer of the offending member.

#include <string>

#include <json.hpp>

#include "phaselab/io.hpp"
#include "phaselab/potentials.hpp"
#include "phaselab/solver.hpp"

namespace phaselab {

using json = nlohmann::ordered_json;

namespace cfgdetail {

inline std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return std::to_string(line) + ":" + std::to_string(col);
}

}  // namespace cfgdetail

inline json parse_config_text(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(origin + ":" + cfgdetail::line_col(text, e.byte) + ": " + e.what());
  }
}

inline json load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_config_text(text, path);
}

// ---------------------------------------------------------------------------
// Typed extractors.  `at` is the JSON pointer of the parent, used verbatim in
// error messages so a bad member is addressable.

inline const json& member(const json& j, const std::string& at, const std::string& key) {
  if (!j.is_object()) throw ConfigError("config " + at + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError("config " + at + "/" + key + ": missing required member");
  return *it;
}

inline double num_at(const json& j, const std::string& at, const std::string& key) {
  const json& v = member(j, at, key);
  if (!v.is_number()) throw ConfigError("config " + at + "/" + key + ": expected a number");
  return v.get<double>();
}

inline double num_or(const json& j, const std::string& at, const std::string& key, double dflt) {
  if (!j.is_object() || !j.contains(key)) return dflt;
  return num_at(j, at, key);
}

inline std::int64_t int_at(const json& j, const std::string& at, const std::string& key) {
  const json& v = member(j, at, key);
  if (!v.is_number_integer()) throw ConfigError("config " + at + "/" + key + ": expected an integer");
  return v.get<std::int64_t>();
}

inline std::int64_t int_or(const json& j, const std::string& at, const std::string& key,
                           std::int64_t dflt) {
  if (!j.is_object() || !j.contains(key)) return dflt;
  return int_at(j, at, key);
}

inline std::string str_at(const json& j, const std::string& at, const std::string& key) {
  const json& v = member(j, at, key);
  if (!v.is_string()) throw ConfigError("config " + at + "/" + key + ": expected a string");
  return v.get<std::string>();
}

inline std::string str_or(const json& j, const std::string& at, const std::string& key,
                          const std::string& dflt) {
  if (!j.is_object() || !j.contains(key)) return dflt;
  return str_at(j, at, key);
}

// A complex number is either a plain number (real) or a [re, im] pair.
inline cplx cplx_from(const json& v, const std::string& at) {
  if (v.is_number()) return cplx(v.get<double>(), 0.0);
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return cplx(v[0].get<double>(), v[1].get<double>());
  throw ConfigError("config " + at + ": expected a number or [re, im] pair");
}

inline Vec3 vec_from(const json& v, const std::string& at, int d) {
  if (!v.is_array() || static_cast<int>(v.size()) != d)
    throw ConfigError("config " + at + ": expected an array of " + std::to_string(d) +
                      " coordinates");
  Vec3 out{0, 0, 0};
  for (int a = 0; a < d; ++a) {
    if (!v[static_cast<std::size_t>(a)].is_number())
      throw ConfigError("config " + at + ": coordinates must be numbers");
    out[static_cast<std::size_t>(a)] = v[static_cast<std::size_t>(a)].get<double>();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Section builders.

inline GridSpec grid_from(const json& root) {
  const json& g = member(root, "", "grid");
  GridSpec spec;
  spec.d = static_cast<int>(int_at(g, "/grid", "d"));
  spec.N = static_cast<std::size_t>(int_at(g, "/grid", "N"));
  spec.L = num_at(g, "/grid", "L");
  spec.validate();
  return spec;
}

inline Window window_from(const json& root) {
  if (!root.contains("window")) return Window::gaussian(1.0);
  const json& w = root["window"];
  const std::string kind = str_at(w, "/window", "kind");
  if (kind == "gaussian") return Window::gaussian(num_or(w, "/window", "sigma", 1.0));
  if (kind == "bump") return Window::bump(num_or(w, "/window", "radius", 1.0));
  throw ConfigError("config /window/kind: unknown window '" + kind +
                    "' (expected gaussian or bump)");
}

inline HomogeneousSymbol symbol_from(const json& root, int d) {
  const json& s = member(root, "", "symbol");
  const std::string kind = str_or(s, "/symbol", "kind", "radial_power");
  if (kind == "radial_power") {
    return HomogeneousSymbol::radial_power(d, num_at(s, "/symbol", "m"));
  }
  if (kind == "quadratic_form") {
    const json& qa = member(s, "/symbol", "Q");
    if (!qa.is_array() || static_cast<int>(qa.size()) != d)
      throw ConfigError("config /symbol/Q: expected a " + std::to_string(d) + "x" +
                        std::to_string(d) + " row array");
    std::array<double, 9> Q{};
    for (int i = 0; i < d; ++i) {
      const json& row = qa[static_cast<std::size_t>(i)];
      if (!row.is_array() || static_cast<int>(row.size()) != d)
        throw ConfigError("config /symbol/Q: row " + std::to_string(i) + " must have " +
                          std::to_string(d) + " entries");
      for (int jx = 0; jx < d; ++jx)
        Q[static_cast<std::size_t>(i * 3 + jx)] = row[static_cast<std::size_t>(jx)].get<double>();
    }
    return HomogeneousSymbol::quadratic_form(d, Q);
  }
  if (kind == "anisotropic_power") {
    const json& sg = member(s, "/symbol", "signs");
    if (!sg.is_array() || static_cast<int>(sg.size()) != d)
      throw ConfigError("config /symbol/signs: expected " + std::to_string(d) + " entries");
    std::array<int, 3> signs{1, 1, 1};
    for (int a = 0; a < d; ++a) signs[static_cast<std::size_t>(a)] = sg[static_cast<std::size_t>(a)].get<int>();
    return HomogeneousSymbol::anisotropic_power(d, num_at(s, "/symbol", "m"), signs);
  }
  throw ConfigError("config /symbol/kind: unknown symbol '" + kind + "'");
}

inline Envelope envelope_from(const json& p) {
  if (!p.contains("envelope")) return Envelope::constant(1.0);
  const json& e = p["envelope"];
  const std::string kind = str_or(e, "/potential/envelope", "kind", "const");
  const double amp = num_or(e, "/potential/envelope", "amplitude", 1.0);
  if (kind == "const") return Envelope::constant(amp);
  if (kind == "sinusoid")
    return Envelope::sinusoid(amp, num_at(e, "/potential/envelope", "omega"),
                              num_or(e, "/potential/envelope", "phase", 0.0));
  throw ConfigError("config /potential/envelope/kind: unknown envelope '" + kind + "'");
}

inline Potential potential_from(const json& root, const GridSpec& grid) {
  const json& p = member(root, "", "potential");
  const std::string kind = str_at(p, "/potential", "kind");
  Potential pot;
  if (kind == "dirac_comb") {
    const json& pts = member(p, "/potential", "points");
    if (!pts.is_array() || pts.empty())
      throw ConfigError("config /potential/points: expected a non-empty array");
    std::vector<Vec3> points;
    for (std::size_t i = 0; i < pts.size(); ++i)
      points.push_back(vec_from(pts[i], "/potential/points/" + std::to_string(i), grid.d));
    std::vector<cplx> weights(points.size(), cplx(1, 0));
    if (p.contains("weights")) {
      const json& ws = p["weights"];
      if (!ws.is_array() || ws.size() != points.size())
        throw ConfigError("config /potential/weights: expected one weight per point");
      for (std::size_t i = 0; i < ws.size(); ++i)
        weights[i] = cplx_from(ws[i], "/potential/weights/" + std::to_string(i));
    }
    pot = Potential::dirac_comb(grid.d, points, weights);
  } else if (kind == "sphere_shell") {
    pot = Potential::sphere_shell(grid.d, num_at(p, "/potential", "radius"),
                                  num_or(p, "/potential", "mass", 1.0));
  } else if (kind == "cropped_coulomb") {
    pot = Potential::cropped_coulomb(grid.d, num_at(p, "/potential", "alpha"),
                                     num_or(p, "/potential", "crop_R", 1.0));
  } else if (kind == "zero") {
    pot = Potential::dirac_comb(grid.d, {Vec3{0, 0, 0}}, {cplx(0, 0)});
  } else {
    throw ConfigError("config /potential/kind: unknown potential '" + kind + "'");
  }
  pot.envelope = envelope_from(p);
  pot.validate();
  return pot;
}

inline Nonlinearity nonlinearity_from(const json& root) {
  if (!root.contains("nonlinearity")) return Nonlinearity::linear();
  const json& n = root["nonlinearity"];
  const std::string kind = str_or(n, "/nonlinearity", "kind", "linear");
  if (kind == "linear") return Nonlinearity::linear();
  if (kind == "power_abs")
    return Nonlinearity::power_abs(cplx_from(member(n, "/nonlinearity", "lambda"),
                                             "/nonlinearity/lambda"),
                                   static_cast<int>(int_at(n, "/nonlinearity", "k")));
  if (kind == "power")
    return Nonlinearity::power(cplx_from(member(n, "/nonlinearity", "lambda"),
                                         "/nonlinearity/lambda"),
                               static_cast<int>(int_at(n, "/nonlinearity", "k")));
  if (kind == "series") {
    const json& ts = member(n, "/nonlinearity", "terms");
    if (!ts.is_array() || ts.empty())
      throw ConfigError("config /nonlinearity/terms: expected a non-empty array");
    std::vector<SeriesTerm> terms;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const std::string at = "/nonlinearity/terms/" + std::to_string(i);
      SeriesTerm t;
      t.j = static_cast<int>(int_at(ts[i], at, "j"));
      t.l = static_cast<int>(int_at(ts[i], at, "l"));
      t.c = cplx_from(member(ts[i], at, "c"), at + "/c");
      terms.push_back(t);
    }
    return Nonlinearity::series(terms);
  }
  throw ConfigError("config /nonlinearity/kind: unknown nonlinearity '" + kind + "'");
}

inline RegularityMode mode_from(const json& root) {
  if (!root.contains("mode")) return RegularityMode::standard();
  const json& m = root["mode"];
  const std::string kind = str_or(m, "/mode", "kind", "standard");
  if (kind == "standard") return RegularityMode::standard();
  if (kind == "low_regularity") {
    double p;
    const json& pv = member(m, "/mode", "p");
    if (pv.is_string() && pv.get<std::string>() == "inf")
      p = kInf;
    else if (pv.is_number())
      p = pv.get<double>();
    else
      throw ConfigError("config /mode/p: expected a number or \"inf\"");
    return RegularityMode::low_regularity(p, num_at(m, "/mode", "q"));
  }
  throw ConfigError("config /mode/kind: unknown mode '" + kind + "'");
}

// Initial datum: a modulated Gaussian built on the grid, or a snapshot file.
inline SampledField datum_from(const json& root, const GridSpec& grid) {
  const json& f = member(root, "", "f");
  const std::string kind = str_or(f, "/f", "kind", "gaussian");
  if (kind == "file") {
    SampledField field = read_field(str_at(f, "/f", "path"));
    if (field.grid.d != grid.d || field.grid.N != grid.N || field.grid.L != grid.L)
      throw ConfigError("config /f/path: snapshot grid does not match /grid");
    if (field.domain != Domain::Space)
      throw ConfigError("config /f/path: datum snapshot must be a space-domain field");
    return field;
  }
  if (kind != "gaussian")
    throw ConfigError("config /f/kind: unknown datum '" + kind + "' (expected gaussian or file)");
  const double amp = num_or(f, "/f", "amplitude", 1.0);
  const double sigma = num_or(f, "/f", "sigma", 1.0);
  Vec3 center{0, 0, 0}, modulation{0, 0, 0};
  if (f.contains("center")) center = vec_from(f["center"], "/f/center", grid.d);
  if (f.contains("modulation")) modulation = vec_from(f["modulation"], "/f/modulation", grid.d);
  if (!(sigma > 0)) throw ConfigError("config /f/sigma: must be positive");
  SampledField field = make_field(grid, Domain::Space);
  for (std::size_t i = 0; i < field.values.size(); ++i) {
    const Vec3 x = grid_point(grid, Domain::Space, i);
    double r2 = 0, phase = 0;
    for (int a = 0; a < grid.d; ++a) {
      const double dx = x[static_cast<std::size_t>(a)] - center[static_cast<std::size_t>(a)];
      r2 += dx * dx;
      phase += modulation[static_cast<std::size_t>(a)] * x[static_cast<std::size_t>(a)];
    }
    field.values[i] = amp * std::exp(-M_PI * r2 / (sigma * sigma)) *
                      std::exp(cplx(0, 2 * M_PI * phase));
  }
  return field;
}

inline SolverConfig solver_config_from(const json& root) {
  SolverConfig cfg;
  cfg.grid = grid_from(root);
  cfg.symbol = symbol_from(root, cfg.grid.d);
  cfg.window = window_from(root);
  cfg.potential = potential_from(root, cfg.grid);
  cfg.nonlinearity = nonlinearity_from(root);
  cfg.mode = mode_from(root);
  cfg.f = datum_from(root, cfg.grid);
  cfg.R = num_or(root, "", "R", 1.0);
  cfg.t_max = num_or(root, "", "t_max", 0.0);
  cfg.quad_nodes = static_cast<std::size_t>(int_or(root, "", "quad_nodes", 16384));
  if (root.contains("tolerances")) {
    const json& t = root["tolerances"];
    cfg.tol = num_or(t, "/tolerances", "picard", 1e-10);
    cfg.max_picard = static_cast<int>(int_or(t, "/tolerances", "max_picard", 50));
  }
  cfg.c_prime_hint = num_or(root, "", "c_prime_hint", 0.0);
  cfg.a_w_hint = num_or(root, "", "a_w_hint", 0.0);
  cfg.v_bound_hint = num_or(root, "", "v_bound_hint", 0.0);
  cfg.validate();
  return cfg;
}

// Time list for scans: explicit array or log-spaced {start, stop, count}.
inline std::vector<double> times_from(const json& root, const std::string& key) {
  const json& t = member(root, "", key);
  std::vector<double> out;
  if (t.is_array()) {
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (!t[i].is_number())
        throw ConfigError("config /" + key + "/" + std::to_string(i) + ": expected a number");
      out.push_back(t[i].get<double>());
    }
    return out;
  }
  if (t.is_object()) {
    const double start = num_at(t, "/" + key, "start");
    const double stop = num_at(t, "/" + key, "stop");
    const std::int64_t count = int_at(t, "/" + key, "count");
    if (!(start > 0) || !(stop > start) || count < 1)
      throw ConfigError("config /" + key + ": need 0 < start < stop and count >= 1");
    if (count == 1) {
      out.push_back(start);
      return out;
    }
    for (std::int64_t i = 0; i < count; ++i)
      out.push_back(start * std::pow(stop / start,
                                     static_cast<double>(i) / static_cast<double>(count - 1)));
    return out;
  }
  throw ConfigError("config /" + key + ": expected an array or {start, stop, count}");
}

}  // namespace phaselab
