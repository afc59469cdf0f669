#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "phaselab/config.hpp"
#include "phaselab/io.hpp"
#include "support/common.hpp"

using namespace phaselab;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  fs::path p = fs::temp_directory_path() / "phaselab_io_tests";
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("config parser reports line and column on bad syntax", "[config]") {
  const std::string text = "{\n  \"grid\": {\"d\": 1,}\n}";
  try {
    parse_config_text(text, "bad.json");
    FAIL("expected a parse failure");
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    CHECK(what.find("bad.json:2:") != std::string::npos);
  }
}

TEST_CASE("schema extraction errors carry the json pointer", "[config]") {
  json root = parse_config_text(R"({"grid": {"d": 1, "N": 64}})", "inline");
  try {
    grid_from(root);
    FAIL("expected a missing-member failure");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("/grid/L") != std::string::npos);
  }
}

TEST_CASE("full solver configs resolve to typed objects", "[config]") {
  json root = parse_config_text(R"({
    "grid": {"d": 1, "N": 64, "L": 8.0},
    "symbol": {"kind": "radial_power", "m": 4.0},
    "window": {"kind": "gaussian", "sigma": 1.0},
    "potential": {"kind": "dirac_comb", "points": [[0.0]],
                  "envelope": {"kind": "sinusoid", "amplitude": [0.0, 1.0], "omega": 3.0}},
    "nonlinearity": {"kind": "series", "terms": [{"j": 2, "l": 1, "c": [0.5, 0.0]}]},
    "mode": {"kind": "low_regularity", "p": "inf", "q": 1.0},
    "f": {"kind": "gaussian", "sigma": 1.0, "amplitude": 1.0},
    "R": 2.5,
    "quad_nodes": 512,
    "tolerances": {"picard": 1e-9, "max_picard": 40}
  })", "inline");
  SolverConfig cfg = solver_config_from(root);
  CHECK(cfg.grid.N == 64);
  CHECK(cfg.symbol.m == 4.0);
  CHECK(cfg.potential.kind == Potential::Kind::DiracComb);
  CHECK(cfg.potential.envelope.kind == Envelope::Kind::Sinusoid);
  CHECK(cfg.potential.envelope.amplitude == cplx(0.0, 1.0));
  CHECK(cfg.nonlinearity.kind == Nonlinearity::Kind::Series);
  CHECK(cfg.mode.low);
  CHECK(std::isinf(cfg.mode.p));
  CHECK(cfg.R == 2.5);
  CHECK(cfg.quad_nodes == 512);
  CHECK(cfg.tol == 1e-9);
  CHECK(cfg.max_picard == 40);
}

TEST_CASE("config rejections name the offending member", "[config]") {
  auto expect_mention = [](const std::string& text, const std::string& needle) {
    json root = parse_config_text(text, "inline");
    try {
      solver_config_from(root);
      FAIL("expected rejection mentioning " << needle);
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  expect_mention(R"({"grid": {"d": 1, "N": 64, "L": 8.0},
                     "symbol": {"kind": "radial_power", "m": 4.0},
                     "potential": {"kind": "nosuch"},
                     "f": {"kind": "gaussian"}})",
                 "potential");
  expect_mention(R"({"grid": {"d": 1, "N": 64, "L": 8.0},
                     "symbol": {"kind": "quadratic_form"},
                     "potential": {"kind": "zero"},
                     "f": {"kind": "gaussian"}})",
                 "symbol");
}

TEST_CASE("time lists accept explicit arrays and log ranges", "[config]") {
  json a = parse_config_text(R"({"times": [0.1, 0.2, 0.4]})", "inline");
  auto ta = times_from(a, "times");
  REQUIRE(ta.size() == 3);
  CHECK(ta[1] == 0.2);

  json b = parse_config_text(R"({"times": {"start": 0.01, "stop": 0.1, "count": 3}})", "inline");
  auto tb = times_from(b, "times");
  REQUIRE(tb.size() == 3);
  CHECK(tb[0] == Catch::Approx(0.01));
  CHECK(tb[1] == Catch::Approx(std::sqrt(0.01 * 0.1)));  // log-spaced midpoint
  CHECK(tb[2] == Catch::Approx(0.1));
}

TEST_CASE("field snapshots roundtrip bit-exactly", "[io]") {
  GridSpec g{2, 16, 4.0};
  SampledField f = make_field(g, Domain::Frequency);
  SplitMix64 rng{29};
  for (auto& v : f.values) v = rng.cnormal();

  const fs::path p = scratch_dir() / "snap.bin";
  write_field(p.string(), f);
  SampledField back = read_field(p.string());
  CHECK(back.grid == g);
  CHECK(back.domain == Domain::Frequency);
  REQUIRE(back.values.size() == f.values.size());
  CHECK(phaselab::testing::max_abs_diff(back.values, f.values) == 0.0);

  // corrupting the magic must be detected
  std::fstream fsr(p, std::ios::in | std::ios::out | std::ios::binary);
  fsr.put('X');
  fsr.close();
  CHECK_THROWS_AS(read_field(p.string()), ConfigError);
}

TEST_CASE("csv writer emits identical bytes for identical rows", "[io]") {
  auto write_once = [](const fs::path& p) {
    CsvWriter w(p.string(), {"t", "value"});
    for (int i = 0; i < 20; ++i)
      w.row({0.1 * i, std::sin(0.1 * i) * 1e-7});
    w.commit();
  };
  const fs::path a = scratch_dir() / "a.csv";
  const fs::path b = scratch_dir() / "b.csv";
  write_once(a);
  write_once(b);
  CHECK(digest_file(a.string()) == digest_file(b.string()));

  std::ifstream in(a);
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,value");
}

TEST_CASE("manifests record configuration and artifact digests", "[io]") {
  RunManifest m;
  m.subcommand = "probe";
  m.resolved_config = json{{"grid", {{"d", 1}}}};
  m.wall_seconds = 0.25;
  const fs::path art = scratch_dir() / "art.csv";
  {
    CsvWriter w(art.string(), {"x"});
    w.row({1.0});
    w.commit();
  }
  m.note_output(art.string());
  const fs::path mp = scratch_dir() / "manifest.json";
  write_manifest(mp.string(), m);

  json back = load_config(mp.string());
  CHECK(back["subcommand"] == "probe");
  CHECK(back["version"] == std::string(kVersion));
  REQUIRE(back["outputs"].size() == 1);
  CHECK(back["outputs"][0]["fnv1a64"] == digest_file(art.string()));
}

TEST_CASE("digests are order-sensitive and stable", "[io]") {
  const std::string s1 = "abc", s2 = "acb";
  CHECK(fnv1a64(s1.data(), s1.size()) != fnv1a64(s2.data(), s2.size()));
  CHECK(digest_hex(fnv1a64(s1.data(), s1.size())) ==
        digest_hex(fnv1a64(s1.data(), s1.size())));
}
