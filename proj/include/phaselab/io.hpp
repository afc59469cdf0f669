#pragma once
// File artifacts: deterministic CSV, binary field snapshots, FNV-1a digests,
// and the run manifest that ties a subcommand invocation to its outputs.

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include <json.hpp>

#include "phaselab/core.hpp"
#include "phaselab/grid.hpp"

namespace phaselab {

// ---------------------------------------------------------------------------
// Digests (FNV-1a 64-bit), used to fingerprint inputs/outputs in manifests.

inline std::uint64_t fnv1a64(const void* data, std::size_t n,
                             std::uint64_t seed = 1469598103934665603ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string digest_hex(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string digest_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("digest: cannot open " + path);
  std::uint64_t h = 1469598103934665603ull;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof(buf));
    const std::streamsize got = in.gcount();
    if (got > 0) h = fnv1a64(buf, static_cast<std::size_t>(got), h);
  }
  return digest_hex(h);
}

// ---------------------------------------------------------------------------
// Deterministic CSV: all numbers through %.17g so two runs with identical
// inputs produce identical bytes.

inline std::string csv_num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(std::string path, std::initializer_list<std::string> header) : path_(std::move(path)) {
    bool first = true;
    for (const auto& h : header) {
      if (!first) body_ += ',';
      body_ += h;
      first = false;
    }
    body_ += '\n';
    cols_ = header.size();
  }

  void row(const std::vector<double>& vals) {
    if (vals.size() != cols_)
      throw ConfigError("csv: row width " + std::to_string(vals.size()) + " != header width " +
                        std::to_string(cols_));
    for (std::size_t i = 0; i < vals.size(); ++i) {
      if (i) body_ += ',';
      body_ += csv_num(vals[i]);
    }
    body_ += '\n';
  }

  // Mixed row for label columns.
  void row_labeled(const std::string& label, const std::vector<double>& vals) {
    if (vals.size() + 1 != cols_)
      throw ConfigError("csv: labeled row width mismatch in " + path_);
    body_ += label;
    for (double v : vals) {
      body_ += ',';
      body_ += csv_num(v);
    }
    body_ += '\n';
  }

  // Writes the whole file at once; no partial output on earlier failure.
  void commit() {
    std::ofstream out(path_, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("csv: cannot open " + path_ + " for writing");
    out.write(body_.data(), static_cast<std::streamsize>(body_.size()));
    if (!out) throw ConfigError("csv: short write to " + path_);
  }

  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::string body_;
  std::size_t cols_ = 0;
};

// ---------------------------------------------------------------------------
// Binary field snapshots.
// Layout: magic "PLF1", uint32 d, uint32 N (per axis), float64 L,
// uint32 domain (0 space / 1 frequency), then N^d interleaved (re, im)
// float64 pairs in row-major axis order.  Little-endian host assumed.

namespace detail {

template <typename T>
void put_raw(std::string& s, const T& v) {
  const char* p = reinterpret_cast<const char*>(&v);
  s.append(p, sizeof(T));
}

template <typename T>
T get_raw(std::ifstream& in, const char* what) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw ConfigError(std::string("field read: truncated ") + what);
  return v;
}

}  // namespace detail

inline void write_field(const std::string& path, const SampledField& f) {
  f.validate();
  std::string body;
  body.reserve(20 + 16 * f.values.size());
  body += "PLF1";
  detail::put_raw(body, static_cast<std::uint32_t>(f.grid.d));
  detail::put_raw(body, static_cast<std::uint32_t>(f.grid.N));
  detail::put_raw(body, f.grid.L);
  detail::put_raw(body, static_cast<std::uint32_t>(f.domain == Domain::Space ? 0 : 1));
  for (const cplx& z : f.values) {
    detail::put_raw(body, z.real());
    detail::put_raw(body, z.imag());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("field write: cannot open " + path);
  out.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!out) throw ConfigError("field write: short write to " + path);
}

inline SampledField read_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("field read: cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "PLF1", 4) != 0)
    throw ConfigError("field read: " + path + " is not a field snapshot (bad magic)");
  GridSpec g;
  g.d = static_cast<int>(detail::get_raw<std::uint32_t>(in, "dimension"));
  g.N = detail::get_raw<std::uint32_t>(in, "sample count");
  g.L = detail::get_raw<double>(in, "side length");
  const std::uint32_t dom = detail::get_raw<std::uint32_t>(in, "domain tag");
  if (dom > 1) throw ConfigError("field read: bad domain tag in " + path);
  g.validate();
  SampledField f = make_field(g, dom == 0 ? Domain::Space : Domain::Frequency);
  for (cplx& z : f.values) {
    const double re = detail::get_raw<double>(in, "sample");
    const double im = detail::get_raw<double>(in, "sample");
    z = cplx(re, im);
  }
  return f;
}

// ---------------------------------------------------------------------------
// Run manifest.

struct RunManifest {
  std::string subcommand;
  std::string version = kVersion;
  nlohmann::ordered_json resolved_config;
  double wall_seconds = 0;
  std::vector<std::pair<std::string, std::string>> inputs;   // path, digest
  std::vector<std::pair<std::string, std::string>> outputs;  // path, digest

  void note_output(const std::string& path) { outputs.emplace_back(path, digest_file(path)); }
  void note_input(const std::string& path) { inputs.emplace_back(path, digest_file(path)); }
};

inline void write_manifest(const std::string& path, const RunManifest& man) {
  nlohmann::ordered_json j;
  j["subcommand"] = man.subcommand;
  j["version"] = man.version;
  j["config"] = man.resolved_config;
  j["wall_seconds"] = man.wall_seconds;
  auto list = [](const std::vector<std::pair<std::string, std::string>>& v) {
    nlohmann::ordered_json a = nlohmann::ordered_json::array();
    for (const auto& [p, d] : v) a.push_back({{"path", p}, {"fnv1a64", d}});
    return a;
  };
  j["inputs"] = list(man.inputs);
  j["outputs"] = list(man.outputs);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("manifest: cannot open " + path);
  const std::string body = j.dump(2) + "\n";
  out.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!out) throw ConfigError("manifest: short write to " + path);
}

inline void ensure_dir(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) throw ConfigError("out-dir: cannot create " + path + ": " + ec.message());
}

}  // namespace phaselab
