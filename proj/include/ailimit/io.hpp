#pragma once

// File formats: CSV tables for masks, scans and branches; binary PGM/PPM
// heatmaps; a JSON run manifest; flat key=value run configs.

#include <algorithm>
#include <array>
#include <chrono>
#include <climits>
#include <cstdint>
#include <cstdlib>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "ailimit/continuation.hpp"
#include "ailimit/error.hpp"
#include "ailimit/regions.hpp"
#include "ailimit/scan.hpp"

namespace ailimit::io {

inline constexpr int kSchemaVersion = 1;
inline constexpr std::string_view kToolVersion = "1.0.0";

/// Shortest decimal form that reads back to the same double.
inline std::string fmt(double v) {
  char buf[32];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, std::string_view data) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw Error(Errc::io_error, "cannot create " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_error, "cannot write " + path.string());
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw Error(Errc::io_error, "write failed for " + path.string());
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

namespace detail {

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t k = s.find(sep, start);
    out.emplace_back(s.substr(start, k == std::string_view::npos ? std::string_view::npos : k - start));
    if (k == std::string_view::npos) return out;
    start = k + 1;
  }
}

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline double to_double(const std::string& s, std::string_view what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw Error(Errc::parse_error, "bad number '" + s + "' for " + std::string(what));
  }
}

inline int to_int(const std::string& s, std::string_view what) {
  try {
    std::size_t used = 0;
    const long v = std::stol(s, &used);
    if (used != s.size() || v < INT32_MIN || v > INT32_MAX) throw std::invalid_argument("bad");
    return static_cast<int>(v);
  } catch (const std::exception&) {
    throw Error(Errc::parse_error, "bad integer '" + s + "' for " + std::string(what));
  }
}

}  // namespace detail

// ---------------------------------------------------------------- config

/// Flat key=value file; '#' starts a comment, blank lines are skipped.
using RunConfig = std::map<std::string, std::string>;

inline RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  int line_no = 0;
  for (const std::string& raw : detail::split(text, '\n')) {
    ++line_no;
    std::string line = raw.substr(0, raw.find('#'));
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(Errc::parse_error, "config line " + std::to_string(line_no) + " lacks '='");
    }
    std::string key = detail::trim(std::string_view(line).substr(0, eq));
    if (key.empty()) throw Error(Errc::parse_error, "config line " + std::to_string(line_no) + " has an empty key");
    cfg[key] = detail::trim(std::string_view(line).substr(eq + 1));
  }
  return cfg;
}

/// Either a key=value file or a run manifest (its "config" object), so a
/// manifest can be fed straight back to --config.
inline RunConfig load_config(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos || text[first] != '{') return parse_config(text);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::parse_error, path.string() + ": " + e.what());
  }
  if (!j.contains("config") || !j["config"].is_object()) {
    throw Error(Errc::parse_error, path.string() + ": manifest has no config object");
  }
  RunConfig cfg;
  for (const auto& [k, v] : j["config"].items()) {
    if (!v.is_string()) throw Error(Errc::parse_error, path.string() + ": config value for '" + k + "' is not a string");
    cfg[k] = v.get<std::string>();
  }
  return cfg;
}

inline std::string format_config(const RunConfig& cfg) {
  std::string out;
  for (const auto& [k, v] : cfg) out += k + " = " + v + "\n";
  return out;
}

/// "min:max:n" as used by grid flags.
struct AxisSpec {
  double min;
  double max;
  int n;
};

inline AxisSpec parse_axis(std::string_view text) {
  const auto parts = detail::split(text, ':');
  if (parts.size() != 3) throw Error(Errc::parse_error, "axis must be min:max:n, got '" + std::string(text) + "'");
  return {detail::to_double(parts[0], "axis min"), detail::to_double(parts[1], "axis max"),
          detail::to_int(parts[2], "axis count")};
}

/// "rmin:rmax:nr,cmin:cmax:nc".
inline ParamGrid parse_param_grid(std::string_view text) {
  const auto axes = detail::split(text, ',');
  if (axes.size() != 2) throw Error(Errc::parse_error, "grid must be rmin:rmax:nr,cmin:cmax:nc");
  const AxisSpec r = parse_axis(axes[0]), c = parse_axis(axes[1]);
  ParamGrid g{r.min, r.max, c.min, c.max, r.n, c.n};
  try {
    g.validate();
  } catch (const Error& e) {
    throw Error(Errc::parse_error, e.what());
  }
  return g;
}

/// "amin:amax:na,rmin:rmax:nr".
inline ScanGrid parse_scan_grid(std::string_view text) {
  const auto axes = detail::split(text, ',');
  if (axes.size() != 2) throw Error(Errc::parse_error, "scan grid must be amin:amax:na,rmin:rmax:nr");
  const AxisSpec a = parse_axis(axes[0]), r = parse_axis(axes[1]);
  ScanGrid g{a.min, a.max, a.n, r.min, r.max, r.n};
  try {
    g.validate();
  } catch (const Error& e) {
    throw Error(Errc::parse_error, e.what());
  }
  return g;
}

inline State3 parse_state(std::string_view text) {
  const auto parts = detail::split(text, ',');
  if (parts.size() != 3) throw Error(Errc::parse_error, "state must be x,y,z");
  return {detail::to_double(detail::trim(parts[0]), "x"), detail::to_double(detail::trim(parts[1]), "y"),
          detail::to_double(detail::trim(parts[2]), "z")};
}

inline std::string grid_string(const ParamGrid& g) {
  return fmt(g.r_min) + ":" + fmt(g.r_max) + ":" + std::to_string(g.nr) + "," + fmt(g.c_min) + ":" +
         fmt(g.c_max) + ":" + std::to_string(g.nc);
}

inline std::string grid_string(const ScanGrid& g) {
  return fmt(g.alpha_min) + ":" + fmt(g.alpha_max) + ":" + std::to_string(g.n_alpha) + "," + fmt(g.r_min) + ":" +
         fmt(g.r_max) + ":" + std::to_string(g.n_r);
}

// ---------------------------------------------------------------- masks

/// Grid metadata written next to a mask.
inline nlohmann::json mask_metadata(const RegionMask& m) {
  return {{"schema_version", kSchemaVersion},
          {"r_min", m.grid.r_min},
          {"r_max", m.grid.r_max},
          {"nr", m.grid.nr},
          {"c_min", m.grid.c_min},
          {"c_max", m.grid.c_max},
          {"nc", m.grid.nc},
          {"direction", to_string(m.direction)},
          {"analytic", m.analytic},
          {"layout", "r-major, label 0 = outside, k > 0 = smallest certifying n"}};
}

inline std::string mask_csv(const RegionMask& m) {
  std::string out = "r,c,label,direction\n";
  const std::string dir(to_string(m.direction));
  for (int i = 0; i < m.grid.nr; ++i) {
    for (int j = 0; j < m.grid.nc; ++j) {
      out += fmt(m.grid.r_at(i)) + "," + fmt(m.grid.c_at(j)) + "," + std::to_string(m.label(i, j)) + "," + dir + "\n";
    }
  }
  return out;
}

/// Reads a mask written by mask_csv. Rows must be r-major; the grid is
/// recovered from the first and last coordinates and the row count.
inline RegionMask parse_mask_csv(std::string_view text) {
  auto lines = detail::split(text, '\n');
  while (!lines.empty() && detail::trim(lines.back()).empty()) lines.pop_back();
  if (lines.empty() || detail::trim(lines[0]) != "r,c,label,direction") {
    throw Error(Errc::parse_error, "mask CSV header must be r,c,label,direction");
  }
  std::vector<double> rs, cs;
  RegionMask m;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto f = detail::split(detail::trim(lines[k]), ',');
    if (f.size() != 4) throw Error(Errc::parse_error, "mask CSV row " + std::to_string(k) + " needs 4 fields");
    rs.push_back(detail::to_double(f[0], "r"));
    cs.push_back(detail::to_double(f[1], "c"));
    m.labels.push_back(detail::to_int(f[2], "label"));
    const Direction d = parse_direction(f[3]);
    if (k == 1) m.direction = d;
    else if (d != m.direction) throw Error(Errc::parse_error, "mask CSV mixes directions");
  }
  if (rs.empty()) throw Error(Errc::parse_error, "mask CSV has no rows");
  std::size_t nc = 1;
  while (nc < rs.size() && rs[nc] == rs[0]) ++nc;
  if (rs.size() % nc != 0) throw Error(Errc::parse_error, "mask CSV is not a full r-major lattice");
  const std::size_t nr = rs.size() / nc;
  m.grid = ParamGrid{rs.front(), rs.back(), cs.front(), cs[nc - 1], static_cast<int>(nr), static_cast<int>(nc)};
  try {
    m.grid.validate();
  } catch (const Error& e) {
    throw Error(Errc::parse_error, std::string("mask CSV grid: ") + e.what());
  }
  for (std::size_t i = 0; i < nr; ++i) {
    for (std::size_t j = 0; j < nc; ++j) {
      const std::size_t k = i * nc + j;
      if (rs[k] != rs[i * nc] || cs[k] != cs[j]) throw Error(Errc::parse_error, "mask CSV is not a regular lattice");
    }
  }
  return m;
}

inline RegionMask load_mask(const std::filesystem::path& path) { return parse_mask_csv(read_file(path)); }

/// Grayscale image, r along x, c upward: label 0 is white, larger labels
/// darker.
inline std::string mask_pgm(const RegionMask& m) {
  const int w = m.grid.nr, h = m.grid.nc;
  int top = 1;
  for (int l : m.labels) top = std::max(top, l);
  std::string out = "P5\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  for (int row = 0; row < h; ++row) {
    const int j = h - 1 - row;
    for (int i = 0; i < w; ++i) {
      const int l = m.label(i, j);
      const int g = l <= 0 ? 255 : 200 - (180 * (l - 1)) / std::max(top - 1, 1);
      out.push_back(static_cast<char>(g));
    }
  }
  return out;
}

// ---------------------------------------------------------------- palette

using Rgb = std::array<std::uint8_t, 3>;

struct Palette {
  int version = 0;
  std::map<std::string, Rgb> colors;

  Rgb color(const ScanCell& cell) const {
    std::string key(to_string(cell.classification));
    if (cell.classification == CellClass::Periodic && cell.period) {
      const std::string p = std::to_string(*cell.period);
      if (colors.count(p)) key = p;
    }
    const auto it = colors.find(key);
    if (it == colors.end()) throw Error(Errc::invalid_argument, "palette lacks an entry for " + key);
    return it->second;
  }
  friend bool operator==(const Palette&, const Palette&) = default;
};

inline constexpr std::string_view kBuiltinPaletteV1 =
    "version 1\n"
    "Diverged 255 255 255\n"
    "Regular 0 0 0\n"
    "Chaotic 128 128 128\n"
    "1 31 119 180\n"
    "2 255 127 14\n"
    "3 44 160 44\n"
    "4 214 39 40\n"
    "5 0 100 0\n"
    "6 148 103 189\n"
    "7 140 86 75\n"
    "8 227 119 194\n"
    "9 188 189 34\n"
    "10 23 190 207\n"
    "11 174 199 232\n"
    "12 255 187 120\n"
    "13 152 223 138\n"
    "14 255 152 150\n"
    "15 197 176 213\n"
    "16 196 156 148\n"
    "Periodic 99 99 99\n";

inline Palette parse_palette(std::string_view text) {
  Palette p;
  for (const std::string& raw : detail::split(text, '\n')) {
    const std::string line = detail::trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    if (key == "version") {
      if (!(ss >> p.version)) throw Error(Errc::parse_error, "bad palette version");
      continue;
    }
    int r, g, b;
    if (!(ss >> r >> g >> b) || r < 0 || r > 255 || g < 0 || g > 255 || b < 0 || b > 255) {
      throw Error(Errc::parse_error, "bad palette line '" + line + "'");
    }
    p.colors[key] = Rgb{static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g), static_cast<std::uint8_t>(b)};
  }
  for (const char* k : {"Diverged", "Regular", "Chaotic", "Periodic"}) {
    if (!p.colors.count(k)) throw Error(Errc::parse_error, std::string("palette lacks ") + k);
  }
  return p;
}

inline const Palette& builtin_palette() {
  static const Palette p = parse_palette(kBuiltinPaletteV1);
  return p;
}

// ---------------------------------------------------------------- scans

inline std::string scan_csv(const ScanResult& s) {
  std::string out = "alpha,r,class,period,lyapunov\n";
  for (int j = 0; j < s.grid.n_r; ++j) {
    for (int i = 0; i < s.grid.n_alpha; ++i) {
      const ScanCell& c = s.at(i, j);
      out += fmt(s.grid.alpha_at(i)) + "," + fmt(s.grid.r_at(j)) + "," + std::string(to_string(c.classification)) +
             "," + (c.period ? std::to_string(*c.period) : "") + "," + (c.lyapunov ? fmt(*c.lyapunov) : "") + "\n";
    }
  }
  return out;
}

/// Alpha along x, r upward.
inline std::string scan_ppm(const ScanResult& s, const Palette& palette) {
  const int w = s.grid.n_alpha, h = s.grid.n_r;
  std::string out = "P6\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  for (int row = 0; row < h; ++row) {
    for (int i = 0; i < w; ++i) {
      const Rgb c = palette.color(s.at(i, h - 1 - row));
      out.append(reinterpret_cast<const char*>(c.data()), 3);
    }
  }
  return out;
}

// ---------------------------------------------------------------- branches

inline std::string branch_csv(const Branch& b) {
  const Eigen::Index n = b.points.empty() ? 0 : b.points.front().state.period();
  std::string out = "k,epsilon,alpha,residual,step_len";
  for (Eigen::Index t = 0; t < n; ++t) out += ",xi_" + std::to_string(t);
  out += "\n";
  for (std::size_t k = 0; k < b.points.size(); ++k) {
    const BranchPoint& p = b.points[k];
    const double eps = p.state.epsilon;
    const std::string alpha = eps > 0.0 ? fmt(-1.0 / (eps * eps)) : "-inf";
    out += std::to_string(k) + "," + fmt(eps) + "," + alpha + "," + fmt(p.residual_norm) + "," + fmt(p.step_len);
    for (Eigen::Index t = 0; t < n; ++t) out += "," + fmt(p.state.xi(t));
    out += "\n";
  }
  return out;
}

inline nlohmann::json branch_summary(const Branch& b) {
  nlohmann::json tps = nlohmann::json::array();
  for (const TurningPoint& t : detect_turning_points(b)) tps.push_back({{"epsilon", t.epsilon}, {"alpha", t.alpha}});
  return {{"symbols", b.symbols.str()},
          {"period", b.symbols.size()},
          {"termination", std::string(to_string(b.termination))},
          {"points", b.points.size()},
          {"max_epsilon", b.max_epsilon()},
          {"turning_points", tps},
          {"log", b.log}};
}

// ---------------------------------------------------------------- manifest

/// Collects output files and writes manifest.json next to them: the command,
/// the resolved configuration, schema and tool versions, wall time and an
/// FNV-1a hash of every artifact.
class RunWriter {
 public:
  RunWriter(std::filesystem::path dir, std::string command, RunConfig resolved)
      : dir_(std::move(dir)), command_(std::move(command)), config_(std::move(resolved)),
        start_(std::chrono::steady_clock::now()) {}

  const std::filesystem::path& dir() const { return dir_; }

  void add(const std::string& name, std::string_view data) {
    write_file(dir_ / name, data);
    files_.push_back({name, hex64(fnv1a(data)), data.size()});
  }

  void add_json(const std::string& name, const nlohmann::json& j) { add(name, j.dump(2) + "\n"); }

  /// The config alone, re-runnable with --config.
  void add_config() { add("config.txt", format_config(config_)); }

  void finish() {
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    nlohmann::json files = nlohmann::json::array();
    std::string combined;
    for (const auto& f : files_) {
      files.push_back({{"name", f.name}, {"fnv1a64", f.hash}, {"bytes", f.bytes}});
      combined += f.name + ":" + f.hash + "\n";
    }
    const nlohmann::json manifest{{"command", command_},
                                  {"schema_version", kSchemaVersion},
                                  {"tool_version", std::string(kToolVersion)},
                                  {"config", config_},
                                  {"wall_time_s", wall},
                                  {"files", files},
                                  {"content_hash", hex64(fnv1a(combined))}};
    write_file(dir_ / "manifest.json", manifest.dump(2) + "\n");
  }

 private:
  struct FileEntry {
    std::string name;
    std::string hash;
    std::size_t bytes;
  };
  std::filesystem::path dir_;
  std::string command_;
  RunConfig config_;
  std::chrono::steady_clock::time_point start_;
  std::vector<FileEntry> files_;
};

}  // namespace ailimit::io
