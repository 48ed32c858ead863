#ifndef PMCF_IO_HPP
#define PMCF_IO_HPP

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "pmcf/evolution.hpp"

namespace pmcf {

/// Decimal (never exponent) notation with `sig` significant digits.
inline std::string format_fixed(double v, int sig = 12) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  int decimals = sig - 1;
  if (v != 0.0) decimals = sig - 1 - static_cast<int>(std::floor(std::log10(std::abs(v))));
  if (decimals < 0) decimals = 0;
  char buf[512];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

/// Scientific notation with 4 significant digits, used for all console numbers.
inline std::string format_sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

inline const char* kCsvHeader = "t,err_l2,err_h1semi,err_h1,sigma_max,area,cpu_s";

inline std::string csv_row(const DiagnosticsRecord& r) {
  std::string s;
  for (double v : {r.t, r.err_l2, r.err_h1semi, r.err_h1, r.sigma_max, r.area, r.cpu_s}) {
    if (!s.empty()) s += ',';
    s += format_fixed(v);
  }
  return s;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream f(path);
  if (!f) throw Error(ErrorKind::IoError, "cannot open " + path.string() + " for writing");
  f.precision(17);
  return f;
}

/// Streaming CSV writer: header on construction, one row per record.
class DiagnosticsCsv {
 public:
  explicit DiagnosticsCsv(const std::filesystem::path& path) : f_(open_output(path)) { f_ << kCsvHeader << '\n'; }
  void append(const DiagnosticsRecord& r) {
    f_ << csv_row(r) << '\n';
    if (!f_) throw Error(ErrorKind::IoError, "write failed");
  }

 private:
  std::ofstream f_;
};

inline void write_csv(const std::filesystem::path& path, const std::vector<DiagnosticsRecord>& records) {
  DiagnosticsCsv csv(path);
  for (const auto& r : records) csv.append(r);
}

inline std::vector<DiagnosticsRecord> read_csv(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::string line;
  std::getline(f, line);
  if (line != kCsvHeader) throw Error(ErrorKind::IoError, "unexpected CSV header in " + path.string());
  std::vector<DiagnosticsRecord> out;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    double v[7];
    for (int i = 0; i < 7; ++i) {
      if (!std::getline(ss, cell, ',')) throw Error(ErrorKind::IoError, "short CSV row");
      v[i] = std::stod(cell);
    }
    out.push_back({v[0], v[1], v[2], v[3], v[4], v[5], v[6]});
  }
  return out;
}

/// Legacy ASCII POLYDATA of the mapped vertex triangles.
inline void write_vtk(const std::filesystem::path& path, const FeVectorField& x, const PolyhedralMesh& mesh,
                      double t) {
  std::ofstream f = open_output(path);
  f << "# vtk DataFile Version 3.0\n";
  f << "pmcf surface t=" << format_fixed(t) << "\n";
  f << "ASCII\nDATASET POLYDATA\n";
  f << "POINTS " << mesh.num_vertices() << " double\n";
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    const Vec3 p = x.node(i);
    f << p[0] << ' ' << p[1] << ' ' << p[2] << '\n';
  }
  const int nt = mesh.num_triangles();
  f << "POLYGONS " << nt << ' ' << 4 * nt << '\n';
  for (const Triangle& tri : mesh.triangles()) f << "3 " << tri[0] << ' ' << tri[1] << ' ' << tri[2] << '\n';
  if (!f) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

inline std::string snapshot_name(int step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "mesh_%06d.vtk", step);
  return buf;
}

// ---- config files ----

inline std::map<std::string, std::string> parse_key_values(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::InvalidConfig, "line " + std::to_string(lineno) + ": expected key=value");
    }
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

namespace detail {
inline double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos == v.size()) return d;
  } catch (const std::exception&) {
  }
  throw Error(ErrorKind::InvalidConfig, key + ": not a number: " + v);
}
inline int to_int(const std::string& key, const std::string& v) {
  const double d = to_double(key, v);
  if (d != std::floor(d)) throw Error(ErrorKind::InvalidConfig, key + ": not an integer: " + v);
  return static_cast<int>(d);
}
}  // namespace detail

/// Applies one key=value setting. Keys follow RunConfig field names;
/// `order` (1 = euler, 2 = midpoint) is accepted as an alias for `scheme`.
inline void apply_setting(RunConfig& c, const std::string& key, const std::string& v) {
  using detail::to_double;
  using detail::to_int;
  if (key == "surface") {
    if (v == "sphere") c.surface = InitialSurface::Sphere;
    else if (v == "dumbbell") c.surface = InitialSurface::Dumbbell;
    else throw Error(ErrorKind::InvalidConfig, "surface must be sphere or dumbbell");
  } else if (key == "r0") c.r0 = to_double(key, v);
  else if (key == "alpha") c.alpha = to_double(key, v);
  else if (key == "tau") c.tau = to_double(key, v);
  else if (key == "T") c.T = to_double(key, v);
  else if (key == "level") c.level = to_int(key, v);
  else if (key == "k") c.k = to_int(key, v);
  else if (key == "scheme" || key == "order") {
    if (v == "euler" || v == "1") c.scheme = Scheme::Euler;
    else if (v == "midpoint" || v == "2") c.scheme = Scheme::Midpoint;
    else throw Error(ErrorKind::InvalidConfig, "scheme must be euler/1 or midpoint/2");
  } else if (key == "mode") {
    if (v == "lifted") c.mode = GeometryMode::Lifted;
    else if (v == "simplified") c.mode = GeometryMode::Simplified;
    else throw Error(ErrorKind::InvalidConfig, "mode must be lifted or simplified");
  } else if (key == "quad_assembly") c.quad_assembly = to_int(key, v);
  else if (key == "quad_error") c.quad_error = to_int(key, v);
  else if (key == "out") c.out = v;
  else if (key == "snapshot_every") c.snapshot_every = to_int(key, v);
  else if (key == "solver_tol") c.solver_tol = to_double(key, v);
  else throw Error(ErrorKind::InvalidConfig, "unknown config key: " + key);
}

inline RunConfig parse_config(std::istream& in, RunConfig base = {}) {
  for (const auto& [k, v] : parse_key_values(in)) apply_setting(base, k, v);
  return base;
}

inline RunConfig load_config(const std::filesystem::path& path, RunConfig base = {}) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::IoError, "cannot open config " + path.string());
  return parse_config(f, base);
}

/// Round-trippable echo: feeding this text back to parse_config reproduces `c`.
inline std::string config_text(const RunConfig& c) {
  std::ostringstream s;
  s.precision(17);
  s << "surface=" << to_string(c.surface) << '\n'
    << "r0=" << c.r0 << '\n'
    << "alpha=" << c.alpha << '\n'
    << "tau=" << c.tau << '\n'
    << "T=" << c.T << '\n'
    << "level=" << c.level << '\n'
    << "k=" << c.k << '\n'
    << "scheme=" << to_string(c.scheme) << '\n'
    << "mode=" << (c.mode == GeometryMode::Lifted ? "lifted" : "simplified") << '\n'
    << "quad_assembly=" << c.quad_assembly << '\n'
    << "quad_error=" << c.quad_error << '\n'
    << "snapshot_every=" << c.snapshot_every << '\n'
    << "solver_tol=" << c.solver_tol << '\n';
  if (!c.out.empty()) s << "out=" << c.out << '\n';
  return s.str();
}

inline void write_config_echo(const std::filesystem::path& dir, const RunConfig& c) {
  std::ofstream f = open_output(dir / "config_used.txt");
  f << config_text(c);
}

/// Output sink for a single run: CSV rows, periodic snapshots, config echo.
/// An empty directory disables all file output.
class RunWriter {
 public:
  RunWriter(const std::filesystem::path& dir, const RunConfig& c) : dir_(dir), every_(c.snapshot_every) {
    if (dir_.empty()) return;
    write_config_echo(dir_, c);
    csv_.emplace(dir_ / "diagnostics.csv");
  }

  Observer observer(const PolyhedralMesh& mesh) {
    return [this, &mesh](const DiagnosticsRecord& r, const FlowState& s) {
      if (!csv_) return;
      csv_->append(r);
      if (every_ > 0 && s.step % every_ == 0) write_vtk(dir_ / snapshot_name(s.step), s.x, mesh, s.t);
    };
  }

 private:
  std::filesystem::path dir_;
  int every_;
  std::optional<DiagnosticsCsv> csv_;
};

/// One-shot variant for records and meshes already in memory.
inline void write_outputs(const std::vector<DiagnosticsRecord>& records,
                          const std::vector<std::pair<int, FeVectorField>>& meshes, const PolyhedralMesh& mesh,
                          const std::filesystem::path& dir) {
  write_csv(dir / "diagnostics.csv", records);
  for (const auto& [step, x] : meshes) {
    const double t = step < static_cast<int>(records.size()) ? records[step].t : 0.0;
    write_vtk(dir / snapshot_name(step), x, mesh, t);
  }
}

}  // namespace pmcf

#endif  // PMCF_IO_HPP
