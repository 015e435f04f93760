#pragma once

// Serialization: CSV tables (17 significant digits, '\n' newlines, mandatory
// header, exact double round-trip), strict JSON run configs (unknown keys are
// rejected by full path), gnuplot script emission, and JSON meta sidecars.
// Data files never contain timestamps; a run is reproducible byte for byte.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "lgq/error.hpp"
#include "lgq/fock.hpp"
#include "lgq/model.hpp"
#include "lgq/scan.hpp"

namespace lgq::io {

using nlohmann::json;

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---- CSV --------------------------------------------------------------------

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

inline void write_table(std::ostream& os, const Table& t) {
  for (size_t i = 0; i < t.header.size(); ++i)
    os << (i ? "," : "") << t.header[i];
  os << '\n';
  for (const auto& row : t.rows) {
    for (size_t i = 0; i < row.size(); ++i)
      os << (i ? "," : "") << format_double(row[i]);
    os << '\n';
  }
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

inline Table read_table(std::istream& is) {
  Table t;
  std::string line;
  if (!std::getline(is, line))
    fail(errc::parse_error, "empty input, expected a CSV header");
  t.header = split_csv_line(line);
  size_t width = t.header.size();
  size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != width)
      fail(errc::parse_error, "line " + std::to_string(lineno) + ": expected " +
                                   std::to_string(width) + " columns, got " +
                                   std::to_string(cells.size()));
    std::vector<double> row(cells.size());
    for (size_t i = 0; i < cells.size(); ++i) {
      const std::string& c = cells[i];
      auto [p, ec] = std::from_chars(c.data(), c.data() + c.size(), row[i]);
      if (ec != std::errc{} || p != c.data() + c.size())
        fail(errc::parse_error,
             "line " + std::to_string(lineno) + ": bad number '" + c + "'");
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(errc::io_error, "cannot open '" + path + "' for writing");
  f << content;
  if (!f.good()) fail(errc::io_error, "short write to '" + path + "'");
}

inline void write_table_file(const std::string& path, const Table& t) {
  std::ostringstream os;
  write_table(os, t);
  write_file(path, os.str());
}

inline Table read_table_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(errc::io_error, "cannot open '" + path + "'");
  return read_table(f);
}

inline void write_kv(std::ostream& os,
                     const std::vector<std::pair<std::string, double>>& kv) {
  os << "key,value\n";
  for (const auto& [k, v] : kv) os << k << ',' << format_double(v) << '\n';
}

// ---- grid and mask tables ------------------------------------------------------

// Rows only for populated (tau1 <= tau2) cells, row-major.
inline Table grid_table(const scan::Grid& g) {
  Table t;
  t.header = {"tau1", "tau2", "q_pp", "q_pm", "q_mp", "q_mm"};
  for (int i = 0; i < g.rows(); ++i)
    for (int j = i; j < g.cols(); ++j)
      t.rows.push_back({g.tau1_axis[i], g.tau2_axis[j], g.q[0](i, j),
                        g.q[1](i, j), g.q[2](i, j), g.q[3](i, j)});
  return t;
}

inline Table mask_table(const scan::Grid& g, const scan::Mask& m) {
  Table t;
  t.header = {"tau1", "tau2", "neg_pp", "neg_pm", "neg_mp", "neg_mm"};
  for (int i = 0; i < g.rows(); ++i)
    for (int j = i; j < g.cols(); ++j)
      t.rows.push_back({g.tau1_axis[i], g.tau2_axis[j],
                        double(m.negative[0](i, j)), double(m.negative[1](i, j)),
                        double(m.negative[2](i, j)),
                        double(m.negative[3](i, j))});
  return t;
}

// ---- run configuration -----------------------------------------------------------

struct RunConfig {
  ModelParams params;
  OscillatorInit init;
  scan::Engine engine = scan::Engine::closed;
  fock::Config fock;
  double lo = 0.0, hi = 4.0 * pi;
  int resolution = 401;
  int workers = 0;
  int oracle_resolution_cap = 101;
  double t1 = 0.0, t2 = 0.0;
  int s1 = 1, s2 = -1;
  double tau_max = 4.0 * pi;
  int points = 201;
  double dtau = 2.0 * pi / 2000.0;
  int tuples = 100;
  unsigned long seed = 20240718UL;
  std::string out;
};

namespace detail {

inline void check_keys(const json& j, const std::string& scope,
                       std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed)
      if (it.key() == a) ok = true;
    if (!ok)
      fail(errc::schema_error,
           "unknown key '" + (scope.empty() ? it.key() : scope + "." + it.key()) + "'");
  }
}

inline double num(const json& j, const std::string& where) {
  if (!j.is_number())
    fail(errc::schema_error, "'" + where + "' must be a number");
  return j.get<double>();
}

inline int integer(const json& j, const std::string& where) {
  if (!j.is_number_integer())
    fail(errc::schema_error, "'" + where + "' must be an integer");
  return j.get<int>();
}

inline std::complex<double> cnum(const json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  fail(errc::schema_error, "'" + where + "' must be a number or [re, im]");
}

inline OscillatorInit parse_init(const json& j) {
  check_keys(j, "init",
             {"kind", "nbar", "zeta", "zeta_abs", "zeta_arg", "xi0", "xi1"});
  std::string kind = j.value("kind", "ground");
  if (kind == "ground") return OscillatorInit::ground();
  if (kind == "thermal") return OscillatorInit::thermal(num(j.at("nbar"), "init.nbar"));
  if (kind == "squeezed") {
    if (j.contains("zeta"))
      return OscillatorInit::squeezed(num(j["zeta"], "init.zeta"));
    return OscillatorInit::squeezed(num(j.at("zeta_abs"), "init.zeta_abs"),
                                    j.contains("zeta_arg")
                                        ? num(j["zeta_arg"], "init.zeta_arg")
                                        : 0.0);
  }
  if (kind == "coherent_pair")
    return OscillatorInit::coherent_pair(cnum(j.at("xi0"), "init.xi0"),
                                         cnum(j.at("xi1"), "init.xi1"));
  fail(errc::schema_error, "'init.kind' must be one of ground, thermal, "
                           "squeezed, coherent_pair");
}

}  // namespace detail

inline RunConfig parse_config(const json& j) {
  detail::check_keys(
      j, "",
      {"lambda", "lambda2", "omega_ratio", "phi", "axis", "init", "engine",
       "n_fock", "tol_truncation", "window", "resolution", "workers",
       "oracle_resolution_cap", "t1", "t2", "s1", "s2", "tau_max", "points",
       "dtau", "tuples", "seed", "out"});
  RunConfig c;
  if (j.contains("lambda") && j.contains("lambda2"))
    fail(errc::schema_error, "give 'lambda' or 'lambda2', not both");
  if (j.contains("lambda")) c.params.lambda = detail::num(j["lambda"], "lambda");
  if (j.contains("lambda2")) {
    double l2 = detail::num(j["lambda2"], "lambda2");
    if (l2 < 0.0) fail(errc::schema_error, "'lambda2' must be >= 0");
    c.params.lambda = std::sqrt(l2);
  }
  if (j.contains("omega_ratio"))
    c.params.omega_ratio = detail::num(j["omega_ratio"], "omega_ratio");
  if (j.contains("phi")) c.params.phi = detail::num(j["phi"], "phi");
  if (j.contains("axis")) {
    const auto& a = j["axis"];
    if (!a.is_array() || a.size() != 3)
      fail(errc::schema_error, "'axis' must be [x, y, z]");
    c.params.axis = std::array<double, 3>{detail::num(a[0], "axis[0]"),
                                          detail::num(a[1], "axis[1]"),
                                          detail::num(a[2], "axis[2]")};
  }
  if (j.contains("init")) {
    if (!j["init"].is_object()) fail(errc::schema_error, "'init' must be an object");
    c.init = detail::parse_init(j["init"]);
  }
  if (j.contains("engine")) {
    std::string e = j["engine"].is_string() ? j["engine"].get<std::string>() : "";
    if (e == "closed") c.engine = scan::Engine::closed;
    else if (e == "oracle") c.engine = scan::Engine::oracle;
    else fail(errc::schema_error, "'engine' must be 'closed' or 'oracle'");
  }
  if (j.contains("n_fock")) c.fock.n_fock = detail::integer(j["n_fock"], "n_fock");
  if (j.contains("tol_truncation"))
    c.fock.tol_truncation = detail::num(j["tol_truncation"], "tol_truncation");
  if (j.contains("window")) {
    const auto& w = j["window"];
    if (!w.is_array() || w.size() != 2)
      fail(errc::schema_error, "'window' must be [lo, hi]");
    c.lo = detail::num(w[0], "window[0]");
    c.hi = detail::num(w[1], "window[1]");
  }
  if (j.contains("resolution"))
    c.resolution = detail::integer(j["resolution"], "resolution");
  if (j.contains("workers")) c.workers = detail::integer(j["workers"], "workers");
  if (j.contains("oracle_resolution_cap"))
    c.oracle_resolution_cap =
        detail::integer(j["oracle_resolution_cap"], "oracle_resolution_cap");
  if (j.contains("t1")) c.t1 = detail::num(j["t1"], "t1");
  if (j.contains("t2")) c.t2 = detail::num(j["t2"], "t2");
  if (j.contains("s1")) c.s1 = detail::integer(j["s1"], "s1");
  if (j.contains("s2")) c.s2 = detail::integer(j["s2"], "s2");
  if (j.contains("tau_max")) c.tau_max = detail::num(j["tau_max"], "tau_max");
  if (j.contains("points")) c.points = detail::integer(j["points"], "points");
  if (j.contains("dtau")) c.dtau = detail::num(j["dtau"], "dtau");
  if (j.contains("tuples")) c.tuples = detail::integer(j["tuples"], "tuples");
  if (j.contains("seed")) c.seed = j["seed"].get<unsigned long>();
  if (j.contains("out")) {
    if (!j["out"].is_string()) fail(errc::schema_error, "'out' must be a string");
    c.out = j["out"].get<std::string>();
  }
  if (c.s1 * c.s1 != 1 || c.s2 * c.s2 != 1)
    fail(errc::schema_error, "'s1' and 's2' must be +1 or -1");
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(errc::io_error, "cannot open config '" + path + "'");
  json j;
  try {
    j = json::parse(f);
  } catch (const json::parse_error& e) {
    fail(errc::parse_error, std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) fail(errc::schema_error, "config root must be an object");
  return parse_config(j);
}

// ---- plot scripts and sidecars -----------------------------------------------------

enum class PlotKind { scan_mask, curve, compare };

// Emits a gnuplot script next to the CSV it plots.
inline std::string plot_script(const std::string& csv, PlotKind kind) {
  std::ostringstream os;
  os << "# gnuplot script, generated alongside " << csv << "\n";
  os << "set datafile separator ','\n";
  switch (kind) {
    case PlotKind::scan_mask:
      os << "set xlabel 'tau1'\nset ylabel 'tau2'\nset size ratio -1\n"
         << "set key outside\n"
         << "plot '" << csv << "' every ::1 using 1:($3>0?$2:1/0) t 'q_{++}<0' pt 5 ps 0.4, \\\n"
         << "     '" << csv << "' every ::1 using 1:($4>0?$2:1/0) t 'q_{+-}<0' pt 5 ps 0.4, \\\n"
         << "     '" << csv << "' every ::1 using 1:($5>0?$2:1/0) t 'q_{-+}<0' pt 5 ps 0.4, \\\n"
         << "     '" << csv << "' every ::1 using 1:($6>0?$2:1/0) t 'q_{--}<0' pt 5 ps 0.4\n";
      break;
    case PlotKind::curve:
      os << "set xlabel 'tau'\n"
         << "plot '" << csv << "' every ::1 using 1:2 with lines t 'value'\n";
      break;
    case PlotKind::compare:
      os << "set xlabel 'tau'\n"
         << "plot '" << csv << "' every ::1 using 1:2 with lines t 'a', \\\n"
         << "     '" << csv << "' every ::1 using 1:3 with lines t 'b'\n";
      break;
  }
  return os.str();
}

inline json params_meta(const ModelParams& p, const OscillatorInit& init) {
  json j;
  j["lambda"] = p.lambda;
  j["omega_ratio"] = p.omega_ratio;
  j["phi"] = p.phi;
  if (p.axis) j["axis"] = {(*p.axis)[0], (*p.axis)[1], (*p.axis)[2]};
  json ji;
  ji["kind"] = init_kind_name(init.kind);
  switch (init.kind) {
    case InitKind::thermal: ji["nbar"] = init.nbar; break;
    case InitKind::squeezed:
      ji["zeta_abs"] = init.zeta_abs;
      ji["zeta_arg"] = init.zeta_arg;
      break;
    case InitKind::coherent_pair:
      ji["xi0"] = {init.xi0.real(), init.xi0.imag()};
      ji["xi1"] = {init.xi1.real(), init.xi1.imag()};
      break;
    default: break;
  }
  j["init"] = ji;
  return j;
}

}  // namespace lgq::io
