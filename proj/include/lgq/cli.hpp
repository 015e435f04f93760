#pragma once

// Command-line front end. run_command() is the whole program minus main(),
// parameterized on streams so tests can drive it in-process.
//
// Exit codes: 0 success, 1 bad input (flags, config, domain), 2 numerical
// failure (truncation, diagonalization, cross-check discrepancy).

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lgq/closed_form.hpp"
#include "lgq/error.hpp"
#include "lgq/fock.hpp"
#include "lgq/io.hpp"
#include "lgq/model.hpp"
#include "lgq/scan.hpp"
#include "lgq/semiclassical.hpp"

namespace lgq::cli {

namespace detail {

// Shared model/init/engine flags. Values land in a RunConfig with "config
// file first, explicit flags override" semantics; option counts tell the two
// sources apart.
struct ModelFlags {
  double lambda = 0.0, lambda2 = 0.0, omega_ratio = 0.0, phi = 0.0;
  std::vector<double> axis, xi0, xi1;
  std::string init_kind, engine, config;
  double nbar = 0.0, zeta = 0.0, zeta_abs = 0.0, zeta_arg = 0.0;
  int n_fock = 0;
  double tol_truncation = 0.0;
  bool period = false;

  CLI::Option *o_lambda = nullptr, *o_lambda2 = nullptr, *o_w = nullptr,
              *o_phi = nullptr, *o_axis = nullptr, *o_init = nullptr,
              *o_nbar = nullptr, *o_zeta = nullptr, *o_zeta_abs = nullptr,
              *o_zeta_arg = nullptr, *o_xi0 = nullptr, *o_xi1 = nullptr,
              *o_engine = nullptr, *o_nfock = nullptr, *o_tol = nullptr,
              *o_config = nullptr, *o_period = nullptr;

  void attach(CLI::App* c, bool with_engine) {
    o_config = c->add_option("--config", config,
                             "JSON run configuration; explicit flags override "
                             "values from the file");
    o_lambda = c->add_option("--lambda", lambda, "coupling g/omega");
    o_lambda2 = c->add_option("--lambda2", lambda2, "coupling squared (g/omega)^2");
    o_lambda->excludes(o_lambda2);
    o_lambda2->excludes(o_lambda);
    o_w = c->add_option("--omega-ratio", omega_ratio,
                        "qubit splitting over oscillator frequency");
    o_phi = c->add_option("--phi", phi,
                          "equatorial angle of the measurement axis");
    o_axis = c->add_option("--axis", axis, "measurement axis nx ny nz")
                 ->expected(3);
    o_init = c->add_option("--init", init_kind,
                           "oscillator start: ground, thermal, squeezed, "
                           "coherent_pair")
                 ->check(CLI::IsMember(
                     {"ground", "thermal", "squeezed", "coherent_pair"}));
    o_nbar = c->add_option("--nbar", nbar, "thermal occupation (implies --init thermal)");
    o_zeta = c->add_option("--zeta", zeta,
                           "real squeeze parameter; a negative value flips the "
                           "squeezed quadrature (implies --init squeezed)");
    o_zeta_abs = c->add_option("--zeta-abs", zeta_abs, "squeeze magnitude");
    o_zeta_arg = c->add_option("--zeta-arg", zeta_arg, "squeeze phase");
    o_zeta->excludes(o_zeta_abs);
    o_zeta->excludes(o_zeta_arg);
    o_xi0 = c->add_option("--xi0", xi0,
                          "coherent amplitude paired with qubit up: re im")
                ->expected(2);
    o_xi1 = c->add_option("--xi1", xi1,
                          "coherent amplitude paired with qubit down: re im")
                ->expected(2);
    if (with_engine) {
      o_engine = c->add_option("--engine", engine, "closed or oracle")
                     ->check(CLI::IsMember({"closed", "oracle"}));
      o_nfock = c->add_option("--n-fock", n_fock,
                              "oscillator truncation for the oracle");
      o_tol = c->add_option("--tol-truncation", tol_truncation,
                            "acceptable probability outside the truncated space");
    }
    o_period = c->add_flag("--period-units", period,
                           "times given on the command line are multiples of pi");
  }

  double time_unit() const { return (o_period->count() && period) ? pi : 1.0; }

  io::RunConfig build() const {
    io::RunConfig c;
    if (o_config->count()) c = io::load_config(config);
    if (o_lambda->count()) c.params.lambda = lambda;
    if (o_lambda2->count()) {
      if (lambda2 < 0.0) fail(errc::negative_coupling, "--lambda2 must be >= 0");
      c.params.lambda = std::sqrt(lambda2);
    }
    if (o_w->count()) c.params.omega_ratio = omega_ratio;
    if (o_phi->count()) {
      c.params.phi = phi;
      c.params.axis.reset();  // a fresh angle wins over a config axis
    }
    if (o_axis->count())
      c.params.axis = std::array<double, 3>{axis[0], axis[1], axis[2]};

    std::string kind;
    if (o_init->count()) kind = init_kind;
    else if (o_nbar->count()) kind = "thermal";
    else if (o_zeta->count() || o_zeta_abs->count() || o_zeta_arg->count())
      kind = "squeezed";
    else if (o_xi0->count() || o_xi1->count()) kind = "coherent_pair";
    if (!kind.empty()) {
      if (kind == "ground") {
        c.init = OscillatorInit::ground();
      } else if (kind == "thermal") {
        c.init = OscillatorInit::thermal(o_nbar->count() ? nbar : c.init.nbar);
      } else if (kind == "squeezed") {
        if (o_zeta->count()) c.init = OscillatorInit::squeezed(zeta);
        else
          c.init = OscillatorInit::squeezed(
              o_zeta_abs->count() ? zeta_abs : c.init.zeta_abs,
              o_zeta_arg->count() ? zeta_arg : c.init.zeta_arg);
      } else {
        std::complex<double> a = o_xi0->count()
                                     ? std::complex<double>{xi0[0], xi0[1]}
                                     : c.init.xi0;
        std::complex<double> b = o_xi1->count()
                                     ? std::complex<double>{xi1[0], xi1[1]}
                                     : c.init.xi1;
        c.init = OscillatorInit::coherent_pair(a, b);
      }
    }

    if (o_engine && o_engine->count())
      c.engine = engine == "oracle" ? scan::Engine::oracle : scan::Engine::closed;
    if (o_nfock && o_nfock->count()) c.fock.n_fock = n_fock;
    else if (c.fock.n_fock == fock::Config{}.n_fock)
      c.fock.n_fock = fock::suggested_n_fock(c.init, c.params.lambda,
                                             c.fock.tol_truncation);
    if (o_tol && o_tol->count()) c.fock.tol_truncation = tol_truncation;
    return c;
  }
};

inline std::string out_stem(const std::string& out) {
  if (out.size() > 4 && out.compare(out.size() - 4, 4, ".csv") == 0)
    return out.substr(0, out.size() - 4);
  return out;
}

inline void emit_kv(const std::vector<std::pair<std::string, double>>& kv,
                    const std::string& out_path, std::ostream& out) {
  std::ostringstream os;
  io::write_kv(os, kv);
  out << os.str();
  if (!out_path.empty()) io::write_file(out_path, os.str());
}

inline QuasiResult eval_point(double tau1, double tau2, const io::RunConfig& c) {
  if (c.engine == scan::Engine::oracle)
    return fock::quasiprob_oracle(tau1, tau2, c.params, c.init, c.fock);
  return closed_form::quasiprob(tau1, tau2, c.params, c.init);
}

// ---- subcommand bodies -----------------------------------------------------------

struct EvalOpts {
  ModelFlags mf;
  double t1 = 0.0, t2 = 0.0;
  std::string out;
  CLI::Option *o_t1 = nullptr, *o_t2 = nullptr;
};

inline void run_eval(const EvalOpts& o, std::ostream& out) {
  io::RunConfig c = o.mf.build();
  double u = o.mf.time_unit();
  if (o.o_t1->count()) c.t1 = o.t1 * u;
  if (o.o_t2->count()) c.t2 = o.t2 * u;
  if (!o.out.empty()) c.out = o.out;

  QuasiResult r = eval_point(c.t1, c.t2, c);
  emit_kv({{"tau1", r.tau1},
           {"tau2", r.tau2},
           {"expect_q1", r.expect_q1},
           {"expect_q2", r.expect_q2},
           {"corr", r.corr},
           {"q_pp", r.q[0]},
           {"q_pm", r.q[1]},
           {"q_mp", r.q[2]},
           {"q_mm", r.q[3]},
           {"identity_residual", max_identity_residual(r)}},
          c.out, out);
}

struct ScanOpts {
  ModelFlags mf;
  std::vector<double> window;
  int resolution = 0, workers = 0, cap = 0;
  std::string out;
  CLI::Option *o_window = nullptr, *o_res = nullptr, *o_workers = nullptr,
              *o_cap = nullptr;
};

inline void run_scan(const ScanOpts& o, std::ostream& out) {
  io::RunConfig c = o.mf.build();
  double u = o.mf.time_unit();
  if (o.o_window->count()) {
    c.lo = o.window[0] * u;
    c.hi = o.window[1] * u;
  }
  if (o.o_res->count()) c.resolution = o.resolution;
  if (o.o_workers->count()) c.workers = o.workers;
  if (o.o_cap->count()) c.oracle_resolution_cap = o.cap;
  if (!o.out.empty()) c.out = o.out;

  scan::Request rq;
  rq.lo = c.lo;
  rq.hi = c.hi;
  rq.resolution = c.resolution;
  rq.engine = c.engine;
  rq.workers = c.workers;
  rq.oracle_resolution_cap = c.oracle_resolution_cap;
  rq.fock = c.fock;
  scan::Grid g = scan::grid_scan(c.params, c.init, rq);
  scan::Mask m = scan::region_mask(g);

  out << "scan: engine=" << scan::engine_name(c.engine)
      << " resolution=" << c.resolution << " window=["
      << io::format_double(c.lo) << "," << io::format_double(c.hi) << "]\n";
  for (auto [s1, s2] : sign_pairs) {
    int k = sign_index(s1, s2);
    double best = 0.0;
    int bi = 0, bj = 0;
    for (int i = 0; i < g.rows(); ++i)
      for (int j = i; j < g.cols(); ++j)
        if (g.q[k](i, j) < best) {
          best = g.q[k](i, j);
          bi = i;
          bj = j;
        }
    out << "pair " << sign_pair_name(k) << ": negative_cells=" << m.count(s1, s2)
        << " components=" << m.components[k].size();
    if (best < 0.0)
      out << " min=" << io::format_double(best) << " at ("
          << io::format_double(g.tau1_axis[bi]) << ","
          << io::format_double(g.tau2_axis[bj]) << ")";
    out << '\n';
  }

  if (!c.out.empty()) {
    std::string stem = out_stem(c.out);
    std::string mask_path = stem + ".mask.csv";
    io::write_table_file(c.out, io::grid_table(g));
    io::write_table_file(mask_path, io::mask_table(g, m));
    io::json meta;
    meta["command"] = "scan";
    meta["engine"] = scan::engine_name(c.engine);
    meta["window"] = {c.lo, c.hi};
    meta["resolution"] = c.resolution;
    meta["params"] = io::params_meta(c.params, c.init);
    if (c.engine == scan::Engine::oracle) meta["n_fock"] = c.fock.n_fock;
    io::write_file(stem + ".meta.json", meta.dump(2) + "\n");
    io::write_file(c.out + ".plot", io::plot_script(mask_path, io::PlotKind::scan_mask));
    out << "wrote " << c.out << ", " << mask_path << ", " << stem
        << ".meta.json, " << c.out << ".plot\n";
  }
}

struct MinimaOpts {
  ModelFlags mf;
  double step = 0.1;
  std::string out;
};

inline void run_minima(const MinimaOpts& o, std::ostream& out, std::ostream& err) {
  io::RunConfig c = o.mf.build();
  auto pred = closed_form::min_quasiprob_predicted(c.params, c.init);
  if (pred.lambda_warning)
    err << "warning: lambda = " << io::format_double(c.params.lambda)
        << " is outside the weak-coupling regime; the predicted depth and "
           "loci are unreliable\n";
  if (pred.order_of_magnitude)
    err << "note: squeezed-start depth is an order-of-magnitude estimate\n";

  io::Table t;
  t.header = {"s1", "s2", "tau1_seed", "tau2_seed", "tau1", "tau2", "value", "predicted"};
  for (const auto& l : pred.loci) {
    auto f = [&](double a, double b) {
      return closed_form::quasiprob(a, b, c.params, c.init)(l.s1, l.s2);
    };
    scan::Minimum m =
        scan::refine_minimum(f, l.tau1, l.tau2, o.step, 0.0, 4.0 * pi);
    t.rows.push_back({double(l.s1), double(l.s2), l.tau1, l.tau2, m.tau1,
                      m.tau2, m.value, pred.value});
  }
  std::ostringstream os;
  io::write_table(os, t);
  out << os.str();
  if (!o.out.empty()) io::write_file(o.out, os.str());
}

struct NegativityOpts {
  ModelFlags mf;
  double tau_max = 0.0;
  int points = 0;
  std::string out;
  CLI::Option *o_tau_max = nullptr, *o_points = nullptr;
};

inline void run_negativity(const NegativityOpts& o, std::ostream& out) {
  io::RunConfig c = o.mf.build();
  if (o.o_tau_max->count()) c.tau_max = o.tau_max * o.mf.time_unit();
  if (o.o_points->count()) c.points = o.points;
  if (!o.out.empty()) c.out = o.out;
  if (c.init.kind != InitKind::ground)
    fail(errc::unsupported_init,
         "the negativity closed form assumes the ground start");
  if (c.points < 2) fail(errc::dimension_too_small, "need at least 2 points");

  bool with_oracle = c.engine == scan::Engine::oracle;
  io::Table t;
  t.header = {"tau", "negativity"};
  if (with_oracle) t.header.push_back("negativity_oracle");
  double worst = 0.0;
  for (int i = 0; i < c.points; ++i) {
    double tau = c.tau_max * double(i) / double(c.points - 1);
    double n = closed_form::negativity(tau, c.params.lambda);
    std::vector<double> row{tau, n};
    if (with_oracle) {
      double no = fock::negativity_oracle(tau, c.params, c.init, c.fock);
      row.push_back(no);
      worst = std::max(worst, std::abs(n - no));
    }
    t.rows.push_back(std::move(row));
  }
  std::ostringstream os;
  io::write_table(os, t);
  out << os.str();
  if (with_oracle)
    out << "# max |closed - oracle| = " << io::format_double(worst) << '\n';
  if (!c.out.empty()) {
    io::write_table_file(c.out, t);
    io::write_file(c.out + ".plot",
                   io::plot_script(c.out, with_oracle ? io::PlotKind::compare
                                                      : io::PlotKind::curve));
  }
}

struct NsOpts {
  ModelFlags mf;
  std::vector<double> window;
  int resolution = 41;
  double dtau = 0.0;
  std::string out;
  CLI::Option *o_window = nullptr, *o_dtau = nullptr;
};

inline void run_ns(const NsOpts& o, std::ostream& out) {
  io::RunConfig c = o.mf.build();
  double u = o.mf.time_unit();
  if (o.o_window->count()) {
    c.lo = o.window[0] * u;
    c.hi = o.window[1] * u;
  }
  if (o.o_dtau->count()) c.dtau = o.dtau;
  if (!o.out.empty()) c.out = o.out;
  if (c.lo < 0.0) fail(errc::time_order, "mean-field runs start at tau >= 0");
  if (o.resolution < 2) fail(errc::dimension_too_small, "resolution must be >= 2");

  semiclassical::StepControl ctl;
  ctl.dtau = c.dtau;
  ModelParams free = c.params;
  free.lambda = 0.0;

  io::Table t;
  t.header = {"tau1", "tau2", "ns_pp", "ns_pm", "ns_mp", "ns_mm",
              "ref_pp", "ref_pm", "ref_mp", "ref_mm"};
  auto axis1 = scan::detail::linspace(c.lo, c.hi, o.resolution);
  double max_dev = 0.0, min_joint = 1.0;
  for (int i = 0; i < o.resolution; ++i)
    for (int j = i; j < o.resolution; ++j) {
      double t1 = axis1[i], t2 = axis1[j];
      QuasiResult ref = closed_form::quasiprob(t1, t2, free);
      std::vector<double> row{t1, t2, 0, 0, 0, 0, 0, 0, 0, 0};
      for (auto [s1, s2] : sign_pairs) {
        int k = sign_index(s1, s2);
        double ns = semiclassical::quasiprob(t1, t2, c.params, s1, s2, ctl);
        row[2 + k] = ns;
        row[6 + k] = ref.q[k];
        max_dev = std::max(max_dev, std::abs(ns - ref.q[k]));
        min_joint = std::min(min_joint, semiclassical::joint_probability(
                                            t1, t2, c.params, s1, s2, ctl));
      }
      t.rows.push_back(std::move(row));
    }

  out << "ns: resolution=" << o.resolution << " window=["
      << io::format_double(c.lo) << "," << io::format_double(c.hi) << "]\n";
  out << "max |ns - uncoupled closed form| = " << io::format_double(max_dev) << '\n';
  out << "min joint probability = " << io::format_double(min_joint)
      << (min_joint >= 0.0 ? " (never negative)" : " (NEGATIVE)") << '\n';
  if (!c.out.empty()) io::write_table_file(c.out, t);
}

struct EstimateOpts {
  double mass = 2.2e-25;
  double density = 2.0e4;
  double osc_mass = 0.0;
  double split = 1.0e-3;
  double separation = 0.0;
  double omega_si = 2.0 * pi / 10.0;
  double temperature = 300.0;
  std::string out;
  CLI::Option* o_osc_mass = nullptr;
  CLI::Option* o_density = nullptr;
};

inline void run_estimate(const EstimateOpts& o, std::ostream& out) {
  PhysicalSetup s;
  s.particle_mass = o.mass;
  s.split = o.split;
  s.separation = o.separation;
  s.omega_si = o.omega_si;
  s.temperature = o.temperature;
  if (o.o_osc_mass->count()) s.oscillator_mass = o.osc_mass;
  if (o.o_density->count() || !o.o_osc_mass->count()) s.density = o.density;
  DimensionlessParams d = dimensionless_from_si(s);

  std::vector<std::pair<std::string, double>> kv{
      {"particle_mass", s.particle_mass},
      {"split", s.split},
      {"separation", s.separation > 0.0 ? s.separation : s.split},
      {"omega_si", s.omega_si},
      {"temperature", s.temperature},
      {"nbar", d.nbar},
      {"lambda2_exact", d.lambda2_exact},
      {"lambda_exact", std::sqrt(d.lambda2_exact)},
      {"nbar_lambda2_exact", d.nbar * d.lambda2_exact},
  };
  if (d.lambda2_approx) {
    kv.emplace_back("lambda2_approx", *d.lambda2_approx);
    kv.emplace_back("nbar_lambda2_approx", d.nbar * *d.lambda2_approx);
  }
  emit_kv(kv, o.out, out);
}

struct VerifyOpts {
  int tuples = 100;
  unsigned long seed = 20240718UL;
  double tol = 1e-8;
  int n_fock = 0;
  CLI::Option* o_nfock = nullptr;
};

// Uniform in [0, 1) with an explicit bit mapping; reproducible across
// standard libraries, unlike uniform_real_distribution.
inline double unit_draw(std::mt19937_64& rng) {
  return double(rng() >> 11) * 0x1.0p-53;
}

inline void run_verify(const VerifyOpts& o, std::ostream& out) {
  std::mt19937_64 rng(o.seed);
  double worst_q = 0.0, worst_m = 0.0, worst_id = 0.0;
  for (int i = 0; i < o.tuples; ++i) {
    ModelParams p;
    p.lambda = 0.1 * unit_draw(rng);
    p.omega_ratio = unit_draw(rng);
    p.phi = 2.0 * pi * unit_draw(rng);
    double tau1 = 2.0 * pi * unit_draw(rng);
    double tau2 = tau1 + 2.0 * pi * unit_draw(rng);
    OscillatorInit init;
    int base = 40;
    switch (i % 3) {
      case 0: break;
      case 1:
        init = OscillatorInit::thermal(2.0 * unit_draw(rng));
        base = 80;
        break;
      default:
        init = OscillatorInit::squeezed(unit_draw(rng), 2.0 * pi * unit_draw(rng));
        base = 80;
    }
    fock::Config cfg;
    cfg.n_fock = o.o_nfock->count() ? o.n_fock : base;

    QuasiResult a = closed_form::quasiprob(tau1, tau2, p, init);
    QuasiResult b = fock::quasiprob_oracle(tau1, tau2, p, init, cfg);
    for (int k = 0; k < 4; ++k)
      worst_q = std::max(worst_q, std::abs(a.q[k] - b.q[k]));
    worst_m = std::max({worst_m, std::abs(a.expect_q1 - b.expect_q1),
                        std::abs(a.expect_q2 - b.expect_q2),
                        std::abs(a.corr - b.corr)});
    worst_id = std::max(worst_id, max_identity_residual(b));
  }

  double worst_n = 0.0;
  for (double lam : {0.01, 0.1, 0.3}) {
    ModelParams p;
    p.lambda = lam;
    fock::Config cfg;
    cfg.n_fock = o.o_nfock->count() ? o.n_fock : 64;
    for (int i = 0; i <= 10; ++i) {
      double tau = 2.0 * pi * double(i) / 10.0;
      worst_n = std::max(worst_n,
                         std::abs(closed_form::negativity(tau, lam) -
                                  fock::negativity_oracle(tau, p, {}, cfg)));
    }
  }

  bool ok = worst_q <= o.tol && worst_m <= o.tol && worst_id <= o.tol &&
            worst_n <= o.tol;
  auto line = [&](const char* what, double v) {
    out << "verify: " << what << " = " << io::format_double(v) << " (tol "
        << io::format_double(o.tol) << ") " << (v <= o.tol ? "PASS" : "FAIL")
        << '\n';
  };
  out << "verify: tuples=" << o.tuples << " seed=" << o.seed << '\n';
  line("max |q closed - q oracle|", worst_q);
  line("max moment difference", worst_m);
  line("max oracle identity residual", worst_id);
  line("max |negativity closed - oracle|", worst_n);
  if (!ok)
    fail(errc::truncation_insufficient,
         "cross-check discrepancy above " + io::format_double(o.tol));
}

}  // namespace detail

inline int run_command(const std::vector<std::string>& args, std::ostream& out,
                       std::ostream& err) {
  CLI::App app{"two-time quasiprobability for a qubit coupled to an oscillator"};
  app.name("lgq");
  app.require_subcommand(1);

  auto eval = std::make_shared<detail::EvalOpts>();
  {
    auto* c = app.add_subcommand("eval", "quasiprobability at one time pair");
    eval->mf.attach(c, true);
    eval->o_t1 = c->add_option("--t1", eval->t1, "first measurement time");
    eval->o_t2 = c->add_option("--t2", eval->t2, "second measurement time");
    c->add_option("-o,--out", eval->out, "also write the key,value CSV here");
    c->callback([eval, &out]() { detail::run_eval(*eval, out); });
  }

  auto scan_o = std::make_shared<detail::ScanOpts>();
  {
    auto* c = app.add_subcommand("scan", "grid over the ordered time triangle");
    scan_o->mf.attach(c, true);
    scan_o->o_window = c->add_option("--window", scan_o->window,
                                     "time window lo hi")->expected(2);
    scan_o->o_res = c->add_option("--resolution", scan_o->resolution,
                                  "points per axis");
    scan_o->o_workers = c->add_option("--workers", scan_o->workers,
                                      "scan threads; 0 uses all cores");
    scan_o->o_cap = c->add_option("--oracle-resolution-cap", scan_o->cap,
                                  "guard against runaway oracle scans");
    c->add_option("-o,--out", scan_o->out,
                  "grid CSV path; mask, meta and plot files land next to it");
    c->callback([scan_o, &out]() { detail::run_scan(*scan_o, out); });
  }

  auto minima = std::make_shared<detail::MinimaOpts>();
  {
    auto* c = app.add_subcommand(
        "minima", "refine the predicted weak-coupling minima");
    minima->mf.attach(c, false);
    c->add_option("--step", minima->step, "initial pattern-search step");
    c->add_option("-o,--out", minima->out, "also write the CSV here");
    c->callback([minima, &out, &err]() { detail::run_minima(*minima, out, err); });
  }

  auto neg = std::make_shared<detail::NegativityOpts>();
  {
    auto* c = app.add_subcommand(
        "negativity", "qubit-oscillator entanglement versus time");
    neg->mf.attach(c, true);
    neg->o_tau_max = c->add_option("--tau-max", neg->tau_max, "last time");
    neg->o_points = c->add_option("--points", neg->points, "sample count");
    c->add_option("-o,--out", neg->out, "also write the CSV here");
    c->callback([neg, &out]() { detail::run_negativity(*neg, out); });
  }

  auto ns = std::make_shared<detail::NsOpts>();
  {
    auto* c = app.add_subcommand(
        "ns", "mean-field (semiclassical gravity) comparison grid");
    ns->mf.attach(c, false);
    ns->o_window = c->add_option("--window", ns->window, "time window lo hi")
                       ->expected(2);
    c->add_option("--resolution", ns->resolution, "points per axis");
    ns->o_dtau = c->add_option("--dtau", ns->dtau, "integrator step");
    c->add_option("-o,--out", ns->out, "also write the CSV here");
    c->callback([ns, &out]() { detail::run_ns(*ns, out); });
  }

  auto est = std::make_shared<detail::EstimateOpts>();
  {
    auto* c = app.add_subcommand(
        "estimate", "dimensionless coupling from laboratory numbers");
    c->add_option("--mass", est->mass, "superposed particle mass [kg]");
    est->o_density = c->add_option("--density", est->density,
                                   "oscillator density [kg/m^3]");
    est->o_osc_mass = c->add_option("--osc-mass", est->osc_mass,
                                    "oscillator mass [kg], overrides --density");
    c->add_option("--split", est->split, "superposition split [m]");
    c->add_option("--separation", est->separation,
                  "particle-oscillator distance [m]; 0 means equal to the split");
    c->add_option("--omega-si", est->omega_si, "oscillator frequency [rad/s]");
    c->add_option("--temperature", est->temperature, "bath temperature [K]");
    c->add_option("-o,--out", est->out, "also write the key,value CSV here");
    c->callback([est, &out]() { detail::run_estimate(*est, out); });
  }

  auto ver = std::make_shared<detail::VerifyOpts>();
  {
    auto* c = app.add_subcommand(
        "verify", "randomized closed-form versus oracle cross-check");
    c->add_option("--tuples", ver->tuples, "number of random parameter tuples");
    c->add_option("--seed", ver->seed, "RNG seed");
    c->add_option("--tol", ver->tol, "largest acceptable discrepancy");
    ver->o_nfock = c->add_option("--n-fock", ver->n_fock,
                                 "override the per-start truncation choice");
    c->callback([ver, &out]() { detail::run_verify(*ver, out); });
  }

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(std::move(rev));
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  } catch (const error& e) {
    err << "error: " << errc_name(e.code()) << ": " << e.what() << '\n';
    return is_validation_error(e.code()) ? 1 : 2;
  } catch (const std::exception& e) {
    err << "error: Internal: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace lgq::cli
